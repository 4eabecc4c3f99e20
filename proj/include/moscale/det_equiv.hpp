#pragma once

#include "moscale/problem_instance.hpp"

namespace moscale {

struct DetEquivResult {
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0;
  double q = 1;   // 1 - (1/N) tr(Sigma^2 (Sigma + kappa)^{-2})
  double kappa = 0;
  double value = 0;
};

// Deterministic equivalent of L1 for an explicit diagonal instance.
DetEquivResult l1_det_explicit(const ExplicitInstance& inst, const RidgeConfig& cfg);
// L2 equivalent: L1 with the objectives exchanged and alpha -> 1 - alpha.
DetEquivResult l2_det_explicit(const ExplicitInstance& inst, const RidgeConfig& cfg);

// Expected equivalents under the power-law moments.
DetEquivResult l1_det_expected(const PowerLawProblem& problem, const RidgeConfig& cfg);
DetEquivResult l2_det_expected(const PowerLawProblem& problem, const RidgeConfig& cfg);

// alpha^2 L*
double l2_simple_expected(const PowerLawProblem& problem, double alpha);
// (1 - alpha)^2 L*
double l1_infinite_ridgeless(const PowerLawProblem& problem, double alpha);

// The expected equivalents at fixed (N, lambda) are quadratic in alpha once
// kappa and six spectral sums are known. This caches those and evaluates any
// alpha in O(1).
class ExpectedLossCurve {
 public:
  ExpectedLossCurve(const PowerLawProblem& problem, SampleSize n, double lambda);

  DetEquivResult l1(double alpha) const;
  DetEquivResult l2(double alpha) const { return l1(1.0 - alpha); }
  // l1(alpha).value - (1 - alpha)^2 L*, without the cancellation in double
  double l1_excess(double alpha) const;
  double lstar() const { return static_cast<double>(lstar_); }

  double kappa() const { return static_cast<double>(kappa_); }
  double q() const { return static_cast<double>(q_); }
  double lambda() const { return lambda_; }
  SampleSize n() const { return n_; }

 private:
  long double reduced(long double w) const;

  SampleSize n_;
  double lambda_;
  long double r_;       // 1 - rho
  long double lstar_;
  long double kappa_;
  long double q_;
  long double dof_n_;   // df2 / N
  long double a1_, a2_, a3_, b1_, b2_, c_;
  bool ridgeless_;
};

}  // namespace moscale
