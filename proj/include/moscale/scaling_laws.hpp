#pragma once

#include <cstdint>
#include <utility>

#include "moscale/problem_instance.hpp"

namespace moscale {

// Bracketed growth terms of the loss laws, constants dropped.
struct LossComponents {
  double finite_data = 0;
  double mixture = 0;
  double overfitting = 0;
  double mixture_finite_data = 0;
  double total = 0;
};

LossComponents loss_components(const PowerLawProblem& problem, const RidgeConfig& cfg);
LossComponents excess_components(const PowerLawProblem& problem, const RidgeConfig& cfg);

enum class Regime { R1, R2, R3 };
const char* to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::R1;
  std::pair<double, double> boundaries{kInfinity, kInfinity};
  double exponent = 0;     // local decay rate: value ~ N^{-exponent}
  double value = 0;        // growth form with unit constant
  double lambda_rule = 0;  // regularizer prescribed in this regime
  bool r3_reachable = true;
};

// n <= b0 -> R1, b0 < n <= b1 -> R2, n > b1 -> R3.
RegimeReport opt_loss_regime(const PowerLawProblem& problem, double n, double alpha);
RegimeReport opt_excess_regime(const PowerLawProblem& problem, double n, double alpha);

enum class Objective { Loss, Excess };

struct LambdaSearch {
  double lambda_lo = 1e-8;
  double lambda_hi = 0.5;
  double log_tolerance = 1e-5;  // bracket width in log(lambda)
  int scan_points = 400;        // fallback grid
};

struct LambdaOptimum {
  double lambda = 0;
  double value = 0;
  bool fallback = false;  // bracketing failed; dense scan used
  int evaluations = 0;
};

// Minimises the expected L1 equivalent (or its excess over (1-alpha)^2 L*)
// over lambda by golden-section search on log(lambda).
LambdaOptimum optimize_lambda_exact(const PowerLawProblem& problem, std::uint64_t n,
                                    double alpha, Objective objective,
                                    const LambdaSearch& search = {});

}  // namespace moscale
