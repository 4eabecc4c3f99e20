#pragma once

#include <cstdint>
#include <utility>

#include "moscale/market.hpp"

namespace moscale {

// Company optimum when the safety constraint uses the L2 equivalent.
struct ModifiedOutcome {
  double alpha = 1;
  double lambda = 0;
  double perf_loss = kInfinity;
  double safety_det = kInfinity;
  bool feasible = false;
};

struct ModifiedGrid {
  int lambda_points = 64;
  double lambda_lo = 1e-8;
  double lambda_hi = 0.5;
  int alpha_points = 51;
  double alpha_lo = 0.5;
  double alpha_hi = 1.0;

  // nested refinement: (points - 1) * factor + 1 on each axis
  ModifiedGrid refined(int factor) const;
  double lambda_at(int i) const;
  double alpha_at(int j) const;
};

struct ModifiedSearchOptions {
  ModifiedGrid grid;
  std::uint64_t n_max = std::uint64_t{1} << 40;
};

// Growth forms bounding alpha^2 L* - E[L2 equivalent]; requires delta <= 1.
std::pair<double, double> l2_excess_bounds(const PowerLawProblem& problem,
                                           const RidgeConfig& cfg);

ModifiedOutcome company_opt_modified(const PowerLawProblem& problem,
                                     const CompanyConfig& cfg,
                                     const ModifiedGrid& grid = {});

EntryThreshold modified_threshold_search(const PowerLawProblem& problem,
                                         const CompanyConfig& incumbent,
                                         const CompanyConfig& entrant,
                                         const ModifiedSearchOptions& opts = {});

// Upper-bound growth form for the modified threshold (delta <= 1):
//   finite n_i, tau_e = inf : three branches in n_i with the shifted gap
//   n_i = inf, finite tau_e : two-term bound in the shifted difference
//   n_i = inf, tau_e = inf  : same form as the warm-up threshold
ThresholdForm modified_threshold_bounds(const PowerLawProblem& problem, SampleSize n_i,
                                        double tau_i, double tau_e);

// sqrt((1 - a) + a^2), the shifted mixture weight for a given alpha*
double shifted_alpha(double alpha_star);
// alpha*_E (G_I - G_E) - (G_I - G_E)^2 / (4 L*)
double shifted_difference(const PowerLawProblem& problem, double tau_i, double tau_e);
double shifted_difference(double alpha_star_e, double d, double lstar);

}  // namespace moscale
