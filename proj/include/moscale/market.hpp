#pragma once

#include <cstdint>
#include <utility>

#include "moscale/problem_instance.hpp"
#include "moscale/scaling_laws.hpp"

namespace moscale {

struct CompanyConfig {
  SampleSize n = SampleSize::infinite();
  double tau = kInfinity;  // safety threshold; infinity means unconstrained
};

struct MarketOutcome {
  double alpha = 1;
  double lambda = 0;
  double perf_loss = 0;
  double safety = 0;
  bool feasible = true;
};

struct ThresholdParams {
  double lstar = 0;
  double alpha_star_i = 1, alpha_star_e = 1;
  double g_i = 0, g_e = 0;
  double d = 0;
  double nu = 0, nu_prime = 0;
};

// Minimum entrant dataset size, or the infinity marker.
struct EntryThreshold {
  bool infinite = false;
  std::uint64_t n = 0;
  bool scanned = false;  // monotonicity guard tripped; linear scan used
  int probes = 0;

  static EntryThreshold never() { return {true, 0, false, 0}; }
};

// Regime-resolved growth form for a threshold.
struct ThresholdForm {
  Regime regime = Regime::R1;
  double value = 0;  // may be kInfinity
  std::pair<double, double> boundaries{kInfinity, kInfinity};
  bool r3_reachable = true;
};

struct SearchOptions {
  LambdaSearch lambda;
  std::uint64_t n_max = std::uint64_t{1} << 40;
};

// sqrt(min(tau, L*) / L*)
double alpha_star(const PowerLawProblem& problem, double tau);
// (sqrt(L*) - sqrt(min(tau, L*)))^2
double infinite_data_gap(const PowerLawProblem& problem, double tau);

ThresholdParams threshold_params(const PowerLawProblem& problem, double tau_i,
                                 double tau_e);

MarketOutcome incumbent_infinite_opt(const PowerLawProblem& problem, double tau);
MarketOutcome company_opt_simple(const PowerLawProblem& problem, const CompanyConfig& cfg,
                                 const LambdaSearch& search = {});

EntryThreshold entry_threshold_search(const PowerLawProblem& problem,
                                      const CompanyConfig& incumbent,
                                      const CompanyConfig& entrant,
                                      const SearchOptions& opts = {});

double threshold_warmup(const PowerLawProblem& problem, double tau_i);
ThresholdForm threshold_finite(const PowerLawProblem& problem, double n_i, double tau_i);
ThresholdForm threshold_constrained(const PowerLawProblem& problem, double tau_i,
                                    double tau_e);

namespace detail {
// Smallest n in [1, n_max] with loss(n) <= target, by doubling then bisection.
// loss is expected non-increasing; a violated probe ordering triggers a
// linear scan of the final bracket. Infinite losses mean "does not enter".
template <class LossFn>
EntryThreshold first_entry(LossFn&& loss, double target, std::uint64_t n_max);
}  // namespace detail

}  // namespace moscale

#include "moscale/detail/first_entry.hpp"
