#include "moscale/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moscale/det_equiv.hpp"

namespace moscale {

namespace {

void require_warmup_bound(double tau, double ls) {
  if (!(tau >= 0.25 * ls))
    throw DomainError("safety threshold tau = " + std::to_string(tau) +
                      " is below L*/4 = " + std::to_string(0.25 * ls));
}

}  // namespace

double alpha_star(const PowerLawProblem& problem, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be >= 0");
  const double ls = lstar(problem).value;
  if (tau >= ls) return 1.0;
  return std::sqrt(tau / ls);
}

double infinite_data_gap(const PowerLawProblem& problem, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be >= 0");
  const double ls = lstar(problem).value;
  if (tau >= ls) return 0.0;
  const double g = std::sqrt(ls) - std::sqrt(tau);
  return g * g;
}

ThresholdParams threshold_params(const PowerLawProblem& problem, double tau_i,
                                 double tau_e) {
  ThresholdParams p;
  p.lstar = lstar(problem).value;
  p.alpha_star_i = alpha_star(problem, tau_i);
  p.alpha_star_e = alpha_star(problem, tau_e);
  p.g_i = infinite_data_gap(problem, tau_i);
  p.g_e = infinite_data_gap(problem, tau_e);
  p.d = p.g_i - p.g_e;
  p.nu = problem.nu();
  p.nu_prime = problem.nu_prime();
  return p;
}

MarketOutcome incumbent_infinite_opt(const PowerLawProblem& problem, double tau) {
  const double ls = lstar(problem).value;
  require_warmup_bound(tau, ls);
  MarketOutcome out;
  out.alpha = alpha_star(problem, tau);
  out.lambda = 0.0;
  out.perf_loss = infinite_data_gap(problem, tau);
  out.safety = std::min(tau, ls);
  return out;
}

MarketOutcome company_opt_simple(const PowerLawProblem& problem, const CompanyConfig& cfg,
                                 const LambdaSearch& search) {
  if (cfg.n.is_infinite()) return incumbent_infinite_opt(problem, cfg.tau);
  const double ls = lstar(problem).value;
  require_warmup_bound(cfg.tau, ls);
  MarketOutcome out;
  out.alpha = std::clamp(alpha_star(problem, cfg.tau), 0.5, 1.0);
  const LambdaOptimum opt =
      optimize_lambda_exact(problem, cfg.n.count(), out.alpha, Objective::Loss, search);
  out.lambda = opt.lambda;
  out.perf_loss = opt.value;
  out.safety = out.alpha * out.alpha * ls;
  return out;
}

EntryThreshold entry_threshold_search(const PowerLawProblem& problem,
                                      const CompanyConfig& incumbent,
                                      const CompanyConfig& entrant,
                                      const SearchOptions& opts) {
  const double target = company_opt_simple(problem, incumbent, opts.lambda).perf_loss;
  const double ls = lstar(problem).value;
  require_warmup_bound(entrant.tau, ls);
  // an unconstrained entrant labels everything with the performance objective
  const double alpha_e =
      std::isinf(entrant.tau) ? 1.0 : std::clamp(alpha_star(problem, entrant.tau), 0.5, 1.0);
  const double floor_e = l1_infinite_ridgeless(problem, alpha_e);
  if (floor_e >= target) return EntryThreshold::never();
  auto loss = [&](std::uint64_t n) {
    return optimize_lambda_exact(problem, n, alpha_e, Objective::Loss, opts.lambda).value;
  };
  return detail::first_entry(loss, target, opts.n_max);
}

double threshold_warmup(const PowerLawProblem& problem, double tau_i) {
  const double ls = lstar(problem).value;
  require_warmup_bound(tau_i, ls);
  if (tau_i >= ls) return kInfinity;
  return std::pow(std::sqrt(ls) - std::sqrt(tau_i), -2.0 / problem.nu());
}

ThresholdForm threshold_finite(const PowerLawProblem& problem, double n_i, double tau_i) {
  const double ls = lstar(problem).value;
  require_warmup_bound(tau_i, ls);
  if (!(n_i >= 1.0)) throw DomainError("n_i must be >= 1");
  const double g = infinite_data_gap(problem, tau_i);
  const double nu = problem.nu();
  const double r = 1.0 - problem.rho();
  ThresholdForm f;
  if (g == 0.0) {
    f.regime = Regime::R1;
    f.value = n_i;
    return f;
  }
  f.boundaries = {std::pow(g * r, -1.0 / (2.0 * nu)),
                  std::pow(g, -0.5 - 1.0 / nu) * std::sqrt(r)};
  if (n_i <= f.boundaries.first) {
    f.regime = Regime::R1;
    f.value = n_i;
  } else if (n_i <= f.boundaries.second) {
    f.regime = Regime::R2;
    f.value = std::pow(n_i, 1.0 / (nu + 1.0)) * std::pow(g * r, -1.0 / (2.0 * (nu + 1.0)));
  } else {
    f.regime = Regime::R3;
    f.value = std::pow(g, -1.0 / nu);
  }
  return f;
}

ThresholdForm threshold_constrained(const PowerLawProblem& problem, double tau_i,
                                    double tau_e) {
  const double ls = lstar(problem).value;
  if (!(tau_i >= 0.5625 * ls))
    throw DomainError("tau_i = " + std::to_string(tau_i) +
                      " is below (0.75)^2 L* = " + std::to_string(0.5625 * ls));
  if (!(tau_e > tau_i)) throw DomainError("tau_e must exceed tau_i");
  const ThresholdParams p = threshold_params(problem, tau_i, tau_e);
  if (!(p.d > 0.0)) throw DomainError("D = G_I - G_E must be positive");
  const double r = 1.0 - problem.rho();
  const double nu = p.nu;
  const double nup = p.nu_prime;
  const double ge_r = p.g_e * r;
  const double b0 = std::sqrt(ge_r);
  ThresholdForm f;
  f.r3_reachable = nup < nu;
  const double b1 = f.r3_reachable ? std::pow(ge_r, nu / (2.0 * (nu - nup))) : 0.0;
  f.boundaries = {b1, b0};
  if (p.d >= b0) {
    f.regime = Regime::R1;
    f.value = std::pow(p.d, -1.0 / nu);
  } else if (p.d >= b1) {
    f.regime = Regime::R2;
    f.value = std::pow(p.d, -(nu + 1.0) / nu) * b0;
  } else {
    f.regime = Regime::R3;
    f.value = std::pow(p.d / b0, -(nup + 1.0) / nup);
  }
  return f;
}

}  // namespace moscale
