#include "moscale/market_extension.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "moscale/det_equiv.hpp"
#include "moscale/parallel.hpp"

namespace moscale {

namespace {

void require_small_delta(const PowerLawProblem& problem) {
  if (problem.delta() > 1.0)
    throw DomainError("unsupported regime: this bound needs delta <= 1 (delta = " +
                      std::to_string(problem.delta()) + ")");
}

struct Cell {
  double l1 = kInfinity;
  double l2 = kInfinity;
  int alpha_index = -1;
};

Cell best_alpha(const ExpectedLossCurve& curve, const ModifiedGrid& grid, double tau) {
  Cell best;
  for (int j = 0; j < grid.alpha_points; ++j) {
    const double a = grid.alpha_at(j);
    const double s = curve.l2(a).value;
    if (!(s <= tau)) continue;
    const double v = curve.l1(a).value;
    if (v < best.l1) best = {v, s, j};
  }
  return best;
}

}  // namespace

ModifiedGrid ModifiedGrid::refined(int factor) const {
  ModifiedGrid g = *this;
  if (factor < 1) throw ParameterError("refinement factor must be >= 1");
  // (n - 1) f + 1 points keep every coarse node on the refined grid
  g.lambda_points = (lambda_points - 1) * factor + 1;
  g.alpha_points = (alpha_points - 1) * factor + 1;
  return g;
}

double ModifiedGrid::lambda_at(int i) const {
  if (lambda_points == 1) return lambda_lo;
  const double t = static_cast<double>(i) / (lambda_points - 1);
  return std::exp(std::log(lambda_lo) + t * (std::log(lambda_hi) - std::log(lambda_lo)));
}

double ModifiedGrid::alpha_at(int j) const {
  if (alpha_points == 1) return alpha_lo;
  return alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(j) / (alpha_points - 1);
}

std::pair<double, double> l2_excess_bounds(const PowerLawProblem& problem,
                                           const RidgeConfig& cfg) {
  require_small_delta(problem);
  if (!(cfg.alpha >= 0.5 && cfg.alpha <= 1.0)) throw DomainError("alpha must lie in [0.5,1]");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
  const double n = cfg.n.count();
  const double g1 = 1.0 + problem.gamma();
  const double nu = problem.nu();
  const double lower = std::max(std::pow(cfg.lambda, nu / g1), std::pow(n, -nu));
  const double over = (1.0 - cfg.alpha) * (1.0 - problem.rho()) *
                      std::min(std::pow(cfg.lambda, -1.0 / g1), n) / n;
  return {lower, lower + over};
}

ModifiedOutcome company_opt_modified(const PowerLawProblem& problem,
                                     const CompanyConfig& cfg, const ModifiedGrid& grid) {
  if (grid.lambda_points < 1 || grid.alpha_points < 1)
    throw ParameterError("grid needs at least one point per axis");
  const int nl = grid.lambda_points;
  std::vector<Cell> cells(static_cast<std::size_t>(nl));
  parallel_for(cells.size(), [&](std::size_t i) {
    ExpectedLossCurve curve(problem, cfg.n, grid.lambda_at(static_cast<int>(i)));
    cells[i] = best_alpha(curve, grid, cfg.tau);
  });

  ModifiedOutcome out;
  for (int i = 0; i < nl; ++i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    if (c.alpha_index >= 0 && c.l1 < out.perf_loss) {
      out.feasible = true;
      out.alpha = grid.alpha_at(c.alpha_index);
      out.lambda = grid.lambda_at(i);
      out.perf_loss = c.l1;
      out.safety_det = c.l2;
    }
  }

  if (cfg.n.is_infinite()) {
    // ridgeless infinite-data candidate with the constraint met exactly
    const double ls = lstar(problem).value;
    const double a = alpha_star(problem, cfg.tau);
    if (a >= grid.alpha_lo) {
      const double a_used = std::min(a, grid.alpha_hi);
      const double v = (1.0 - a_used) * (1.0 - a_used) * ls;
      if (v <= out.perf_loss) {
        out.feasible = true;
        out.alpha = a_used;
        out.lambda = 0.0;
        out.perf_loss = v;
        out.safety_det = a_used * a_used * ls;
      }
    }
  }
  return out;
}

EntryThreshold modified_threshold_search(const PowerLawProblem& problem,
                                         const CompanyConfig& incumbent,
                                         const CompanyConfig& entrant,
                                         const ModifiedSearchOptions& opts) {
  const ModifiedOutcome inc = company_opt_modified(problem, incumbent, opts.grid);
  if (!inc.feasible) throw DomainError("incumbent has no feasible (alpha, lambda)");
  const double target = inc.perf_loss;
  const ModifiedOutcome floor_e =
      company_opt_modified(problem, {SampleSize::infinite(), entrant.tau}, opts.grid);
  if (!floor_e.feasible || floor_e.perf_loss >= target) return EntryThreshold::never();
  auto loss = [&](std::uint64_t n) {
    const ModifiedOutcome o =
        company_opt_modified(problem, {SampleSize::of(n), entrant.tau}, opts.grid);
    return o.feasible ? o.perf_loss : kInfinity;
  };
  return detail::first_entry(loss, target, opts.n_max);
}

double shifted_alpha(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("alpha* must lie in [0,1]");
  return std::sqrt((1.0 - a) + a * a);
}

double shifted_difference(double alpha_star_e, double d, double lstar) {
  if (!(lstar > 0.0)) throw ParameterError("L* must be positive");
  return alpha_star_e * d - d * d / (4.0 * lstar);
}

double shifted_difference(const PowerLawProblem& problem, double tau_i, double tau_e) {
  const ThresholdParams p = threshold_params(problem, tau_i, tau_e);
  return shifted_difference(p.alpha_star_e, p.d, p.lstar);
}

ThresholdForm modified_threshold_bounds(const PowerLawProblem& problem, SampleSize n_i,
                                        double tau_i, double tau_e) {
  require_small_delta(problem);
  const double ls = lstar(problem).value;
  const double nu = problem.nu();
  const double r = 1.0 - problem.rho();
  ThresholdForm f;
  f.r3_reachable = false;

  if (std::isinf(tau_e)) {
    if (!(tau_i >= 0.25 * ls)) throw DomainError("tau_i is below L*/4");
    if (n_i.is_infinite()) {
      f.value = threshold_warmup(problem, tau_i);
      f.regime = Regime::R3;
      return f;
    }
    const double at = shifted_alpha(alpha_star(problem, tau_i));
    const double g = (1.0 - at) * (1.0 - at) * r;
    const double n = n_i.as_double();
    if (g == 0.0) {
      f.value = n;
      return f;
    }
    f.boundaries = {std::pow(g * r, -1.0 / (2.0 * nu)),
                    std::pow(g, -0.5 - 1.0 / nu) * std::sqrt(r)};
    if (n <= f.boundaries.first) {
      f.regime = Regime::R1;
      f.value = n;
    } else if (n <= f.boundaries.second) {
      f.regime = Regime::R2;
      f.value = std::pow(n, 1.0 / (nu + 1.0)) * std::pow(g * r, -1.0 / (2.0 * (nu + 1.0)));
    } else {
      f.regime = Regime::R3;
      f.value = std::pow(g, -1.0 / nu);
    }
    return f;
  }

  if (!n_i.is_infinite())
    throw DomainError("bounds cover finite n_i only with an unconstrained entrant");
  if (!(tau_i >= 0.5625 * ls)) throw DomainError("tau_i is below (0.75)^2 L*");
  if (!(tau_e > tau_i)) throw DomainError("tau_e must exceed tau_i");
  const ThresholdParams p = threshold_params(problem, tau_i, tau_e);
  const double dt = shifted_difference(problem, tau_i, tau_e);
  if (!(dt > 0.0)) {
    f.value = kInfinity;
    return f;
  }
  const double first = std::pow(dt, -1.0 / nu);
  const double second =
      std::pow(dt, -(nu + 1.0) / nu) * (std::sqrt(p.g_e * r) + 0.5 * p.d);
  f.regime = first >= second ? Regime::R1 : Regime::R2;
  f.value = std::max(first, second);
  return f;
}

}  // namespace moscale
