#include "moscale/det_equiv.hpp"

#include <array>
#include <cmath>

#include "moscale/kappa_solver.hpp"
#include "series.hpp"

namespace moscale {

namespace {

void check_q(long double q) {
  if (!(q > 0.0L))
    throw NumericError("degenerate equivalent: Q <= 0 (Q = " +
                       std::to_string(static_cast<double>(q)) + ")");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ParameterError("alpha must lie in [0,1]");
}

}  // namespace

DetEquivResult l1_det_explicit(const ExplicitInstance& inst, const RidgeConfig& cfg) {
  inst.validate();
  check_alpha(cfg.alpha);
  if (!(cfg.lambda >= 0.0 && cfg.lambda < 1.0))
    throw ParameterError("lambda must lie in [0,1)");

  long double kappa = cfg.lambda;
  long double nn = 0.0L;  // 1/N, zero for infinite data
  if (!cfg.n.is_infinite()) {
    kappa = solve_kappa(cfg.lambda, cfg.n, inst).kappa;
    nn = 1.0L / static_cast<long double>(cfg.n.count());
  }

  long double df2 = 0, s_a = 0, s_d3 = 0, s_m2 = 0, s_m1 = 0, s_d = 0, s_d2 = 0;
  for (std::size_t i = inst.size(); i-- > 0;) {
    const long double l = inst.eigenvalues[i];
    const long double inv = 1.0L / (l + kappa);
    const long double inv2 = inv * inv;
    df2 += l * l * inv2;
    s_a += l * inst.a[i] * inv2;
    s_d3 += l * l * l * inst.d[i] * inv2;
    s_m2 += l * l * inst.m[i] * inv2;
    s_m1 += l * inst.m[i] * inv;
    s_d += l * inst.d[i];
    s_d2 += l * l * inst.d[i] * inv;
  }
  const long double w = 1.0L - cfg.alpha;
  const long double dof_n = df2 * nn;

  DetEquivResult r;
  r.kappa = static_cast<double>(kappa);
  const long double q = 1.0L - dof_n;
  check_q(q);
  r.q = static_cast<double>(q);
  const long double t1 = kappa * kappa * s_a;
  const long double t2 = w * w * s_d3;
  const long double t3 = 2.0L * w * kappa * s_m2;
  const long double t4 = -2.0L * w * kappa * dof_n * s_m1;
  const long double t5 = w * dof_n * (s_d - 2.0L * w * s_d2);
  r.t1 = static_cast<double>(t1);
  r.t2 = static_cast<double>(t2);
  r.t3 = static_cast<double>(t3);
  r.t4 = static_cast<double>(t4);
  r.t5 = static_cast<double>(t5);
  r.value = static_cast<double>((t1 + t2 + t3 + t4 + t5) / q);
  return r;
}

DetEquivResult l2_det_explicit(const ExplicitInstance& inst, const RidgeConfig& cfg) {
  check_alpha(cfg.alpha);
  RidgeConfig swapped = cfg;
  swapped.alpha = 1.0 - cfg.alpha;
  return l1_det_explicit(swap_objectives(inst), swapped);
}

ExpectedLossCurve::ExpectedLossCurve(const PowerLawProblem& problem, SampleSize n,
                                     double lambda)
    : n_(n), lambda_(lambda), r_(1.0L - problem.rho()) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw ParameterError("lambda must lie in [0,1)");
  if (lambda == 0.0 && !n.is_infinite())
    throw ParameterError("lambda = 0 requires infinite data");
  const auto& s = problem.series();
  c_ = s.plain(true, 1);
  lstar_ = 2.0L * r_ * c_;
  ridgeless_ = (lambda == 0.0);
  if (ridgeless_) {
    kappa_ = 0.0L;
    q_ = 1.0L;
    dof_n_ = a1_ = a2_ = a3_ = b1_ = b2_ = 0.0L;
    return;
  }

  long double nn = 0.0L;
  kappa_ = lambda;
  if (!n.is_infinite()) {
    kappa_ = solve_kappa(lambda, n, problem).kappa;
    nn = 1.0L / static_cast<long double>(n.count());
  }
  using detail::SeriesTerm;
  const std::array<SeriesTerm, 6> terms{{
      {false, 2, 2},  // df2
      {true, 1, 2},   // sum a lambda / s^2
      {true, 2, 2},   // sum a lambda^2 / s^2
      {true, 3, 2},   // sum a lambda^3 / s^2
      {true, 1, 1},   // sum a lambda / s
      {true, 2, 1},   // sum a lambda^2 / s
  }};
  const auto v = s.sums(terms, kappa_);
  dof_n_ = v[0] * nn;
  a1_ = v[1];
  a2_ = v[2];
  a3_ = v[3];
  b1_ = v[4];
  b2_ = v[5];
  q_ = 1.0L - dof_n_;
  check_q(q_);
}

DetEquivResult ExpectedLossCurve::l1(double alpha) const {
  check_alpha(alpha);
  const long double w = 1.0L - alpha;
  DetEquivResult r;
  r.kappa = static_cast<double>(kappa_);
  r.q = static_cast<double>(q_);
  if (ridgeless_) {
    r.t2 = static_cast<double>(w * w * lstar_);
    r.value = r.t2;
    return r;
  }
  const long double k = kappa_;
  // expected moments: d = 2(1-rho) a, m = (1-rho) a
  const long double t1 = k * k * a1_;
  const long double t2 = w * w * 2.0L * r_ * a3_;
  const long double t3 = 2.0L * w * k * r_ * a2_;
  const long double t4 = -2.0L * w * k * dof_n_ * r_ * b1_;
  const long double t5 = w * dof_n_ * (2.0L * r_ * c_ - 4.0L * w * r_ * b2_);
  r.t1 = static_cast<double>(t1);
  r.t2 = static_cast<double>(t2);
  r.t3 = static_cast<double>(t3);
  r.t4 = static_cast<double>(t4);
  r.t5 = static_cast<double>(t5);

  r.value = static_cast<double>(reduced(w) / q_);
  return r;
}

// Q * E[L1] in the reduced form where (1 - alpha)^2 L* appears on its own.
long double ExpectedLossCurve::reduced(long double w) const {
  const long double k = kappa_;
  const long double u = 1.0L - 2.0L * w;
  return k * k * (1.0L - 2.0L * w * w * r_) * a1_ + w * w * lstar_ +
         2.0L * k * r_ * w * u * a2_ + 2.0L * w * r_ * dof_n_ * u * b2_;
}

double ExpectedLossCurve::l1_excess(double alpha) const {
  check_alpha(alpha);
  const long double w = 1.0L - alpha;
  if (ridgeless_) return 0.0;
  // E - w^2 L* = (Q E - w^2 L*) / Q + w^2 L* (1/Q - 1)
  const long double rest = reduced(w) - w * w * lstar_;
  return static_cast<double>(rest / q_ + w * w * lstar_ * dof_n_ / q_);
}

DetEquivResult l1_det_expected(const PowerLawProblem& problem, const RidgeConfig& cfg) {
  check_alpha(cfg.alpha);
  return ExpectedLossCurve(problem, cfg.n, cfg.lambda).l1(cfg.alpha);
}

DetEquivResult l2_det_expected(const PowerLawProblem& problem, const RidgeConfig& cfg) {
  check_alpha(cfg.alpha);
  return ExpectedLossCurve(problem, cfg.n, cfg.lambda).l2(cfg.alpha);
}

double l2_simple_expected(const PowerLawProblem& problem, double alpha) {
  check_alpha(alpha);
  return alpha * alpha * lstar(problem).value;
}

double l1_infinite_ridgeless(const PowerLawProblem& problem, double alpha) {
  check_alpha(alpha);
  return (1.0 - alpha) * (1.0 - alpha) * lstar(problem).value;
}

}  // namespace moscale
