#include "moscale/problem_instance.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "series.hpp"

namespace moscale {

struct PowerLawProblem::Lazy {
  std::once_flag once;
  std::unique_ptr<detail::PowerLawSeries> series;
};

PowerLawProblem::PowerLawProblem(double g, double d, double r, std::size_t p)
    : gamma_(g), delta_(d), rho_(r), p_trunc_(p), lazy_(std::make_shared<Lazy>()) {}

PowerLawProblem make_power_law(double gamma, double delta, double rho,
                               std::size_t p_trunc) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ParameterError("gamma must be > 0 (got " + std::to_string(gamma) + ")");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ParameterError("delta must be > 0 (got " + std::to_string(delta) + ")");
  if (!(rho >= 0.0))
    throw ParameterError("rho must be >= 0 (got " + std::to_string(rho) + ")");
  if (!(rho < 1.0))
    throw ParameterError("rho must be < 1 (got " + std::to_string(rho) + ")");
  if (p_trunc < 1) throw ParameterError("p_trunc must be >= 1");
  return PowerLawProblem(gamma, delta, rho, p_trunc);
}

double PowerLawProblem::nu() const {
  return std::min(2.0 * (1.0 + gamma_), delta_ + gamma_);
}

double PowerLawProblem::nu_prime() const {
  return std::min(1.0 + gamma_, delta_ + gamma_);
}

PowerLawProblem PowerLawProblem::with_truncation(std::size_t p) const {
  return make_power_law(gamma_, delta_, rho_, p);
}

PowerLawProblem PowerLawProblem::with_rho(double rho) const {
  PowerLawProblem out = make_power_law(gamma_, delta_, rho, p_trunc_);
  out.lazy_ = lazy_;  // the series does not depend on rho
  return out;
}

const detail::PowerLawSeries& PowerLawProblem::series() const {
  std::call_once(lazy_->once, [this] {
    lazy_->series =
        std::make_unique<detail::PowerLawSeries>(gamma_, delta_, p_trunc_);
  });
  return *lazy_->series;
}

std::map<std::string, std::string> PowerLawProblem::to_config() const {
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  return {{"gamma", fmt(gamma_)},
          {"delta", fmt(delta_)},
          {"rho", fmt(rho_)},
          {"p_trunc", std::to_string(p_trunc_)}};
}

PowerLawProblem PowerLawProblem::from_config(
    const std::map<std::string, std::string>& kv) {
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParameterError(std::string("missing key: ") + key);
    return it->second;
  };
  auto num = [&](const char* key) {
    const std::string& s = need(key);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size())
      throw ParameterError(std::string("not a number for ") + key + ": " + s);
    return v;
  };
  std::size_t p = kDefaultTruncation;
  if (kv.count("p_trunc")) {
    const double pv = num("p_trunc");
    if (pv < 1 || pv != std::floor(pv))
      throw ParameterError("p_trunc must be a positive integer");
    p = static_cast<std::size_t>(pv);
  }
  return make_power_law(num("gamma"), num("delta"), num("rho"), p);
}

void ExplicitInstance::validate() const {
  const std::size_t n = eigenvalues.size();
  if (n == 0) throw ParameterError("instance has no modes");
  if (a.size() != n || d.size() != n || m.size() != n)
    throw ParameterError("moment vectors must match the number of eigenvalues");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eigenvalues[i] > 0.0) || !std::isfinite(eigenvalues[i]))
      throw ParameterError("eigenvalue " + std::to_string(i) + " is not positive");
    if (!(a[i] >= 0.0) || !(d[i] >= 0.0))
      throw ParameterError("moment a/d at mode " + std::to_string(i) +
                           " is negative");
    // slack on the scale of the moments: swapped instances carry the
    // cancellation error of a - 2m + d
    const double scale = a[i] + d[i];
    if (m[i] * m[i] > a[i] * d[i] + 1e-12 * scale * scale)
      throw ParameterError("moment m at mode " + std::to_string(i) +
                           " violates m^2 <= a d");
  }
}

ExplicitInstance expected_instance(const PowerLawProblem& problem) {
  const std::size_t p = problem.p_trunc();
  ExplicitInstance inst;
  inst.eigenvalues.resize(p);
  inst.a.resize(p);
  inst.d.resize(p);
  inst.m.resize(p);
  const double r = 1.0 - problem.rho();
  for (std::size_t i = 0; i < p; ++i) {
    const double x = static_cast<double>(i + 1);
    const double w = std::pow(x, -problem.delta());
    inst.eigenvalues[i] = std::pow(x, -1.0 - problem.gamma());
    inst.a[i] = w;
    inst.d[i] = 2.0 * r * w;
    inst.m[i] = r * w;
  }
  return inst;
}

ExplicitInstance swap_objectives(const ExplicitInstance& inst) {
  ExplicitInstance out = inst;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    // beta_2 = beta_1 - u: <beta_2>^2 = a - 2m + d, <u, beta_2> = d - m
    out.a[i] = std::max(0.0, inst.a[i] - 2.0 * inst.m[i] + inst.d[i]);
    out.m[i] = inst.d[i] - inst.m[i];
  }
  return out;
}

void RidgeConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ParameterError("alpha must lie in [0,1] (got " + std::to_string(alpha) + ")");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw ParameterError("lambda must lie in [0,1) (got " + std::to_string(lambda) + ")");
  if (lambda == 0.0 && !n.is_infinite())
    throw ParameterError("lambda = 0 requires infinite data");
}

SeriesValue lstar(const PowerLawProblem& problem) {
  const double r = 1.0 - problem.rho();
  const long double s = problem.series().plain(true, 1);
  const double e = problem.delta() + problem.gamma();
  const double tail =
      2.0 * r * std::pow(static_cast<double>(problem.p_trunc()), -e) / e;
  return {static_cast<double>(2.0L * r * s), tail};
}

namespace {

// Match a_exp = c * delta + q * (1 + gamma) with c in {0,1}, q in 0..3.
bool decompose(const PowerLawProblem& pr, double a_exp, detail::SeriesTerm& t) {
  const double g1 = 1.0 + pr.gamma();
  for (int c = 0; c <= 1; ++c) {
    const double rest = (a_exp - c * pr.delta()) / g1;
    const double q = std::round(rest);
    if (q >= 0 && q <= detail::PowerLawSeries::kMaxQ &&
        std::abs(rest - q) <= 1e-12 * std::max(1.0, std::abs(rest))) {
      t.weighted = (c == 1);
      t.q = static_cast<int>(q);
      return true;
    }
  }
  return false;
}

}  // namespace

double resolvent_sum(const PowerLawProblem& problem, double a_exp, int b_pow,
                     double kappa) {
  if (!(kappa > 0.0)) throw DomainError("resolvent_sum requires kappa > 0");
  if (b_pow != 1 && b_pow != 2) throw ParameterError("b_pow must be 1 or 2");
  detail::SeriesTerm t{false, 0, b_pow};
  if (decompose(problem, a_exp, t))
    return static_cast<double>(problem.series().sum(t, kappa));

  const auto& s = problem.series();
  long double acc = 0.0L;
  for (std::size_t i = s.size(); i-- > 0;) {
    const long double x = static_cast<long double>(i + 1);
    const long double den = s.eigen(i) + kappa;
    long double v = std::pow(x, -static_cast<long double>(a_exp)) / den;
    if (b_pow == 2) v /= den;
    acc += v;
  }
  return static_cast<double>(acc);
}

SumShape named_sum_shape(const PowerLawProblem& pr, NamedSum which) {
  const double g = pr.gamma();
  const double d = pr.delta();
  switch (which) {
    case NamedSum::AlignSq: return {d + 1 + g, 2};
    case NamedSum::AlignCubeSq: return {d + 3 * (1 + g), 2};
    case NamedSum::AlignQuadLin: return {d + 2 + 2 * g, 1};
    case NamedSum::AlignQuadSq: return {d + 2 + 2 * g, 2};
    case NamedSum::AlignLin: return {d + 1 + g, 1};
    case NamedSum::DofSq: return {2 + 2 * g, 2};
    case NamedSum::DofLin: return {1 + g, 1};
    case NamedSum::SpectrumSq: return {1 + g, 2};
  }
  throw ParameterError("unknown named sum");
}

double named_sum(const PowerLawProblem& pr, NamedSum which, double kappa) {
  const SumShape s = named_sum_shape(pr, which);
  return resolvent_sum(pr, s.a_exp, s.b_pow, kappa);
}

double named_sum_theta(const PowerLawProblem& pr, NamedSum which, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("named_sum_theta requires kappa > 0");
  const double g1 = 1.0 + pr.gamma();
  const double d = pr.delta();
  switch (which) {
    case NamedSum::AlignSq: return std::pow(kappa, pr.nu() / g1 - 2.0);
    case NamedSum::AlignCubeSq:
    case NamedSum::AlignQuadLin: return 1.0;
    case NamedSum::AlignQuadSq:
    case NamedSum::AlignLin: return std::max(1.0, std::pow(kappa, (d - 1.0) / g1));
    case NamedSum::DofSq:
    case NamedSum::DofLin: return std::pow(kappa, -1.0 / g1);
    case NamedSum::SpectrumSq: return std::pow(kappa, pr.gamma() / g1 - 2.0);
  }
  throw ParameterError("unknown named sum");
}

const char* to_string(NamedSum which) {
  switch (which) {
    case NamedSum::AlignSq: return "align_sq";
    case NamedSum::AlignCubeSq: return "align_cube_sq";
    case NamedSum::AlignQuadLin: return "align_quad_lin";
    case NamedSum::AlignQuadSq: return "align_quad_sq";
    case NamedSum::AlignLin: return "align_lin";
    case NamedSum::DofSq: return "dof_sq";
    case NamedSum::DofLin: return "dof_lin";
    case NamedSum::SpectrumSq: return "spectrum_sq";
  }
  return "?";
}

}  // namespace moscale
