#include "moscale/scaling_laws.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "moscale/det_equiv.hpp"

namespace moscale {

namespace {

void check_components_input(const RidgeConfig& cfg, double alpha_min) {
  if (!(cfg.alpha >= alpha_min && cfg.alpha <= 1.0))
    throw DomainError("alpha must lie in [" + std::to_string(alpha_min) + ", 1]");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0))
    throw DomainError("lambda must lie in (0,1)");
}

double finite_data_term(double lambda, double n, double rate, double g1) {
  const double data = std::isinf(n) ? 0.0 : std::pow(n, -rate);
  return std::max(std::pow(lambda, rate / g1), data);
}

double overfitting_term(const PowerLawProblem& pr, const RidgeConfig& cfg) {
  const double n = cfg.n.as_double();
  if (std::isinf(n)) return 0.0;
  const double g1 = 1.0 + pr.gamma();
  const double eff = std::min(std::pow(cfg.lambda, -1.0 / g1), n);
  return (1.0 - cfg.alpha) * (1.0 - pr.rho()) * eff / n;
}

void check_regime_input(double n, double alpha, double alpha_min) {
  if (!(n >= 1.0)) throw DomainError("n must be >= 1");
  if (!(alpha >= alpha_min && alpha <= 1.0))
    throw DomainError("alpha must lie in [" + std::to_string(alpha_min) + ", 1]");
}

Regime classify(double n, double b0, double b1) {
  if (n <= b0) return Regime::R1;
  if (n <= b1) return Regime::R2;
  return Regime::R3;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::R1: return "R1";
    case Regime::R2: return "R2";
    case Regime::R3: return "R3";
  }
  return "?";
}

LossComponents loss_components(const PowerLawProblem& pr, const RidgeConfig& cfg) {
  check_components_input(cfg, 0.5);
  const double g1 = 1.0 + pr.gamma();
  LossComponents c;
  c.finite_data = finite_data_term(cfg.lambda, cfg.n.as_double(), pr.nu(), g1);
  c.mixture = (1.0 - cfg.alpha) * (1.0 - cfg.alpha) * (1.0 - pr.rho());
  c.overfitting = overfitting_term(pr, cfg);
  c.total = c.finite_data + c.mixture + c.overfitting;
  return c;
}

LossComponents excess_components(const PowerLawProblem& pr, const RidgeConfig& cfg) {
  check_components_input(cfg, 0.75);
  const double g1 = 1.0 + pr.gamma();
  LossComponents c;
  c.finite_data = finite_data_term(cfg.lambda, cfg.n.as_double(), pr.nu(), g1);
  c.mixture_finite_data =
      (1.0 - pr.rho()) * (1.0 - cfg.alpha) *
      finite_data_term(cfg.lambda, cfg.n.as_double(), pr.nu_prime(), g1);
  c.overfitting = overfitting_term(pr, cfg);
  c.total = c.finite_data + c.mixture_finite_data + c.overfitting;
  return c;
}

RegimeReport opt_loss_regime(const PowerLawProblem& pr, double n, double alpha) {
  check_regime_input(n, alpha, 0.5);
  const double nu = pr.nu();
  const double g1 = 1.0 + pr.gamma();
  const double w = 1.0 - alpha;
  const double r = 1.0 - pr.rho();
  RegimeReport rep;
  if (w == 0.0) {
    rep.exponent = nu;
    rep.value = std::pow(n, -nu);
    rep.lambda_rule = std::pow(n, -g1);
    return rep;
  }
  rep.boundaries = {std::pow(w * r, -1.0 / nu),
                    std::pow(w, -(2.0 + nu) / nu) * std::pow(r, -1.0 / nu)};
  rep.regime = classify(n, rep.boundaries.first, rep.boundaries.second);
  switch (rep.regime) {
    case Regime::R1:
      rep.exponent = nu;
      rep.value = std::pow(n, -nu);
      rep.lambda_rule = std::pow(n, -g1);
      break;
    case Regime::R2:
      rep.exponent = nu / (nu + 1.0);
      rep.value = std::pow(n / (w * r), -nu / (nu + 1.0));
      rep.lambda_rule = std::pow(w * r / n, g1 / (nu + 1.0));
      break;
    case Regime::R3:
      rep.exponent = 0.0;
      rep.value = w * w * r;
      rep.lambda_rule = std::pow(n * w, -g1);
      break;
  }
  return rep;
}

RegimeReport opt_excess_regime(const PowerLawProblem& pr, double n, double alpha) {
  check_regime_input(n, alpha, 0.75);
  const double nu = pr.nu();
  const double nup = pr.nu_prime();
  const double g1 = 1.0 + pr.gamma();
  const double w = 1.0 - alpha;
  const double r = 1.0 - pr.rho();
  RegimeReport rep;
  rep.r3_reachable = nup < nu;
  if (w == 0.0) {
    rep.exponent = nu;
    rep.value = std::pow(n, -nu);
    rep.lambda_rule = std::pow(n, -g1);
    rep.r3_reachable = false;
    return rep;
  }
  const double upper =
      rep.r3_reachable ? std::pow(w * r, -(nup + 1.0) / (nu - nup)) : kInfinity;
  rep.boundaries = {std::pow(w * r, -1.0 / nu), upper};
  rep.regime = classify(n, rep.boundaries.first, rep.boundaries.second);
  switch (rep.regime) {
    case Regime::R1:
      rep.exponent = nu;
      rep.value = std::pow(n, -nu);
      rep.lambda_rule = std::pow(n, -g1);
      break;
    case Regime::R2:
      rep.exponent = nu / (nu + 1.0);
      rep.value = std::pow(n / (w * r), -nu / (nu + 1.0));
      rep.lambda_rule = std::pow(w * r / n, g1 / (nu + 1.0));
      break;
    case Regime::R3:
      rep.exponent = nup / (nup + 1.0);
      rep.value = w * r * std::pow(n, -nup / (nup + 1.0));
      rep.lambda_rule = std::pow(n, -g1 / (nup + 1.0));
      break;
  }
  return rep;
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct Probe {
  double x;
  double f;
};

class LogObjective {
 public:
  LogObjective(const PowerLawProblem& pr, std::uint64_t n, double alpha, Objective obj)
      : pr_(pr), n_(SampleSize::of(n)), alpha_(alpha), obj_(obj) {}

  double operator()(double x) {
    ++evals;
    ExpectedLossCurve curve(pr_, n_, std::exp(x));
    const double v =
        obj_ == Objective::Loss ? curve.l1(alpha_).value : curve.l1_excess(alpha_);
    if (v < best.f) best = {x, v};
    return v;
  }

  int evals = 0;
  Probe best{0.0, std::numeric_limits<double>::infinity()};

 private:
  const PowerLawProblem& pr_;
  SampleSize n_;
  double alpha_;
  Objective obj_;
};

// Golden-section search on [a, b]; returns the best probe seen.
void golden(LogObjective& f, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
}

double lambda_rule(const PowerLawProblem& pr, double n, double alpha,
                   Objective objective) {
  if (objective == Objective::Excess && alpha >= 0.75)
    return opt_excess_regime(pr, n, alpha).lambda_rule;
  if (alpha >= 0.5) return opt_loss_regime(pr, n, alpha).lambda_rule;
  return std::pow(n * (1.0 - alpha), -1.0 - pr.gamma());
}

}  // namespace

LambdaOptimum optimize_lambda_exact(const PowerLawProblem& pr, std::uint64_t n,
                                    double alpha, Objective objective,
                                    const LambdaSearch& search) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  if (!(search.lambda_lo > 0.0 && search.lambda_lo < search.lambda_hi &&
        search.lambda_hi < 1.0))
    throw ParameterError("lambda search range must satisfy 0 < lo < hi < 1");

  const double xlo = std::log(search.lambda_lo);
  const double xhi = std::log(search.lambda_hi);
  LogObjective f(pr, n, alpha, objective);

  const double rule = lambda_rule(pr, static_cast<double>(n), alpha, objective);
  const double x0 = std::clamp(std::log(rule), xlo, xhi);
  const double h = 0.5;

  bool consistent = true;
  double lo_br = xlo;
  double hi_br = xhi;
  const double f0 = f(x0);
  const double xm = std::max(xlo, x0 - h);
  const double xp = std::min(xhi, x0 + h);
  const double fm = xm < x0 ? f(xm) : f0;
  const double fp = xp > x0 ? f(xp) : f0;
  if (fm < f0 && fp < f0) {
    consistent = false;
  } else if (fm >= f0 && fp >= f0) {
    lo_br = xm;
    hi_br = xp;
  } else {
    // walk downhill with growing steps until the objective turns up
    const double dir = fm < f0 ? -1.0 : 1.0;
    double prev = x0;
    double cur = dir < 0 ? xm : xp;
    double fcur = dir < 0 ? fm : fp;
    double step = h;
    for (;;) {
      step *= 1.0 / kInvPhi;
      const double nxt = std::clamp(cur + dir * step, xlo, xhi);
      if (nxt == cur) {
        lo_br = std::min(prev, cur);
        hi_br = std::max(prev, cur);
        break;
      }
      const double fn = f(nxt);
      if (fn >= fcur) {
        lo_br = std::min(prev, nxt);
        hi_br = std::max(prev, nxt);
        break;
      }
      prev = cur;
      cur = nxt;
      fcur = fn;
    }
  }

  LambdaOptimum out;
  if (consistent) {
    golden(f, lo_br, hi_br, search.log_tolerance);
    // a probe outside the bracket beating the refined minimum means the
    // objective is not unimodal around the rule
    if (f.best.x < lo_br - search.log_tolerance || f.best.x > hi_br + search.log_tolerance)
      consistent = false;
    if (std::abs(f.best.x - lo_br) < search.log_tolerance && lo_br > xlo &&
        f(lo_br - search.log_tolerance) < f.best.f)
      consistent = false;
    if (std::abs(f.best.x - hi_br) < search.log_tolerance && hi_br < xhi &&
        f(hi_br + search.log_tolerance) < f.best.f)
      consistent = false;
  }
  if (!consistent) {
    out.fallback = true;
    const int m = std::max(3, search.scan_points);
    std::vector<double> xs(m);
    int arg = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      xs[i] = xlo + (xhi - xlo) * i / (m - 1);
      const double v = f(xs[i]);
      if (v < fbest) {
        fbest = v;
        arg = i;
      }
    }
    golden(f, xs[std::max(0, arg - 1)], xs[std::min(m - 1, arg + 1)],
           search.log_tolerance);
  }
  out.lambda = std::exp(f.best.x);
  out.value = f.best.f;
  out.evaluations = f.evals;
  return out;
}

}  // namespace moscale
