#include "moscale/kappa_solver.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "series.hpp"

namespace moscale {

namespace {

using Residual = std::function<long double(long double)>;

// Bracketed root of a residual that decreases strictly in kappa.
KappaResult bisect(double lambda, long double guess, const Residual& f,
                   const KappaOptions& opts) {
  int evals = 0;
  auto eval = [&](long double k) {
    ++evals;
    return f(k);
  };

  // Bracket outward from the guess. f(lambda) > 0 holds analytically, so
  // lambda is only evaluated when the downward walk reaches it.
  const long double lam = lambda;
  long double lo, hi, flo, fhi;
  long double g = std::max(guess, lam);
  long double fg = eval(g);
  if (fg == 0.0L) return {static_cast<double>(g), 0.0, 0};
  if (fg > 0.0L) {
    lo = g;
    flo = fg;
    hi = 2.0L * g;
    fhi = eval(hi);
    while (fhi > 0.0L) {
      lo = hi;
      flo = fhi;
      hi *= 2.0L;
      fhi = eval(hi);
      if (!std::isfinite(static_cast<double>(hi)))
        throw NumericError("kappa solver: upper bracket diverged");
    }
  } else {
    hi = g;
    fhi = fg;
    lo = 0.5L * g;
    for (;;) {
      if (lam > 0.0L && lo <= lam) lo = lam;
      flo = eval(lo);
      if (flo > 0.0L) break;
      if (lo == lam) {
        // only roundoff lands here: lambda/kappa alone reaches 1 at kappa = lambda
        return {lambda, static_cast<double>(flo), 0};
      }
      hi = lo;
      fhi = flo;
      lo *= 0.5L;
      if (lo < 1e-300L)
        throw NumericError("kappa solver: no positive root (lambda = 0)");
    }
  }

  // Illinois false position on log(kappa); a step that fails to land strictly
  // inside the bracket falls back to the geometric midpoint.
  long double best = hi;
  long double fbest = fhi;
  long double xlo = std::log(lo), xhi = std::log(hi);
  long double glo = flo, ghi = fhi;
  int side = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    long double x = (xlo * ghi - xhi * glo) / (ghi - glo);
    if (!(x > xlo && x < xhi)) x = 0.5L * (xlo + xhi);
    const long double mid = std::exp(x);
    const long double fm = eval(mid);
    if (std::fabs(fm) < std::fabs(fbest)) {
      best = mid;
      fbest = fm;
    }
    if (std::fabs(fm) < opts.tolerance) {
      return {static_cast<double>(mid), static_cast<double>(fm), it + 1};
    }
    if (fm > 0.0L) {
      xlo = x;
      glo = fm;
      if (side == -1) ghi *= 0.5L;
      side = -1;
    } else {
      xhi = x;
      ghi = fm;
      if (side == 1) glo *= 0.5L;
      side = 1;
    }
    if (xhi - xlo <= 8.0L * std::numeric_limits<long double>::epsilon() *
                          std::max(std::fabs(xhi), 1.0L))
      break;
  }
  if (std::fabs(fbest) < opts.tolerance)
    return {static_cast<double>(best), static_cast<double>(fbest), opts.max_iterations};
  std::ostringstream os;
  os.precision(17);
  os << "kappa solver did not converge: bracket [" << static_cast<double>(lo) << ", "
     << static_cast<double>(hi) << "], residual " << static_cast<double>(fbest);
  throw NumericError(os.str());
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ParameterError("lambda must be >= 0");
}

}  // namespace

KappaResult solve_kappa(double lambda, SampleSize n, const PowerLawProblem& spectrum,
                        const KappaOptions& opts) {
  check_lambda(lambda);
  if (n.is_infinite()) {
    if (lambda <= 0.0) throw NumericError("kappa undefined for lambda = 0, N = inf");
    return {lambda, 0.0, 0};
  }
  const long double nn = static_cast<long double>(n.count());
  if (lambda == 0.0 && static_cast<long double>(spectrum.p_trunc()) <= nn)
    throw NumericError("kappa solver: no positive root (lambda = 0, P <= N)");
  const auto& s = spectrum.series();
  const detail::SeriesTerm dof{false, 1, 1};
  Residual f = [&](long double k) {
    return static_cast<long double>(lambda) / k + s.sum(dof, k) / nn - 1.0L;
  };
  const long double guess = kappa_asymptotic(lambda, static_cast<double>(nn),
                                             spectrum.gamma());
  return bisect(lambda, guess, f, opts);
}

KappaResult solve_kappa(double lambda, SampleSize n, const ExplicitInstance& spectrum,
                        const KappaOptions& opts) {
  check_lambda(lambda);
  spectrum.validate();
  if (n.is_infinite()) {
    if (lambda <= 0.0) throw NumericError("kappa undefined for lambda = 0, N = inf");
    return {lambda, 0.0, 0};
  }
  const long double nn = static_cast<long double>(n.count());
  if (lambda == 0.0 && static_cast<long double>(spectrum.size()) <= nn)
    throw NumericError("kappa solver: no positive root (lambda = 0, P <= N)");
  const auto& ev = spectrum.eigenvalues;
  Residual f = [&](long double k) {
    long double acc = 0.0L;
    for (std::size_t i = ev.size(); i-- > 0;) acc += ev[i] / (ev[i] + k);
    return static_cast<long double>(lambda) / k + acc / nn - 1.0L;
  };
  long double tr = 0.0L;
  for (double v : ev) tr += v;
  const long double guess = std::max<long double>(lambda, tr / nn / 2.0L);
  return bisect(lambda, guess, f, opts);
}

double kappa_asymptotic(double lambda, double n, double gamma) {
  return std::max(lambda, std::pow(n, -1.0 - gamma));
}

}  // namespace moscale
