// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moscale/det_equiv.hpp"
#include "moscale/kappa_solver.hpp"
#include "moscale/market.hpp"
#include "moscale/market_extension.hpp"
#include "moscale/monte_carlo.hpp"
#include "moscale/scaling_laws.hpp"

using namespace moscale;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<double> log_points(double lo, double hi, int m) {
  std::vector<double> v;
  for (int i = 0; i < m; ++i)
    v.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (m - 1)));
  return v;
}

std::vector<std::uint64_t> int_points(double lo, double hi, int m) {
  std::vector<std::uint64_t> v;
  for (double x : log_points(lo, hi, m)) {
    const auto n = static_cast<std::uint64_t>(std::llround(x));
    if (v.empty() || n != v.back()) v.push_back(n);
  }
  return v;
}

// least-squares slope of log y against log x
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

bool within(double v, double target, double rel) {
  return std::abs(v - target) <= rel * std::abs(target);
}

double tau_for_gap(double ls, double gap) {
  const double s = std::sqrt(ls) - std::sqrt(gap);
  return s * s;
}

// --------------------------------------------------------------- criteria

Verdict c1_kappa() {
  // ratio kappa / max(lambda, N^{-1-gamma}); N stays at or below P/10 so the
  // truncation does not pin kappa. Measured ranges: [1.001, 5.77], [1.000, 4.98],
  // [1.000, 4.07].
  struct Band {
    double gamma, lo, hi;
  };
  const Band bands[] = {{0.3, 0.9, 6.5}, {0.5, 0.9, 5.5}, {1.0, 0.9, 4.5}};
  Verdict v;
  for (const Band& b : bands) {
    const auto p = make_power_law(b.gamma, 1.0, 0.0, 100000);
    std::vector<long double> eig(p.p_trunc());
    for (std::size_t i = 0; i < eig.size(); ++i)
      eig[i] = std::pow(static_cast<long double>(i + 1), -1.0L - b.gamma);
    double worst = 0, lo = 1e300, hi = 0;
    for (double lam : log_points(1e-8, 0.5, 10))
      for (std::uint64_t n : int_points(1, 1e4, 10)) {
        const double k = solve_kappa(lam, SampleSize::of(n), p).kappa;
        long double s = 0;
        for (std::size_t i = eig.size(); i-- > 0;) s += eig[i] / (eig[i] + k);
        const double r = static_cast<double>(lam / k + s / n - 1.0L);
        worst = std::max(worst, std::abs(r));
        const double ratio = k / kappa_asymptotic(lam, static_cast<double>(n), b.gamma);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    v.check(worst < 1e-12, fmt("gamma=%.1f max|res|=%.1e", b.gamma, worst));
    v.check(lo >= b.lo && hi <= b.hi, fmt("ratio in [%.3f, %.3f]", lo, hi) +
                                          fmt(" band [%.1f, %.1f]", b.lo, b.hi));
  }
  return v;
}

Verdict c2_monte_carlo() {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  Verdict v;
  int ok = 0, total = 0;
  double worst = 0;
  std::string failed;
  std::uint64_t seed = 20261000;
  for (auto [ps, n] : {std::pair<std::size_t, std::uint64_t>{200, 50}, {400, 100}, {400, 200}})
    for (double a : {0.75, 0.9, 1.0})
      for (double lam : {1e-3, 1e-2}) {
        const auto r = validate(p, {SampleSize::of(n), a, lam}, ps, 200, ++seed);
        const auto one = [&](double mean, double se, double det, const char* tag) {
          const double tol = std::max(3 * se, 0.1 * det);
          const double err = std::abs(mean - det);
          worst = std::max(worst, err / tol);
          ++total;
          if (err <= tol) {
            ++ok;
          } else {
            char buf[128];
            std::snprintf(buf, sizeof buf, " %s(P=%zu,N=%llu,a=%.2f,l=%.0e)", tag, ps,
                          static_cast<unsigned long long>(n), a, lam);
            failed += buf;
          }
        };
        one(r.stats.mean_l1, r.stats.stderr_l1, r.l1_expected.value, "L1");
        one(r.stats.mean_l2, r.stats.stderr_l2, r.l2_expected.value, "L2");
      }
  v.check(ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " within max(3 se, 10%)" + fmt(", worst err/tol %.2f", worst) + failed);
  return v;
}

// slope of the exact optimum over integer points spanning [lo, hi]
double exact_slope(const PowerLawProblem& p, double alpha, Objective obj, double lo, double hi,
                   std::vector<double>* values = nullptr) {
  std::vector<double> xs, ys;
  for (std::uint64_t n : int_points(lo, hi, 5)) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(optimize_lambda_exact(p, n, alpha, obj).value);
  }
  if (values) *values = ys;
  return -slope(xs, ys);
}

Verdict c3_loss_regimes() {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const auto rep = opt_loss_regime(p, 100, 0.9);
  const double b0 = rep.boundaries.first, b1 = rep.boundaries.second;
  Verdict v;
  // decades centred on the geometric middle of R1 = [1, b0] and R2 = (b0, b1]
  const double c1 = std::sqrt(b0), c2 = std::sqrt(b0 * b1);
  const double s1 = exact_slope(p, 0.9, Objective::Loss, c1 / std::sqrt(10.0), c1 * std::sqrt(10.0));
  const double s2 = exact_slope(p, 0.9, Objective::Loss, c2 / std::sqrt(10.0), c2 * std::sqrt(10.0));
  v.check(within(s1, p.nu(), 0.15), fmt("R1 slope %.3f (target %.2f +-15%%)", s1, p.nu()));
  v.check(within(s2, p.nu() / (p.nu() + 1), 0.15),
          fmt("R2 slope %.3f (target %.2f +-15%%)", s2, p.nu() / (p.nu() + 1)));
  std::vector<double> r3;
  exact_slope(p, 0.9, Objective::Loss, 1e5, 1e6, &r3);
  double mean = 0;
  for (double x : r3) mean += x / r3.size();
  double dev = 0;
  for (double x : r3) dev = std::max(dev, std::abs(x / mean - 1));
  v.check(dev <= 0.2, fmt("R3 [1e5,1e6] max deviation from mean %.3f (<= 0.20)", dev));
  return v;
}

Verdict c4_excess_r3() {
  const auto p = make_power_law(0.5, 2.5, 0.5, 100000);
  const auto rep = opt_excess_regime(p, 1e6, 0.95);
  Verdict v;
  v.check(rep.regime == Regime::R3, fmt("R3 starts at N=%.0f", rep.boundaries.second));
  const double s = exact_slope(p, 0.95, Objective::Excess, 1e5, 1e6);
  const double t = p.nu_prime() / (p.nu_prime() + 1);
  v.check(within(s, t, 0.15), fmt("slope %.3f (target %.2f +-15%%)", s, t));
  return v;
}

Verdict c5_warmup() {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const double ls = lstar(p).value;
  const CompanyConfig ent{SampleSize::infinite(), kInfinity};
  std::vector<double> gs, ns;
  double lo = 1e300, hi = 0;
  Verdict v;
  bool finite = true;
  for (double g : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
    const double tau = tau_for_gap(ls, g);
    const auto t = entry_threshold_search(p, {SampleSize::infinite(), tau}, ent);
    finite = finite && !t.infinite;
    gs.push_back(g);
    ns.push_back(static_cast<double>(t.n));
    const double r = t.n / threshold_warmup(p, tau);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double s = slope(gs, ns);
  v.check(finite, "finite below L*");
  v.check(within(s, -1 / p.nu(), 0.10), fmt("slope %.3f (target %.2f +-10%%)", s, -1 / p.nu()));
  // band of N_E* / G_I^{-1/nu} measured at calibration: [2.20, 2.87]
  v.check(lo >= 2.0 && hi <= 3.2, fmt("ratio in [%.2f, %.2f] (band [2.0, 3.2])", lo, hi));
  bool never = true;
  for (double f : {1.0, 1.5})
    never = never && entry_threshold_search(p, {SampleSize::infinite(), f * ls}, ent).infinite;
  v.check(never, "infinite at tau_I >= L*");
  return v;
}

Verdict c6_finite_incumbent() {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const double ls = lstar(p).value;
  const double tau = tau_for_gap(ls, 1e-3);
  const auto form = threshold_finite(p, 1, tau);
  const double b0 = form.boundaries.first;
  const CompanyConfig ent{SampleSize::infinite(), kInfinity};
  auto n_e = [&](std::uint64_t ni) {
    return static_cast<double>(
        entry_threshold_search(p, {SampleSize::of(ni), tau}, ent).n);
  };
  auto fit = [&](double lo, double hi) {
    std::vector<double> xs, ys;
    for (std::uint64_t ni : int_points(lo, hi, 5)) {
      xs.push_back(static_cast<double>(ni));
      ys.push_back(n_e(ni));
    }
    return slope(xs, ys);
  };
  Verdict v;
  const double s1 = fit(1, 10), s2 = fit(316, 3162), s3 = fit(1e6, 1e7);
  const double t2 = 1 / (p.nu() + 1);
  v.check(within(s1, 1.0, 0.15), fmt("R1 [1,10] slope %.3f (target 1 +-15%%)", s1));
  v.check(within(s2, t2, 0.15), fmt("R2 [316,3162] slope %.3f (target %.2f +-15%%)", s2, t2));
  v.check(std::abs(s3) <= 0.15, fmt("R3 [1e6,1e7] slope %.3f (|s| <= 0.15)", s3));
  bool decreasing = true;
  double prev = 1e300;
  for (std::uint64_t ni : int_points(100, 1e7, 11)) {
    const double r = n_e(ni) / static_cast<double>(ni);
    decreasing = decreasing && r < prev;
    prev = r;
  }
  v.check(decreasing, fmt("N_E*/N_I decreasing past b0=%.1f", b0));
  return v;
}

Verdict c7_constrained() {
  Verdict v;
  struct Case {
    const char* name;
    double delta, g_e, d_lo, d_hi;
    std::size_t p;
    double target, tol;
  };
  const Case cases[] = {
      {"R1 delta=0.5", 0.5, 1e-8, 1e-3, 1e-2, 100000, -1.0, 0.15},
      {"R2 delta=0.5", 0.5, 1e-4, 1e-4, 1e-3, 1000000, -2.0, 0.15},
      {"R3 delta=2.5", 2.5, 0.02, 1e-4, 1e-3, 1000000, -5.0 / 3.0, 0.20},
  };
  for (const Case& c : cases) {
    const auto p = make_power_law(0.5, c.delta, 0.5, c.p);
    const double ls = lstar(p).value;
    std::vector<double> ds, ns;
    std::string regimes;
    for (double d : log_points(c.d_lo, c.d_hi, 3)) {
      const double ti = tau_for_gap(ls, c.g_e + d), te = tau_for_gap(ls, c.g_e);
      const auto t = entry_threshold_search(p, {SampleSize::infinite(), ti},
                                            {SampleSize::infinite(), te});
      ds.push_back(d);
      ns.push_back(static_cast<double>(t.n));
      regimes += to_string(threshold_constrained(p, ti, te).regime);
    }
    const double s = slope(ds, ns);
    v.check(within(s, c.target, c.tol),
            std::string(c.name) + fmt(" slope %.3f (target %.3f", s, c.target) +
                fmt(" +-%.0f%%) forms ", 100 * c.tol) + regimes);
  }
  return v;
}

Verdict c8_modified() {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const double ls = lstar(p).value;
  const double c_bound = 10.0;  // frozen at calibration; measured maximum 6.66
  const CompanyConfig free_ent{SampleSize::infinite(), kInfinity};
  Verdict v;
  double worst_rel = 0;
  for (double g : {1e-3, 3e-3, 1e-2, 3e-2}) {
    const CompanyConfig inc{SampleSize::infinite(), tau_for_gap(ls, g)};
    const auto s = entry_threshold_search(p, inc, free_ent);
    const auto m = modified_threshold_search(p, inc, free_ent);
    const double rel = std::abs(static_cast<double>(m.n) - static_cast<double>(s.n)) / s.n;
    worst_rel = std::max(worst_rel, rel);
    v.pass = v.pass && !s.infinite && !m.infinite;
  }
  v.check(worst_rel <= 0.02, fmt("modified vs simple at N_I=inf: max rel diff %.4f (<= 0.02)", worst_rel));
  double worst7 = 0;
  bool finite = true;
  const double tau7 = tau_for_gap(ls, 1e-2);
  for (std::uint64_t ni : {10ULL, 100ULL, 1000ULL, 10000ULL, 100000ULL}) {
    const auto m = modified_threshold_search(p, {SampleSize::of(ni), tau7}, free_ent);
    const auto b = modified_threshold_bounds(p, SampleSize::of(ni), tau7, kInfinity);
    finite = finite && !m.infinite;
    worst7 = std::max(worst7, m.n / b.value);
  }
  double worst8 = 0;
  for (double d : {1e-3, 3e-3, 1e-2, 3e-2}) {
    const CompanyConfig inc{SampleSize::infinite(), tau_for_gap(ls, 1e-4 + d)};
    const CompanyConfig ent{SampleSize::infinite(), tau_for_gap(ls, 1e-4)};
    const auto m = modified_threshold_search(p, inc, ent);
    const auto b = modified_threshold_bounds(p, SampleSize::infinite(), inc.tau, ent.tau);
    finite = finite && !m.infinite;
    worst8 = std::max(worst8, m.n / b.value);
  }
  v.check(finite, "all modified thresholds finite");
  v.check(worst7 <= c_bound, fmt("finite N_I: max searched/bound %.2f (C=%.0f)", worst7, c_bound));
  v.check(worst8 <= c_bound, fmt("constrained entrant: max searched/bound %.2f (C=%.0f)", worst8, c_bound));
  return v;
}

Verdict c9_pareto() {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const double root = std::sqrt(lstar(p).value);
  double worst = 1e300;
  int points = 0;
  for (double lam : log_points(1e-8, 0.5, 20)) {
    const ExpectedLossCurve curve(p, SampleSize::infinite(), lam);
    for (int j = 0; j < 50; ++j) {
      const double a = j / 49.0;
      const double m = std::sqrt(curve.l1(a).value) + std::sqrt(curve.l2(a).value) - root;
      worst = std::min(worst, m);
      ++points;
    }
  }
  Verdict v;
  v.check(worst >= -1e-10, std::to_string(points) + fmt(" points, min margin %.3e", worst));
  return v;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict c10_reproducible(const std::string& cli, double elapsed_before) {
  Verdict v;
  if (cli.empty() || !fs::exists(cli)) {
    v.check(false, "CLI binary not found (pass --cli)");
    return v;
  }
  const fs::path root = fs::temp_directory_path() / "moscale_acceptance_c10";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::string> runs = {
      "kappa --lambda 1e-3 --n 500",
      "detequiv --n 200 --alpha 0.8 --lambda 0.01 --loss l2",
      "scaling-curve --objective excess --delta 2.5 --alpha 0.9 --n-grid 1:1e5:8",
      "entry-threshold --mode search --tau-i 0.6 --tau-e 0.8 --tau-unit lstar",
      "entry-threshold --mode finite --n-i 1000 --tau-i 0.6 --tau-unit lstar --safety-model det",
      "validate --n 100 --alpha 0.9 --lambda 0.01 --p-sim 200 --trials 50 --seed 7",
  };
  int same = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path a = root / ("a" + std::to_string(i) + ".csv");
    const fs::path b = root / ("b" + std::to_string(i) + ".csv");
    const std::string ca = cli + " " + runs[i] + " --out " + a.string();
    const std::string cb = "MOSCALE_THREADS=1 " + cli + " " + runs[i] + " --out " + b.string();
    const bool ran = std::system(ca.c_str()) == 0 && std::system(cb.c_str()) == 0;
    if (ran && slurp(a) == slurp(b) && !slurp(a).empty()) ++same;
  }
  const std::string fa = cli + " figures --out-dir " + (root / "fa").string();
  const std::string fb = "MOSCALE_THREADS=1 " + cli + " figures --out-dir " + (root / "fb").string();
  bool figs = std::system(fa.c_str()) == 0 && std::system(fb.c_str()) == 0;
  int files = 0;
  if (figs)
    for (const auto& e : fs::directory_iterator(root / "fa")) {
      ++files;
      figs = figs && slurp(e.path()) == slurp(root / "fb" / e.path().filename());
    }
  fs::remove_all(root);
  v.check(same == static_cast<int>(runs.size()),
          std::to_string(same) + "/" + std::to_string(runs.size()) + " runs byte-identical");
  v.check(figs && files == 8, std::to_string(files) + " figure files byte-identical");
  v.check(elapsed_before < 900.0, fmt("acceptance wall time %.0fs (< 900s)", elapsed_before));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cli;
  std::vector<int> only, expect_red;
  app.add_option("--cli", cli, "path to the moscale binary");
  app.add_option("--only", only, "run a subset of criteria");
  app.add_option("--expect-red", expect_red,
                 "criteria known to fail; exit 0 only if exactly these fail");
  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"kappa solver residual and band", c1_kappa},
      {"Monte Carlo vs deterministic equivalents", c2_monte_carlo},
      {"loss scaling regimes", c3_loss_regimes},
      {"excess-loss third regime", c4_excess_r3},
      {"warm-up entry threshold", c5_warmup},
      {"finite-incumbent threshold", c6_finite_incumbent},
      {"constrained-entrant threshold", c7_constrained},
      {"modified safety model", c8_modified},
      {"Pareto inequality", c9_pareto},
      {"CLI reproducibility and runtime", [&] { return c10_reproducible(cli, elapsed()); }},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const double start = elapsed();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    if (!v.pass) failed.insert(id);
    std::printf("%s C%d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                v.detail.c_str(), elapsed() - start);
    std::fflush(stdout);
  }
  std::printf("total %.1fs, %zu failed\n", elapsed(), failed.size());
  const std::set<int> expected(expect_red.begin(), expect_red.end());
  return failed == expected ? 0 : 1;
}
