#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
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

namespace moscale::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t as_count(double v, const std::string& name) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 9.0e18)
    throw ParameterError(name + " must be a positive integer");
  return static_cast<std::uint64_t>(v);
}

double parse_double(const std::string& s, const std::string& name) {
  if (s == "inf") return kInfinity;
  double v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ParameterError("bad number for " + name + ": " + s);
  return v;
}

SampleSize parse_n(const std::string& s, const std::string& name) {
  if (s == "inf") return SampleSize::infinite();
  return SampleSize::of(as_count(parse_double(s, name), name));
}

std::string show_n(SampleSize n) { return n.is_infinite() ? "inf" : num(n.count()); }

// lo:hi:points, log-spaced; integer grids are rounded and deduplicated
std::vector<double> log_grid(const std::string& spec, bool integer) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ParameterError("grid must be lo:hi:points, got " + spec);
  const double lo = parse_double(parts[0], "grid lo");
  const double hi = parse_double(parts[1], "grid hi");
  const auto m = as_count(parse_double(parts[2], "grid points"), "grid points");
  if (!(lo > 0.0 && hi >= lo && std::isfinite(hi)))
    throw ParameterError("grid needs 0 < lo <= hi < inf");
  std::vector<double> out;
  for (std::uint64_t i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
    double v = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
    if (integer) v = std::max(1.0, std::round(v));
    if (out.empty() || v != out.back()) out.push_back(v);
  }
  return out;
}

std::vector<double> lin_grid(double lo, double hi, int m) {
  std::vector<double> out;
  for (int i = 0; i < m; ++i) out.push_back(lo + (hi - lo) * i / std::max(1, m - 1));
  return out;
}

// CSV writer; an unfinished file is deleted on destruction.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path_.empty() || path_ == "-") {
      os_ = &fallback;
    } else {
      file_.open(path_, std::ios::out | std::ios::trunc);
      if (!file_) throw ParameterError("cannot open output file " + path_);
      os_ = &file_;
    }
  }
  Sink(const Sink&) = delete;
  Sink& operator=(const Sink&) = delete;
  ~Sink() {
    if (file_.is_open()) {
      file_.close();
      if (!done_) {
        std::error_code ec;
        fs::remove(path_, ec);
      }
    }
  }

  void header(const std::string& command, const std::map<std::string, std::string>& cfg,
              const std::vector<std::string>& columns) {
    *os_ << "# moscale " << command << '\n';
    for (const auto& [k, v] : cfg) *os_ << "# " << k << '=' << v << '\n';
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) *os_ << (i ? "," : "") << cells[i];
    *os_ << '\n';
  }
  void finish() {
    os_->flush();
    if (!*os_) throw NumericError("write failed for " + path_);
    done_ = true;
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* os_ = nullptr;
  bool done_ = false;
};

// Every option of a subcommand with its effective value; output paths excluded
// so two runs into different files stay byte-identical.
std::map<std::string, std::string> resolved(const CLI::App* sub) {
  std::map<std::string, std::string> kv;
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "out" || name == "out-dir") continue;
    kv[name] = o->count() ? o->results().back() : o->get_default_str();
  }
  return kv;
}

struct ProblemFlags {
  double gamma = 0.5;
  double delta = 0.5;
  double rho = 0.5;
  double p = static_cast<double>(kDefaultTruncation);

  void add(CLI::App* s, bool spectrum_only = false) {
    s->add_option("--gamma", gamma, "covariance exponent: lambda_i = i^{-1-gamma}");
    if (!spectrum_only) {
      s->add_option("--delta", delta, "alignment exponent: E<beta, v_i>^2 = i^{-delta}");
      s->add_option("--rho", rho, "correlation between the two objectives");
    }
    s->add_option("--p", p, "number of spectral modes");
  }
  PowerLawProblem make() const {
    return make_power_law(gamma, delta, rho, as_count(p, "p"));
  }
};

double tau_value(double tau, const std::string& unit, double ls) {
  if (unit == "lstar") return tau * ls;
  return tau;
}

// ---------------------------------------------------------------- subcommands

void run_kappa(const CLI::App* sub, const ProblemFlags& pf, double lambda,
               const std::string& n_str, Sink& out) {
  const auto problem = make_power_law(pf.gamma, 1.0, 0.0, as_count(pf.p, "p"));
  const SampleSize n = parse_n(n_str, "n");
  const KappaResult r = solve_kappa(lambda, n, problem);
  out.header("kappa", resolved(sub), {"gamma", "lambda", "n", "p", "kappa", "residual", "iterations"});
  out.row({num(pf.gamma), num(lambda), show_n(n), num(problem.p_trunc()), num(r.kappa),
           num(r.residual), std::to_string(r.iterations)});
}

void run_detequiv(const CLI::App* sub, const ProblemFlags& pf, const std::string& n_str,
                  double alpha, double lambda, const std::string& loss, Sink& out) {
  const auto problem = pf.make();
  const RidgeConfig cfg{parse_n(n_str, "n"), alpha, lambda};
  const DetEquivResult r =
      loss == "l1" ? l1_det_expected(problem, cfg) : l2_det_expected(problem, cfg);
  out.header("detequiv", resolved(sub),
             {"loss", "n", "alpha", "lambda", "t1", "t2", "t3", "t4", "t5", "q", "kappa", "value"});
  out.row({loss, show_n(cfg.n), num(alpha), num(lambda), num(r.t1), num(r.t2), num(r.t3),
           num(r.t4), num(r.t5), num(r.q), num(r.kappa), num(r.value)});
}

void scaling_rows(const PowerLawProblem& problem, const std::string& objective, double alpha,
                  const std::vector<double>& ns, bool exact, Sink& out) {
  const bool loss = objective == "loss";
  for (double n : ns) {
    const RegimeReport rep = loss ? opt_loss_regime(problem, n, alpha)
                                  : opt_excess_regime(problem, n, alpha);
    std::string value = "-", lam = "-";
    if (exact) {
      const LambdaOptimum o = optimize_lambda_exact(problem, static_cast<std::uint64_t>(n),
                                                    alpha, loss ? Objective::Loss : Objective::Excess);
      value = num(o.value);
      lam = num(o.lambda);
    }
    out.row({num(static_cast<std::uint64_t>(n)), value, num(rep.value), to_string(rep.regime), lam});
  }
}

struct ThresholdFlags {
  std::string mode = "search";
  std::string safety = "simple";
  std::string n_i = "inf";
  double tau_i = 0;
  double tau_e = kInfinity;
  std::string tau_unit = "abs";
  std::uint64_t n_max = std::uint64_t{1} << 40;
};

void run_threshold(const CLI::App* sub, const ProblemFlags& pf, const ThresholdFlags& tf,
                   Sink& out) {
  const auto problem = pf.make();
  const double ls = lstar(problem).value;
  const double ti = tau_value(tf.tau_i, tf.tau_unit, ls);
  const double te = tau_value(tf.tau_e, tf.tau_unit, ls);
  const SampleSize ni = parse_n(tf.n_i, "n-i");
  const bool det = tf.safety == "det";

  std::string n_star, regime = "-", scanned = "-";
  if (tf.mode == "search") {
    SearchOptions so;
    so.n_max = tf.n_max;
    ModifiedSearchOptions mo;
    mo.n_max = so.n_max;
    const CompanyConfig inc{ni, ti}, ent{SampleSize::infinite(), te};
    const EntryThreshold t = det ? modified_threshold_search(problem, inc, ent, mo)
                                 : entry_threshold_search(problem, inc, ent, so);
    n_star = t.infinite ? "inf" : num(t.n);
    scanned = t.scanned ? "1" : "0";
  } else {
    ThresholdForm f;
    if (tf.mode == "warmup") {
      if (!ni.is_infinite() || !std::isinf(te))
        throw ParameterError("warmup mode needs n-i=inf and tau-e=inf");
      f.value = det ? modified_threshold_bounds(problem, ni, ti, te).value
                    : threshold_warmup(problem, ti);
      f.regime = Regime::R1;
    } else if (tf.mode == "finite") {
      if (ni.is_infinite() || !std::isinf(te))
        throw ParameterError("finite mode needs a finite n-i and tau-e=inf");
      f = det ? modified_threshold_bounds(problem, ni, ti, te)
              : threshold_finite(problem, ni.as_double(), ti);
    } else {
      if (!ni.is_infinite() || std::isinf(te))
        throw ParameterError("constrained mode needs n-i=inf and a finite tau-e");
      f = det ? modified_threshold_bounds(problem, ni, ti, te)
              : threshold_constrained(problem, ti, te);
    }
    n_star = num(f.value);
    regime = to_string(f.regime);
  }
  const ThresholdParams tp = threshold_params(problem, ti, te);
  out.header("entry-threshold", resolved(sub),
             {"mode", "safety_model", "gamma", "delta", "rho", "n_i", "tau_i", "tau_e", "g_i",
              "g_e", "n_e_star", "regime", "scanned"});
  out.row({tf.mode, tf.safety, num(pf.gamma), num(pf.delta), num(pf.rho), show_n(ni), num(ti),
           num(te), num(tp.g_i), num(tp.g_e), n_star, regime, scanned});
}

void run_validate(const CLI::App* sub, const ProblemFlags& pf, const std::string& n_str,
                  double alpha, double lambda, double p_sim, int trials, std::uint64_t seed,
                  Sink& out) {
  const auto problem = pf.make();
  const SampleSize n = parse_n(n_str, "n");
  const std::size_t ps = as_count(p_sim, "p-sim");
  const ValidationReport r = validate(problem, {n, alpha, lambda}, ps, trials, seed);
  out.header("validate", resolved(sub),
             {"n", "alpha", "lambda", "p_sim", "trials", "seed", "mean_l1", "stderr_l1",
              "l1_det_expected", "l1_det_sampled", "mean_l2", "stderr_l2", "l2_det_expected",
              "l2_det_sampled"});
  out.row({show_n(n), num(alpha), num(lambda), num(static_cast<std::uint64_t>(ps)),
           std::to_string(trials), num(seed), num(r.stats.mean_l1), num(r.stats.stderr_l1),
           num(r.l1_expected.value), num(r.mean_l1_det_sampled), num(r.stats.mean_l2),
           num(r.stats.stderr_l2), num(r.l2_expected.value), num(r.mean_l2_det_sampled)});
}

// ------------------------------------------------------------------- figures

double tau_for_gap(double ls, double gap) {
  const double s = std::sqrt(ls) - std::sqrt(gap);
  return s * s;
}

struct FigureFlags {
  std::string which = "all";
  std::string out_dir;
  double p = static_cast<double>(kDefaultTruncation);
  int points = 40;
  double g_i = 0.01;
  double g_e = 0.005;
};

// Curves of the warm-up form against tau_I / L*; nu enters as gamma = delta = nu / 2.
// L* grows as nu falls, so the range starts at L*/2 where every G_I is well below 1.
void figure_warmup(const std::map<std::string, std::string>& cfg, const FigureFlags& ff,
                   std::size_t p, bool by_nu) {
  Sink out((fs::path(ff.out_dir) / (by_nu ? "warmup_by_nu.csv" : "warmup_by_rho.csv")).string(),
           std::cout);
  out.header("figures", cfg, {"nu", "gamma", "delta", "rho", "tau_i_over_lstar", "tau_i", "g_i",
                              "n_e_star"});
  const std::vector<std::pair<double, double>> curves =
      by_nu ? std::vector<std::pair<double, double>>{{0.34, 0.5}, {0.5, 0.5}, {1.0, 0.5}, {2.0, 0.5}}
            : std::vector<std::pair<double, double>>{{0.34, 0.2}, {0.34, 0.5}, {0.34, 0.8}};
  for (const auto& [nu, rho] : curves) {
    const auto problem = make_power_law(nu / 2, nu / 2, rho, p);
    const double ls = lstar(problem).value;
    for (double t : lin_grid(0.5, 0.99, ff.points)) {
      const double tau = t * ls;
      out.row({num(nu), num(nu / 2), num(nu / 2), num(rho), num(t), num(tau),
               num(infinite_data_gap(problem, tau)), num(threshold_warmup(problem, tau))});
    }
  }
  out.finish();
}

void figure_scaling(const std::map<std::string, std::string>& cfg, const FigureFlags& ff,
                    std::size_t p, bool excess) {
  Sink out((fs::path(ff.out_dir) / (excess ? "scaling_excess.csv" : "scaling_loss.csv")).string(),
           std::cout);
  out.header("figures", cfg, {"n", "exact_value", "theta_value", "regime", "lambda_star"});
  const auto problem = make_power_law(0.5, excess ? 2.5 : 0.5, 0.5, p);
  scaling_rows(problem, excess ? "excess" : "loss", 0.9, log_grid("1:1e8:" + std::to_string(ff.points), true),
               false, out);
  out.finish();
}

void figure_finite(const std::map<std::string, std::string>& cfg, const FigureFlags& ff,
                   std::size_t p, bool by_nu) {
  Sink out((fs::path(ff.out_dir) / (by_nu ? "finite_by_nu.csv" : "finite_by_rho.csv")).string(),
           std::cout);
  out.header("figures", cfg, {"nu", "rho", "g_i", "n_i", "n_e_star", "regime"});
  const std::vector<std::pair<double, double>> curves =
      by_nu ? std::vector<std::pair<double, double>>{{0.34, 0.5}, {0.5, 0.5}, {1.0, 0.5}, {2.0, 0.5}}
            : std::vector<std::pair<double, double>>{{0.34, 0.2}, {0.34, 0.5}, {0.34, 0.8}};
  for (const auto& [nu, rho] : curves) {
    const auto problem = make_power_law(nu / 2, nu / 2, rho, p);
    const double tau = tau_for_gap(lstar(problem).value, ff.g_i);
    for (double n : log_grid("1:1e10:" + std::to_string(ff.points), false)) {
      const ThresholdForm f = threshold_finite(problem, n, tau);
      out.row({num(nu), num(rho), num(ff.g_i), num(n), num(f.value), to_string(f.regime)});
    }
  }
  out.finish();
}

void figure_constrained(const std::map<std::string, std::string>& cfg, const FigureFlags& ff,
                        std::size_t p, bool by_delta) {
  Sink out((fs::path(ff.out_dir) /
            (by_delta ? "constrained_by_delta.csv" : "constrained_by_rho.csv")).string(),
           std::cout);
  out.header("figures", cfg, {"gamma", "delta", "rho", "g_e", "d", "n_e_star", "regime"});
  const std::vector<std::pair<double, double>> curves =
      by_delta ? std::vector<std::pair<double, double>>{{0.5, 0.49}, {1.5, 0.49}, {2.5, 0.49}}
               : std::vector<std::pair<double, double>>{{2.5, 0.2}, {2.5, 0.49}, {2.5, 0.8}};
  for (const auto& [delta, rho] : curves) {
    const auto problem = make_power_law(0.5, delta, rho, p);
    const double ls = lstar(problem).value;
    // tau_I >= (3/4)^2 L* caps G_I at L*/16
    const double d_max = 0.95 * (ls / 16 - ff.g_e);
    if (!(d_max > 1e-6)) throw ParameterError("g-e leaves no admissible range for D");
    for (double d : log_grid("1e-6:" + num(d_max) + ":" + std::to_string(ff.points), false)) {
      const ThresholdForm f =
          threshold_constrained(problem, tau_for_gap(ls, ff.g_e + d), tau_for_gap(ls, ff.g_e));
      out.row({num(0.5), num(delta), num(rho), num(ff.g_e), num(d), num(f.value),
               to_string(f.regime)});
    }
  }
  out.finish();
}

void run_figures(const CLI::App* sub, const FigureFlags& ff) {
  if (ff.out_dir.empty()) throw ParameterError("--out-dir is required");
  if (ff.points < 2) throw ParameterError("--points must be >= 2");
  fs::create_directories(ff.out_dir);
  const auto cfg = resolved(sub);
  const std::size_t p = as_count(ff.p, "p");
  const bool all = ff.which == "all";
  if (all || ff.which == "warmup") {
    figure_warmup(cfg, ff, p, true);
    figure_warmup(cfg, ff, p, false);
  }
  if (all || ff.which == "scaling") {
    figure_scaling(cfg, ff, p, false);
    figure_scaling(cfg, ff, p, true);
  }
  if (all || ff.which == "finite") {
    figure_finite(cfg, ff, p, true);
    figure_finite(cfg, ff, p, false);
  }
  if (all || ff.which == "constrained") {
    figure_constrained(cfg, ff, p, true);
    figure_constrained(cfg, ff, p, false);
  }
}

// ---------------------------------------------------------------- config file

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParameterError(path + ":" + std::to_string(no) + ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

// Splices config entries in front of the command-line flags; the last
// occurrence of an option wins, so explicit flags override the file.
std::vector<std::string> expand_args(int argc, const char* const* argv) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw CLI::ArgumentMismatch("--config needs a file");
      config = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (!config) return rest;
  auto kv = read_config(*config);
  auto sub_at = std::find_if(rest.begin(), rest.end(),
                             [](const std::string& s) { return !s.empty() && s[0] != '-'; });
  std::string command;
  if (auto it = kv.find("command"); it != kv.end()) {
    command = it->second;
    kv.erase(it);
  }
  std::vector<std::string> out;
  if (sub_at == rest.end()) {
    if (command.empty()) throw ParameterError("no subcommand given");
    out.push_back(command);
    sub_at = rest.begin();
  } else {
    out.insert(out.end(), rest.begin(), sub_at + 1);
    ++sub_at;
  }
  for (const auto& [k, v] : kv) {
    out.push_back("--" + k);
    out.push_back(v);
  }
  out.insert(out.end(), sub_at, rest.end());
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic equivalents, scaling laws and market-entry thresholds for "
               "mixed-objective ridge regression"};
  app.name("moscale");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "flat key=value file; explicit flags override it");

  std::string out_path = "-";
  auto add_out = [&](CLI::App* s) { s->add_option("--out", out_path, "CSV output file, - for stdout"); };

  // kappa
  ProblemFlags kp;
  double k_lambda = 0;
  std::string k_n;
  auto* kappa = app.add_subcommand("kappa", "solve the effective regularizer equation");
  kp.add(kappa, true);
  kappa->add_option("--lambda", k_lambda, "ridge penalty")->required();
  kappa->add_option("--n", k_n, "sample size, or inf")->required();
  add_out(kappa);

  // detequiv
  ProblemFlags dp;
  std::string d_n, d_loss = "l1";
  double d_alpha = 0.9, d_lambda = 0;
  auto* detequiv = app.add_subcommand("detequiv", "expected deterministic equivalent");
  dp.add(detequiv);
  detequiv->add_option("--n", d_n, "sample size, or inf")->required();
  detequiv->add_option("--alpha", d_alpha, "fraction labelled by the performance objective");
  detequiv->add_option("--lambda", d_lambda, "ridge penalty")->required();
  detequiv->add_option("--loss", d_loss, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
  add_out(detequiv);

  // scaling-curve
  ProblemFlags sp;
  std::string s_obj = "loss", s_grid = "1:1e6:25";
  double s_alpha = 0.9;
  auto* scaling = app.add_subcommand("scaling-curve", "optimally regularized loss against N");
  sp.add(scaling);
  scaling->add_option("--objective", s_obj, "loss or excess")
      ->check(CLI::IsMember({"loss", "excess"}));
  scaling->add_option("--alpha", s_alpha, "fraction labelled by the performance objective");
  scaling->add_option("--n-grid", s_grid, "lo:hi:points, log-spaced");
  add_out(scaling);

  // entry-threshold
  ProblemFlags tp;
  ThresholdFlags tf;
  auto* threshold = app.add_subcommand("entry-threshold", "market-entry threshold");
  tp.add(threshold);
  threshold->add_option("--mode", tf.mode, "warmup, finite, constrained (growth forms) or search")
      ->check(CLI::IsMember({"warmup", "finite", "constrained", "search"}));
  threshold->add_option("--safety-model", tf.safety, "simple or det")
      ->check(CLI::IsMember({"simple", "det"}));
  threshold->add_option("--n-i", tf.n_i, "incumbent sample size, or inf");
  threshold->add_option("--tau-i", tf.tau_i, "incumbent safety threshold")->required();
  threshold->add_option("--tau-e", tf.tau_e, "entrant safety threshold, or inf");
  threshold->add_option("--tau-unit", tf.tau_unit, "abs, or lstar for multiples of L*")
      ->check(CLI::IsMember({"abs", "lstar"}));
  threshold->add_option("--n-max", tf.n_max, "search cap on the entrant sample size");
  add_out(threshold);

  // validate
  ProblemFlags vp;
  std::string v_n;
  double v_alpha = 0.9, v_lambda = 0.01, v_psim = 400;
  int v_trials = 200;
  std::uint64_t v_seed = 0;
  auto* val = app.add_subcommand("validate", "Monte Carlo check of the equivalents");
  vp.add(val);
  val->add_option("--n", v_n, "sample size")->required();
  val->add_option("--alpha", v_alpha, "fraction labelled by the performance objective");
  val->add_option("--lambda", v_lambda, "ridge penalty");
  val->add_option("--p-sim", v_psim, "simulated dimension");
  val->add_option("--trials", v_trials, "number of trials");
  val->add_option("--seed", v_seed, "base seed");
  add_out(val);

  // figures
  FigureFlags ff;
  auto* figures = app.add_subcommand("figures", "growth-form data for each figure panel");
  figures->add_option("--which", ff.which, "warmup, scaling, finite, constrained or all")
      ->check(CLI::IsMember({"warmup", "scaling", "finite", "constrained", "all"}));
  figures->add_option("--out-dir", ff.out_dir, "directory for the panel CSV files")->required();
  figures->add_option("--p", ff.p, "number of spectral modes");
  figures->add_option("--points", ff.points, "points per curve");
  figures->add_option("--g-i", ff.g_i, "incumbent gap G_I for the finite-incumbent panels");
  figures->add_option("--g-e", ff.g_e, "entrant gap G_E for the constrained panels");

  std::vector<std::string> args;
  try {
    args = expand_args(argc, argv);
    std::vector<const char*> cargs{argc > 0 ? argv[0] : "moscale"};
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*figures) {
      run_figures(figures, ff);
      return 0;
    }
    Sink sink(out_path, out);
    if (*kappa) run_kappa(kappa, kp, k_lambda, k_n, sink);
    if (*detequiv) run_detequiv(detequiv, dp, d_n, d_alpha, d_lambda, d_loss, sink);
    if (*scaling) {
      const auto problem = sp.make();
      const auto ns = log_grid(s_grid, true);
      sink.header("scaling-curve", resolved(scaling),
                  {"n", "exact_value", "theta_value", "regime", "lambda_star"});
      scaling_rows(problem, s_obj, s_alpha, ns, true, sink);
    }
    if (*threshold) run_threshold(threshold, tp, tf, sink);
    if (*val) run_validate(val, vp, v_n, v_alpha, v_lambda, v_psim, v_trials, v_seed, sink);
    sink.finish();
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace moscale::cli
