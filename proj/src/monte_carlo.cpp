#include "moscale/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "moscale/parallel.hpp"

namespace moscale {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double eigen_at(const PowerLawProblem& pr, std::size_t i) {
  return std::pow(static_cast<double>(i + 1), -1.0 - pr.gamma());
}

struct TrialOutcome {
  double l1, l2, det1, det2;
};

void mean_and_stderr(const std::vector<double>& v, double& mean, double& se) {
  const double n = static_cast<double>(v.size());
  mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  se = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  s ^= index * 0xD1B54A32D192ED03ULL;
  const std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_betas(const PowerLawProblem& problem,
                                                          std::size_t p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd b1(static_cast<Eigen::Index>(p));
  Eigen::VectorXd b2(static_cast<Eigen::Index>(p));
  const double rho = problem.rho();
  const double c = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < p; ++i) {
    const double s = std::sqrt(std::pow(static_cast<double>(i + 1), -problem.delta()));
    const double u = normal(rng);
    const double v = normal(rng);
    b1[static_cast<Eigen::Index>(i)] = s * u;
    b2[static_cast<Eigen::Index>(i)] = s * (rho * u + c * v);
  }
  return {b1, b2};
}

Eigen::MatrixXd sample_inputs(std::size_t n, const PowerLawProblem& problem,
                              std::size_t p, Rng& rng) {
  if (n < 1) throw ParameterError("n must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> scale(p);
  for (std::size_t j = 0; j < p; ++j) scale[j] = std::sqrt(eigen_at(problem, j));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scale[j] * normal(rng);
  return x;
}

SyntheticDraw sample_draw(const PowerLawProblem& problem, std::size_t n, std::size_t p,
                          double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
  SyntheticDraw d;
  std::tie(d.beta1, d.beta2) = sample_betas(problem, p, rng);
  d.x = sample_inputs(n, problem, p, rng);

  const std::size_t k = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  d.label_mask.assign(n, false);
  for (std::size_t i = 0; i < k; ++i) d.label_mask[order[i]] = true;

  const Eigen::VectorXd y1 = d.x * d.beta1;
  const Eigen::VectorXd y2 = d.x * d.beta2;
  d.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.y[r] = d.label_mask[i] ? y1[r] : y2[r];
  }
  return d;
}

Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd rhs = inv_n * (x.transpose() * y);

  auto residual_ok = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd lhs = inv_n * (x.transpose() * (x * b)) + lambda * b;
    return (lhs - rhs).norm() <= 1e-8 * std::max(rhs.norm(), 1e-300);
  };

  Eigen::VectorXd beta;
  if (n < p && lambda > 0.0) {
    // (X^T X / N + lambda I)^{-1} X^T y / N = X^T (X X^T + N lambda I)^{-1} y
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    k.selfadjointView<Eigen::Lower>().rankUpdate(x);
    k.diagonal().array() += static_cast<double>(n) * lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(k.selfadjointView<Eigen::Lower>());
    if (llt.info() == Eigen::Success) {
      beta = x.transpose() * llt.solve(y);
      if (residual_ok(beta)) return beta;
    }
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  a.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv_n);
  a.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(a.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success)
    throw NumericError("ridge system is singular or not positive definite");
  beta = llt.solve(rhs);
  if (!residual_ok(beta)) throw NumericError("ridge solve residual above tolerance");
  return beta;
}

Eigen::VectorXd ridge_fit(const SyntheticDraw& draw, double lambda) {
  return ridge_fit(draw.x, draw.y, lambda);
}

std::pair<double, double> population_losses(const Eigen::VectorXd& beta_hat,
                                            const Eigen::VectorXd& beta1,
                                            const Eigen::VectorXd& beta2,
                                            const PowerLawProblem& problem) {
  if (beta_hat.size() != beta1.size() || beta_hat.size() != beta2.size())
    throw ParameterError("vectors must have equal length");
  long double l1 = 0.0L, l2 = 0.0L;
  for (Eigen::Index i = beta_hat.size(); i-- > 0;) {
    const long double w = eigen_at(problem, static_cast<std::size_t>(i));
    const long double e1 = beta_hat[i] - beta1[i];
    const long double e2 = beta_hat[i] - beta2[i];
    l1 += w * e1 * e1;
    l2 += w * e2 * e2;
  }
  return {static_cast<double>(l1), static_cast<double>(l2)};
}

ExplicitInstance sampled_instance(const PowerLawProblem& problem,
                                  const Eigen::VectorXd& beta1,
                                  const Eigen::VectorXd& beta2) {
  const std::size_t p = static_cast<std::size_t>(beta1.size());
  ExplicitInstance inst;
  inst.eigenvalues.resize(p);
  inst.a.resize(p);
  inst.d.resize(p);
  inst.m.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double u = beta1[r] - beta2[r];
    inst.eigenvalues[i] = eigen_at(problem, i);
    inst.a[i] = beta1[r] * beta1[r];
    inst.d[i] = u * u;
    inst.m[i] = u * beta1[r];
  }
  return inst;
}

ValidationReport validate(const PowerLawProblem& problem, const RidgeConfig& cfg,
                          std::size_t p_sim, int trials, std::uint64_t seed) {
  if (trials < 2) throw ParameterError("validate needs at least 2 trials");
  if (cfg.n.is_infinite()) throw ParameterError("validate needs finite n");
  if (p_sim < 1) throw ParameterError("p_sim must be >= 1");
  cfg.validate();
  const std::size_t n = cfg.n.count();

  std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    const SyntheticDraw d = sample_draw(problem, n, p_sim, cfg.alpha, rng);
    const Eigen::VectorXd bh = ridge_fit(d, cfg.lambda);
    const auto [l1, l2] = population_losses(bh, d.beta1, d.beta2, problem);
    const ExplicitInstance inst = sampled_instance(problem, d.beta1, d.beta2);
    out[t] = {l1, l2, l1_det_explicit(inst, cfg).value, l2_det_explicit(inst, cfg).value};
  });

  ValidationReport rep;
  std::vector<double> v1, v2;
  double s1 = 0.0, s2 = 0.0;
  for (const auto& o : out) {
    v1.push_back(o.l1);
    v2.push_back(o.l2);
    s1 += o.det1;
    s2 += o.det2;
  }
  mean_and_stderr(v1, rep.stats.mean_l1, rep.stats.stderr_l1);
  mean_and_stderr(v2, rep.stats.mean_l2, rep.stats.stderr_l2);
  rep.stats.trials = trials;
  rep.stats.seed = seed;
  rep.mean_l1_det_sampled = s1 / trials;
  rep.mean_l2_det_sampled = s2 / trials;

  const PowerLawProblem sim = problem.with_truncation(p_sim);
  rep.l1_expected = l1_det_expected(sim, cfg);
  rep.l2_expected = l2_det_expected(sim, cfg);
  return rep;
}

}  // namespace moscale
