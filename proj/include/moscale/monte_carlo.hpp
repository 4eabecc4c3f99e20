#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "moscale/det_equiv.hpp"
#include "moscale/problem_instance.hpp"

namespace moscale {

using Rng = std::mt19937_64;

// Independent stream for (seed, index): splitmix64 over both words.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

struct SyntheticDraw {
  Eigen::MatrixXd x;  // N x P, rows x_i = Sigma^{1/2} z_i
  Eigen::VectorXd y;
  Eigen::VectorXd beta1;
  Eigen::VectorXd beta2;
  std::vector<bool> label_mask;  // true: labelled by beta1
};

struct TrialStats {
  double mean_l1 = 0, mean_l2 = 0;
  double stderr_l1 = 0, stderr_l2 = 0;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct ValidationReport {
  TrialStats stats;
  // averages over trials of the explicit equivalents built from each draw
  double mean_l1_det_sampled = 0;
  double mean_l2_det_sampled = 0;
  DetEquivResult l1_expected;
  DetEquivResult l2_expected;
};

// Uses the first p modes of the problem (p <= p_trunc is not required).
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_betas(const PowerLawProblem& problem,
                                                          std::size_t p, Rng& rng);
Eigen::MatrixXd sample_inputs(std::size_t n, const PowerLawProblem& problem,
                              std::size_t p, Rng& rng);
// Exactly round(alpha n) rows, chosen uniformly, labelled by beta1.
SyntheticDraw sample_draw(const PowerLawProblem& problem, std::size_t n, std::size_t p,
                          double alpha, Rng& rng);

// (Sigma_hat + lambda I)^{-1} (1/N) X^T y with Sigma_hat = (1/N) X^T X.
Eigen::VectorXd ridge_fit(const SyntheticDraw& draw, double lambda);
Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double lambda);

// L_j = sum_i i^{-1-gamma} (beta_hat_i - beta_{j,i})^2
std::pair<double, double> population_losses(const Eigen::VectorXd& beta_hat,
                                            const Eigen::VectorXd& beta1,
                                            const Eigen::VectorXd& beta2,
                                            const PowerLawProblem& problem);

// Per-draw moment vectors a = beta1^2, d = (beta1 - beta2)^2,
// m = (beta1 - beta2) beta1 on the simulated spectrum.
ExplicitInstance sampled_instance(const PowerLawProblem& problem,
                                  const Eigen::VectorXd& beta1,
                                  const Eigen::VectorXd& beta2);

// Monte Carlo check of the equivalents on a p_sim-mode problem.
ValidationReport validate(const PowerLawProblem& problem, const RidgeConfig& cfg,
                          std::size_t p_sim, int trials, std::uint64_t seed);

}  // namespace moscale
