#pragma once

#include "moscale/problem_instance.hpp"

namespace moscale {

struct KappaResult {
  double kappa;
  double residual;  // lambda/kappa + (1/N) sum lambda_i/(lambda_i+kappa) - 1
  int iterations;
};

struct KappaOptions {
  double tolerance = 1e-14;
  int max_iterations = 200;
};

// Effective regularizer: the unique kappa > 0 with
//   lambda/kappa + (1/N) sum_i lambda_i/(lambda_i + kappa) = 1.
// Infinite N returns kappa = lambda.
KappaResult solve_kappa(double lambda, SampleSize n, const PowerLawProblem& spectrum,
                        const KappaOptions& opts = {});
KappaResult solve_kappa(double lambda, SampleSize n, const ExplicitInstance& spectrum,
                        const KappaOptions& opts = {});

// max(lambda, n^{-1-gamma})
double kappa_asymptotic(double lambda, double n, double gamma);

}  // namespace moscale
