#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rabc/models.hpp"

namespace rabc {

// A labeled vector of summary statistics.
struct SummaryVector {
  std::vector<double> values;
  std::vector<std::string> labels;

  std::size_t size() const { return values.size(); }
  void validate() const;  // finite entries, size >= 1, unique labels
};

// (sample mean, sample variance with n-1 denominator); requires n >= 2.
SummaryVector mean_var(const Series& y);

// Uncentered autocovariances eta_j = (1/T) sum_{t=1+j}^T z_t z_{t-j},
// j = 0..maxlag, divisor T at every lag; requires T > maxlag.
SummaryVector autocov(const Series& z, std::size_t maxlag);

// GARCH(1,1) auxiliary model with standardized Student-t errors:
//   r_t = x_t eps_t,  x_t = b1 + b2 x_{t-1} |eps_{t-1}| + b3 x_{t-1},
// eps_t ~ t_{b4} scaled to unit variance, x_1 = sd(r).
struct AuxGarchFit {
  std::array<double, 4> beta{};
  double loglik = 0.0;
  bool converged = false;
};

struct GarchFitOptions {
  int max_restarts = 10;
  int max_iterations = 600;
  double simplex_tol = 1e-10;
  double score_tol = 1e-3;  // per-observation score norm declaring convergence
};

bool garch_beta_admissible(const std::array<double, 4>& beta);
// Log-likelihood; throws std::domain_error if the volatility recursion
// produces a non-positive x_t or dof <= 2.
double garch_t_loglik(const Series& r, const std::array<double, 4>& beta);

std::array<double, 4> default_garch_init(const Series& r);
// Derivative-free simplex maximization with restarts; never throws on
// non-convergence (converged flag instead).
AuxGarchFit fit_aux_garch(const Series& r, const std::array<double, 4>& init,
                          const GarchFitOptions& opts = {});

// Per-observation score of the auxiliary log-likelihood at beta_hat:
// central finite differences, step 1e-5 * max(1, |beta_j|), divided by n.
SummaryVector aux_score(const Series& z, const std::array<double, 4>& beta_hat);

// Step-refinable variant used by the gradient refinement oracle.
SummaryVector aux_score_with_step(const Series& z, const std::array<double, 4>& beta_hat,
                                  double rel_step);

}  // namespace rabc
