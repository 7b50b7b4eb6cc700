#pragma once

#include <cstddef>
#include <vector>

#include "rabc/rng.hpp"

namespace rabc {

using Series = std::vector<double>;

// MA(q) coefficients. For q = 2 the invertibility region is the triangle
// with corners (-2,1), (2,1), (0,-1):
//   -2 < theta1 < 2,  theta1 + theta2 > -1,  theta1 - theta2 < 1,  theta2 < 1.
struct MaParams {
  std::vector<double> theta;
  bool invertible() const;
};

// Gaussian stochastic volatility:
//   y_t = exp(h_t/2) u_t,  h_t = omega + rho h_{t-1} + sigma_v v_t.
struct SvParams {
  double omega = 0.0;
  double rho = 0.0;     // in (0,1)
  double sigma_v = 0.0; // in (0,1)
  bool valid() const { return rho > 0.0 && rho < 1.0 && sigma_v > 0.0 && sigma_v < 1.0; }
  // Stationary mean/variance of the log-volatility state.
  double h_mean() const { return omega / (1.0 - rho); }
  double h_var() const { return sigma_v * sigma_v / (1.0 - rho * rho); }
  // Stationary Var(y_t) = E exp(h_t).
  double stationary_return_variance() const;
};

// Alpha-stable stochastic volatility:
//   r_t = sigma_t w_t,  ln sigma_t^2 = theta1 + theta2 ln sigma_{t-1}^2 + theta3 v_t,
//   w_t ~ S(theta4, theta5, 0, 1).
struct AlphaSvParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  double theta4 = 2.0;  // tail index in (1,2]
  double theta5 = 0.0;  // skewness in [-1,1]
  bool valid() const {
    return theta4 > 1.0 && theta4 <= 2.0 && theta5 >= -1.0 && theta5 <= 1.0 &&
           theta2 > -1.0 && theta2 < 1.0 && theta3 >= 0.0;
  }
};

// Two-component normal location mixture (2/3) N(theta,1) + (1/3) N(theta,sigma^2).
struct MixtureParams {
  double theta = 0.0;
  double sigma = 1.0;  // > 0
};

Series simulate_normal(double theta, std::size_t n, RngStream& s);
Series simulate_mixture(const MixtureParams& p, std::size_t n, RngStream& s);
// MA(q) with N(0,1) innovations and an exact stationary start (q presample draws).
Series simulate_ma(const MaParams& p, std::size_t n, RngStream& s);
// SV with h_0 drawn from the stationary law.
Series simulate_sv(const SvParams& p, std::size_t n, RngStream& s);
// Alpha-stable SV with log-variance started at its stationary mean.
Series simulate_alpha_sv(const AlphaSvParams& p, std::size_t n, RngStream& s);

}  // namespace rabc
