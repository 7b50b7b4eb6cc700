#pragma once

#include <vector>

#include "rabc/engine.hpp"

namespace rabc {

// Epanechnikov kernel K_eps(t) = (3/4) eps^{-1} (1 - (t/eps)^2) for t <= eps,
// zero beyond. The constant cancels in weighted least squares.
double epanechnikov(double t, double eps);

enum class KernelKind { Uniform, Epanechnikov };

struct WlsResult {
  std::vector<double> mu;    // d_y intercepts
  std::vector<double> beta;  // d_x x d_y, column-major in y: beta[j*d_y + k]
  bool degenerate = false;
};

// Weighted least squares of each y column on X with intercept. Degenerate
// (singular weighted regressor covariance) fits are flagged, not thrown.
WlsResult wls_fit(const std::vector<std::vector<double>>& X,
                  const std::vector<std::vector<double>>& Y, const std::vector<double>& w);

struct RegressionFit {
  std::vector<double> mu;
  std::vector<double> beta;  // d_eta x d_theta
  KernelKind kernel = KernelKind::Uniform;
  double epsilon = 0.0;
  std::vector<double> weights;
  bool degenerate = false;
};

// Local-linear fit of theta on the method's regressor:
//   ABC:      eta(z)            R-ABC-S: phi(z,Gamma)      R-ABC-W: varphi(z,zeta)
RegressionFit fit_adjustment(const AcceptedSample& s, const SummaryVector& eta_y,
                             KernelKind kernel);

// theta~_i = theta_i + beta' (x_obs - x_i) where x_obs is eta(y) for ABC and
// R-ABC-S and the zero vector for R-ABC-W (varphi vanishes at z = y).
// A degenerate fit passes the raw draws through.
std::vector<std::vector<double>> apply_adjustment(const AcceptedSample& s,
                                                  const RegressionFit& fit,
                                                  const SummaryVector& eta_y);

// Convenience: fit + apply + posterior_stats on the adjusted draws.
PosteriorStats adjusted_posterior_stats(const AcceptedSample& s, const SummaryVector& eta_y,
                                        KernelKind kernel, bool* degenerate = nullptr);

}  // namespace rabc
