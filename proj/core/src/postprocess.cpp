#include "rabc/postprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace rabc {

double epanechnikov(double t, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("epanechnikov: eps must be > 0");
  if (t < 0.0) throw std::domain_error("epanechnikov: t must be >= 0");
  if (t > eps) return 0.0;
  const double r = t / eps;
  return 0.75 / eps * (1.0 - r * r);
}

namespace {

// Gaussian elimination with partial pivoting on [A | B]; A is k x k,
// B is k x m, both row-major. Returns false when A is singular.
bool solve_inplace(std::vector<double>& A, std::vector<double>& B, std::size_t k, std::size_t m) {
  double scale = 0.0;
  for (double v : A) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(A[r * k + col]) > std::abs(A[piv * k + col])) piv = r;
    if (std::abs(A[piv * k + col]) <= tol) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(A[piv * k + c], A[col * k + c]);
      for (std::size_t c = 0; c < m; ++c) std::swap(B[piv * m + c], B[col * m + c]);
    }
    const double inv = 1.0 / A[col * k + col];
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = A[r * k + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < k; ++c) A[r * k + c] -= f * A[col * k + c];
      for (std::size_t c = 0; c < m; ++c) B[r * m + c] -= f * B[col * m + c];
    }
  }
  for (std::size_t r = 0; r < k; ++r) {
    const double inv = 1.0 / A[r * k + r];
    for (std::size_t c = 0; c < m; ++c) B[r * m + c] *= inv;
  }
  return true;
}

}  // namespace

WlsResult wls_fit(const std::vector<std::vector<double>>& X,
                  const std::vector<std::vector<double>>& Y, const std::vector<double>& w) {
  const std::size_t n = X.size();
  if (n == 0 || Y.size() != n || w.size() != n) throw std::invalid_argument("wls_fit: size mismatch");
  const std::size_t dx = X.front().size();
  const std::size_t dy = Y.front().size();
  if (n < dx + 2) throw std::invalid_argument("wls_fit: need at least d_x + 2 rows");

  double wsum = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("wls_fit: negative weight");
    wsum += v;
  }
  WlsResult res;
  res.mu.assign(dy, 0.0);
  res.beta.assign(dx * dy, 0.0);
  if (!(wsum > 0.0)) {
    res.degenerate = true;
    return res;
  }

  std::vector<double> xbar(dx, 0.0), ybar(dy, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (X[i].size() != dx || Y[i].size() != dy)
      throw std::invalid_argument("wls_fit: ragged rows");
    for (std::size_t j = 0; j < dx; ++j) xbar[j] += w[i] * X[i][j];
    for (std::size_t k = 0; k < dy; ++k) ybar[k] += w[i] * Y[i][k];
  }
  for (auto& v : xbar) v /= wsum;
  for (auto& v : ybar) v /= wsum;

  // Weighted covariance of the regressors and cross-covariance with Y.
  std::vector<double> C(dx * dx, 0.0), B(dx * dy, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dx; ++j) {
      const double xc = X[i][j] - xbar[j];
      for (std::size_t l = 0; l < dx; ++l) C[j * dx + l] += w[i] * xc * (X[i][l] - xbar[l]);
      for (std::size_t k = 0; k < dy; ++k) B[j * dy + k] += w[i] * xc * (Y[i][k] - ybar[k]);
    }
  }

  if (!solve_inplace(C, B, dx, dy)) {
    res.degenerate = true;
    return res;
  }
  res.beta = B;
  for (std::size_t k = 0; k < dy; ++k) {
    double mu = ybar[k];
    for (std::size_t j = 0; j < dx; ++j) mu -= res.beta[j * dy + k] * xbar[j];
    res.mu[k] = mu;
  }
  return res;
}

namespace {

std::vector<double> regressor_row(const AcceptedSample& s, const SummaryVector& eta_y,
                                  const JointDraw& d) {
  switch (s.method) {
    case Method::Abc:
    case Method::RabcS:
      return d.sim_summary.values;  // eta(z) or phi(z,Gamma)
    case Method::RabcW: {
      std::vector<double> x(eta_y.size());
      for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = d.gamma[j] * (eta_y.values[j] - d.sim_summary.values[j]);
      return x;
    }
  }
  throw std::invalid_argument("regressor_row: unknown method");
}

std::vector<double> observed_regressor(const AcceptedSample& s, const SummaryVector& eta_y) {
  if (s.method == Method::RabcW) return std::vector<double>(eta_y.size(), 0.0);
  return eta_y.values;
}

}  // namespace

RegressionFit fit_adjustment(const AcceptedSample& s, const SummaryVector& eta_y,
                             KernelKind kernel) {
  const std::size_t n = s.draws.size();
  const std::size_t d = eta_y.size();
  if (n < d + 2) throw std::invalid_argument("fit_adjustment: need at least d_eta + 2 accepted draws");

  RegressionFit fit;
  fit.kernel = kernel;
  fit.epsilon = s.epsilon;
  fit.weights.resize(n);
  std::vector<std::vector<double>> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X[i] = regressor_row(s, eta_y, s.draws[i]);
    Y[i] = s.draws[i].theta;
    fit.weights[i] = kernel == KernelKind::Uniform
                         ? 1.0
                         : epanechnikov(s.draws[i].distance, s.epsilon);
  }
  const WlsResult w = wls_fit(X, Y, fit.weights);
  fit.mu = w.mu;
  fit.beta = w.beta;
  fit.degenerate = w.degenerate;
  return fit;
}

std::vector<std::vector<double>> apply_adjustment(const AcceptedSample& s,
                                                  const RegressionFit& fit,
                                                  const SummaryVector& eta_y) {
  std::vector<std::vector<double>> out;
  out.reserve(s.draws.size());
  if (fit.degenerate) {  // pass-through; callers surface the warning
    for (const auto& d : s.draws) out.push_back(d.theta);
    return out;
  }
  const std::vector<double> x_obs = observed_regressor(s, eta_y);
  const std::size_t dt = s.draws.empty() ? 0 : s.draws.front().theta.size();
  for (const auto& d : s.draws) {
    const std::vector<double> x = regressor_row(s, eta_y, d);
    std::vector<double> adj = d.theta;
    for (std::size_t k = 0; k < dt; ++k) {
      double shift = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j)
        shift += fit.beta[j * dt + k] * (x_obs[j] - x[j]);
      adj[k] += shift;
    }
    out.push_back(std::move(adj));
  }
  return out;
}

PosteriorStats adjusted_posterior_stats(const AcceptedSample& s, const SummaryVector& eta_y,
                                        KernelKind kernel, bool* degenerate) {
  const RegressionFit fit = fit_adjustment(s, eta_y, kernel);
  if (degenerate) *degenerate = fit.degenerate;
  return posterior_stats(apply_adjustment(s, fit, eta_y));
}

}  // namespace rabc
