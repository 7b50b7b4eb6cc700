#include "rabc/models.hpp"

#include <cmath>
#include <stdexcept>

namespace rabc {

bool MaParams::invertible() const {
  if (theta.size() != 2) return false;
  const double t1 = theta[0], t2 = theta[1];
  // theta2 < 1 closes the triangle; without it the region is open above
  // and a uniform prior over it would be improper.
  return t1 > -2.0 && t1 < 2.0 && t1 + t2 > -1.0 && t1 - t2 < 1.0 && t2 < 1.0;
}

double SvParams::stationary_return_variance() const {
  return std::exp(h_mean() + 0.5 * h_var());
}

Series simulate_normal(double theta, std::size_t n, RngStream& s) {
  if (n == 0) throw std::domain_error("simulate_normal: n must be >= 1");
  Series z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = theta + sample_normal(s, 0.0, 1.0);
  return z;
}

Series simulate_mixture(const MixtureParams& p, std::size_t n, RngStream& s) {
  if (n == 0) throw std::domain_error("simulate_mixture: n must be >= 1");
  if (!(p.sigma > 0.0)) throw std::domain_error("simulate_mixture: sigma must be > 0");
  Series y(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Per-observation component indicator; the normal draw is consumed either
    // way so a sigma sweep reuses identical randomness.
    const double u = s.next_uniform();
    const double z = sample_normal(s, 0.0, 1.0);
    y[i] = p.theta + (u < 2.0 / 3.0 ? z : p.sigma * z);
  }
  return y;
}

Series simulate_ma(const MaParams& p, std::size_t n, RngStream& s) {
  if (n == 0) throw std::domain_error("simulate_ma: n must be >= 1");
  const std::size_t q = p.theta.size();
  // q presample innovations give an exact stationary start.
  Series e(n + q);
  for (auto& v : e) v = sample_normal(s, 0.0, 1.0);
  Series z(n);
  for (std::size_t t = 0; t < n; ++t) {
    double v = e[t + q];
    for (std::size_t j = 0; j < q; ++j) v += p.theta[j] * e[t + q - 1 - j];
    z[t] = v;
  }
  return z;
}

Series simulate_sv(const SvParams& p, std::size_t n, RngStream& s) {
  if (n == 0) throw std::domain_error("simulate_sv: n must be >= 1");
  if (!p.valid()) throw std::domain_error("simulate_sv: requires 0<rho<1 and 0<sigma_v<1");
  double h = sample_normal(s, p.h_mean(), std::sqrt(p.h_var()));
  Series y(n);
  for (std::size_t t = 0; t < n; ++t) {
    h = p.omega + p.rho * h + p.sigma_v * sample_normal(s, 0.0, 1.0);
    y[t] = std::exp(0.5 * h) * sample_normal(s, 0.0, 1.0);
  }
  return y;
}

Series simulate_alpha_sv(const AlphaSvParams& p, std::size_t n, RngStream& s) {
  if (n == 0) throw std::domain_error("simulate_alpha_sv: n must be >= 1");
  if (!p.valid()) throw std::domain_error("simulate_alpha_sv: invalid parameters");
  double lv = p.theta1 / (1.0 - p.theta2);  // stationary mean of ln sigma^2
  Series r(n);
  for (std::size_t t = 0; t < n; ++t) {
    lv = p.theta1 + p.theta2 * lv + p.theta3 * sample_normal(s, 0.0, 1.0);
    r[t] = std::exp(0.5 * lv) * sample_alpha_stable(s, p.theta4, p.theta5, 0.0, 1.0);
  }
  return r;
}

}  // namespace rabc
