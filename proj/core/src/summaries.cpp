#include "rabc/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rabc/stats.hpp"

namespace rabc {

void SummaryVector::validate() const {
  if (values.empty()) throw std::invalid_argument("SummaryVector: empty");
  if (labels.size() != values.size()) throw std::invalid_argument("SummaryVector: label/value size mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("SummaryVector: non-finite entry");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw std::invalid_argument("SummaryVector: duplicate labels");
}

SummaryVector mean_var(const Series& y) {
  if (y.size() < 2) throw std::domain_error("mean_var: need n >= 2");
  const double m = mean_of(y);
  double ss = 0.0;
  for (double v : y) ss += (v - m) * (v - m);
  return {{m, ss / static_cast<double>(y.size() - 1)}, {"mean", "var"}};
}

SummaryVector autocov(const Series& z, std::size_t maxlag) {
  const std::size_t T = z.size();
  if (T <= maxlag) throw std::domain_error("autocov: need T > maxlag");
  SummaryVector out;
  out.values.resize(maxlag + 1);
  out.labels.resize(maxlag + 1);
  for (std::size_t j = 0; j <= maxlag; ++j) {
    double s = 0.0;
    for (std::size_t t = j; t < T; ++t) s += z[t] * z[t - j];
    out.values[j] = s / static_cast<double>(T);
    out.labels[j] = "acov" + std::to_string(j);
  }
  return out;
}

bool garch_beta_admissible(const std::array<double, 4>& beta) {
  return beta[0] > 0.0 && beta[1] >= 0.0 && beta[2] >= 0.0 && beta[3] > 2.0;
}

double garch_t_loglik(const Series& r, const std::array<double, 4>& beta) {
  const std::size_t n = r.size();
  if (n < 2) throw std::domain_error("garch_t_loglik: need n >= 2");
  const double nu = beta[3];
  if (!(nu > 2.0)) throw std::domain_error("garch_t_loglik: dof must be > 2");

  // Standardized-t log density constant.
  const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                   0.5 * std::log(std::numbers::pi * (nu - 2.0));

  double x = std::sqrt(variance_of(r));
  if (!(x > 0.0)) throw std::domain_error("garch_t_loglik: zero-variance series");

  double ll = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double eps = r[t] / x;
    ll += c - 0.5 * (nu + 1.0) * std::log1p(eps * eps / (nu - 2.0)) - std::log(x);
    x = beta[0] + beta[1] * x * std::abs(eps) + beta[2] * x;
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::domain_error("garch_t_loglik: volatility recursion left the positive domain");
  }
  if (!std::isfinite(ll)) throw std::domain_error("garch_t_loglik: non-finite log-likelihood");
  return ll;
}

std::array<double, 4> default_garch_init(const Series& r) {
  const double sd = std::sqrt(variance_of(r));
  return {0.05 * sd, 0.10, 0.80, 6.0};
}

namespace {

// Unconstrained reparametrization: b1, b2, b3 through exp, dof offset by 2.
std::array<double, 4> to_beta(const std::array<double, 4>& u) {
  return {std::exp(u[0]), std::exp(u[1]), std::exp(u[2]), 2.0 + std::exp(u[3])};
}
std::array<double, 4> to_u(const std::array<double, 4>& beta) {
  return {std::log(beta[0]), std::log(std::max(beta[1], 1e-8)),
          std::log(std::max(beta[2], 1e-8)), std::log(std::max(beta[3] - 2.0, 1e-8))};
}

double neg_loglik_u(const Series& r, const std::array<double, 4>& u) {
  const auto beta = to_beta(u);
  if (beta[3] > 500.0) return std::numeric_limits<double>::infinity();
  try {
    return -garch_t_loglik(r, beta);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct SimplexResult {
  std::array<double, 4> x;
  double f;
};

// Nelder-Mead on 4 parameters.
SimplexResult nelder_mead(const Series& r, const std::array<double, 4>& start, double step,
                          int max_iter, double ftol) {
  constexpr int n = 4;
  std::array<std::array<double, 4>, n + 1> pts;
  std::array<double, n + 1> fv;
  pts[0] = start;
  fv[0] = neg_loglik_u(r, start);
  for (int i = 0; i < n; ++i) {
    pts[i + 1] = start;
    pts[i + 1][i] += step;
    fv[i + 1] = neg_loglik_u(r, pts[i + 1]);
  }

  auto order = [&] {
    std::array<int, n + 1> idx;
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::array<std::array<double, 4>, n + 1> p2;
    std::array<double, n + 1> f2;
    for (int i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      f2[i] = fv[idx[i]];
    }
    pts = p2;
    fv = f2;
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::isfinite(fv[n]) && fv[n] - fv[0] < ftol * (1.0 + std::abs(fv[0]))) break;

    std::array<double, 4> centroid{};
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < 4; ++d) centroid[d] += pts[i][d] / n;

    auto point_at = [&](double coef) {
      std::array<double, 4> p;
      for (int d = 0; d < 4; ++d) p[d] = centroid[d] + coef * (pts[n][d] - centroid[d]);
      return p;
    };

    const auto xr = point_at(-1.0);
    const double fr = neg_loglik_u(r, xr);
    if (fr < fv[0]) {
      const auto xe = point_at(-2.0);
      const double fe = neg_loglik_u(r, xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      const auto xc = point_at(fr < fv[n] ? -0.5 : 0.5);
      const double fc = neg_loglik_u(r, xc);
      if (fc < std::min(fr, fv[n])) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        // shrink toward the best point
        for (int i = 1; i <= n; ++i) {
          for (int d = 0; d < 4; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
          fv[i] = neg_loglik_u(r, pts[i]);
        }
      }
    }
  }
  order();
  return {pts[0], fv[0]};
}

double score_norm(const Series& r, const std::array<double, 4>& beta) {
  try {
    const auto g = aux_score(r, beta);
    double s = 0.0;
    for (double v : g.values) s += v * v;
    return std::sqrt(s);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

AuxGarchFit fit_aux_garch(const Series& r, const std::array<double, 4>& init,
                          const GarchFitOptions& opts) {
  if (r.size() < 50) throw std::domain_error("fit_aux_garch: need n >= 50");
  if (!garch_beta_admissible(init)) throw std::domain_error("fit_aux_garch: inadmissible init");

  auto best = nelder_mead(r, to_u(init), 0.4, opts.max_iterations, opts.simplex_tol);
  // Fixed restart step schedule keeps the fit deterministic; the alternating
  // large steps re-open the simplex when it collapses on a ridge.
  const double steps[] = {0.25, 0.1, 0.05, 0.5, 0.02, 0.2, 0.01, 0.1};
  int restart = 0;
  while (restart < opts.max_restarts &&
         score_norm(r, to_beta(best.x)) > opts.score_tol) {
    const double step = steps[restart % std::size(steps)];
    auto next = nelder_mead(r, best.x, step, opts.max_iterations, opts.simplex_tol);
    if (next.f < best.f) best = next;
    ++restart;
  }

  AuxGarchFit fit;
  fit.beta = to_beta(best.x);
  fit.loglik = -best.f;
  fit.converged = score_norm(r, fit.beta) <= opts.score_tol;
  return fit;
}

SummaryVector aux_score_with_step(const Series& z, const std::array<double, 4>& beta_hat,
                                  double rel_step) {
  if (!garch_beta_admissible(beta_hat)) throw std::domain_error("aux_score: beta_hat not admissible");
  const double n = static_cast<double>(z.size());
  SummaryVector out;
  out.values.resize(4);
  out.labels = {"score_b1", "score_b2", "score_b3", "score_b4"};
  for (int j = 0; j < 4; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(beta_hat[j]));
    auto up = beta_hat, dn = beta_hat;
    up[j] += h;
    dn[j] -= h;
    out.values[j] = (garch_t_loglik(z, up) - garch_t_loglik(z, dn)) / (2.0 * h * n);
  }
  return out;
}

SummaryVector aux_score(const Series& z, const std::array<double, 4>& beta_hat) {
  return aux_score_with_step(z, beta_hat, 1e-5);
}

}  // namespace rabc
