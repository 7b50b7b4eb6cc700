#include "rabc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rabc/stats.hpp"

namespace rabc {

CompatReport gamma_compat(const AcceptedSample& s, double threshold) {
  if (!s.gamma_prior.robust() || s.method == Method::Abc)
    throw std::invalid_argument("gamma_compat: requires a robust sample");
  if (s.draws.size() < 100)
    throw std::invalid_argument("gamma_compat: need >= 100 accepted draws");

  const std::size_t d = s.draws.front().gamma.size();
  CompatReport report;
  report.threshold = threshold;
  report.entries.reserve(d);
  std::vector<double> col(s.draws.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < s.draws.size(); ++i) col[i] = s.draws[i].gamma[j];
    CompatEntry e;
    e.gamma_label = "gamma(" + (j < s.eta_y.labels.size() ? s.eta_y.labels[j] : std::to_string(j)) + ")";
    e.prior_stat = s.gamma_prior.mean();
    e.posterior_stat = mean_of(col);
    e.divergence = ks_statistic(col, [&](double x) { return s.gamma_prior.cdf(x); });
    e.flagged = e.divergence > threshold;
    report.entries.push_back(std::move(e));
  }
  return report;
}

AcceptanceCurve acceptance_curve(std::vector<double> all_distances, std::size_t grid) {
  if (all_distances.size() < 1000)
    throw std::invalid_argument("acceptance_curve: need >= 1000 distances");
  if (grid < 2) throw std::invalid_argument("acceptance_curve: grid must be >= 2");

  // Failed draws carry infinite distance; the curve is over realized ones.
  std::erase_if(all_distances, [](double v) { return !std::isfinite(v); });
  if (all_distances.size() < 1000)
    throw std::invalid_argument("acceptance_curve: need >= 1000 finite distances");
  std::sort(all_distances.begin(), all_distances.end());

  const double lo = all_distances.front();
  const double hi = all_distances.back();
  const double range = hi > lo ? hi - lo : 1.0;

  AcceptanceCurve curve;
  curve.points.reserve(grid + 1);
  for (std::size_t k = 0; k <= grid; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(grid);
    const double tol = quantile_sorted(all_distances, p);
    const double tol_norm = (tol - lo) / range;
    curve.points.emplace_back(tol_norm, p);
    curve.max_deviation = std::max(curve.max_deviation, std::abs(tol_norm - p));
  }
  return curve;
}

}  // namespace rabc
