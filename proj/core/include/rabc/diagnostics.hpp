#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rabc/engine.hpp"

namespace rabc {

// Per-summary verdict on whether the adjustment-component posterior still
// resembles its prior. A posterior that has moved away from the prior marks
// a summary the assumed model cannot match.
struct CompatEntry {
  std::string gamma_label;
  double prior_stat = 0.0;      // prior mean of gamma_j
  double posterior_stat = 0.0;  // posterior mean of gamma_j
  double divergence = 0.0;      // KS distance posterior vs analytic prior CDF
  bool flagged = false;
};

struct CompatReport {
  std::vector<CompatEntry> entries;
  double threshold = 0.0;
};

// Calibrated so that matchable summaries stay unflagged under the mild
// posterior-vs-prior tilt every accept-step induces (KS up to ~0.26 for the
// weighted adjustment), while unmatchable ones land far above (KS >= 0.65
// across the bundled experiments).
constexpr double kDefaultCompatThreshold = 0.40;

// Requires a robust sample with >= 100 accepted draws.
CompatReport gamma_compat(const AcceptedSample& s, double threshold = kDefaultCompatThreshold);

// Tolerance vs acceptance-rate curve, both axes normalized to [0,1] through
// their empirical ranges. On the normalized square a well-specified model
// tracks the diagonal; misspecification bows the tolerance away from it.
struct AcceptanceCurve {
  std::vector<std::pair<double, double>> points;  // (tolerance, acceptance rate)
  double max_deviation = 0.0;                     // sup |tolerance - acceptance|
};

// Requires >= 1000 distances and a grid of >= 2 points.
AcceptanceCurve acceptance_curve(std::vector<double> all_distances, std::size_t grid);

}  // namespace rabc
