#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rabc/diagnostics.hpp"
#include "rabc/engine.hpp"
#include "rabc/postprocess.hpp"

namespace rabc {

// The six procedure variants: accept/reject and regression-adjusted versions
// of plain ABC and the two robust adjustments.
enum class MethodVariant { Abc, AbcReg, RabcS, RabcSReg, RabcW, RabcWReg };

std::string variant_name(MethodVariant v);
std::optional<MethodVariant> variant_from_name(const std::string& name);
Method variant_base(MethodVariant v);
bool variant_adjusted(MethodVariant v);

struct ExperimentConfig {
  enum class Kind { Sweep, Mc, AlphaSv };
  Kind kind = Kind::Sweep;

  std::string assumed_model = "normal";  // normal | ma2 | alpha_sv
  std::string summary_id = "mean_var";   // mean_var | autocov2 | aux_score
  std::string true_model = "mixture";    // normal | mixture | sv | alpha_sv
  std::vector<double> true_params;       // see the config format notes

  std::vector<MethodVariant> methods;
  std::size_t n_obs = 100;
  std::size_t n_draws = 100000;
  double accept_quantile = 0.005;

  std::vector<MarginalPrior> theta_prior;
  PriorSpec::Constraint theta_constraint = PriorSpec::Constraint::None;
  GammaPrior gamma_s;  // Kind::None lets defaults apply when a robust variant runs
  GammaPrior gamma_w;
  std::vector<double> fixed_weights;  // ABC / R-ABC-S distance weights; empty = euclidean
  std::vector<double> weight_base;    // D diagonal for R-ABC-W; empty = identity
  // Weight the distance by inverse prior-predictive standard deviations of
  // the adjusted summaries, estimated from the simulation bank. Keeps any
  // one summary from dominating the accept step when scales differ.
  bool auto_scale_weights = false;
  KernelKind kernel = KernelKind::Uniform;
  double compat_threshold = 0.40;  // KS flag level for the gamma diagnostic

  std::uint64_t root_seed = 1;
  int threads = 0;

  std::vector<double> sweep_grid;  // sigma grid (sweep, or per-cell mc studies)
  std::size_t replications = 0;
  std::vector<double> pseudo_true;
  bool fresh_bank = true;

  std::size_t density_points = 0;  // 0 disables density-grid output
  std::string returns_csv;         // alpha-sv study input (optional)

  PriorSpec prior_for(Method m) const;
  DistanceSpec distance_for(Method m) const;
  GammaPrior gamma_for(Method m) const;
};

struct DensityGrid {
  std::string param;
  std::vector<double> x;
  std::vector<double> density;
};

// Gaussian KDE with Silverman bandwidth on an even grid.
DensityGrid kde_grid(const std::vector<double>& draws, std::size_t points,
                     const std::string& label);

struct MethodResult {
  MethodVariant variant{};
  PosteriorStats stats;
  double epsilon = 0.0;
  std::size_t n_accepted = 0;
  bool degenerate_fit = false;  // adjusted variants only
};

struct SweepCell {
  double grid_value = 0.0;
  std::vector<MethodResult> methods;
  std::vector<CompatReport> compat;          // one per robust base method present
  std::vector<std::string> compat_methods;   // parallel to `compat`
  std::vector<DensityGrid> densities;        // labeled "<method>/<param>"
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::size_t n_draws = 0;
  std::size_t bank_failures = 0;
};

// Sigma sweep with common random numbers: one observed-data stream and one
// simulation bank shared by every grid value.
SweepResult run_sweep(const ExperimentConfig& cfg);

struct McRecord {
  std::size_t replication = 0;
  MethodVariant variant{};
  std::vector<double> post_mean, post_sd, lo, hi;
  bool failed = false;
};

struct McMethodSummary {
  MethodVariant variant{};
  std::vector<double> coverage;  // per parameter
  std::vector<double> bias;      // mean(post_mean - pseudo_true)
  std::vector<double> std_;      // mean posterior sd
  std::size_t failures = 0;
  bool unreliable = false;
};

struct McCell {
  double grid_value = 0.0;
  std::vector<McMethodSummary> methods;
  std::vector<McRecord> records;
};

struct McReport {
  std::vector<McCell> cells;
  std::size_t replications = 0;
};

// Repeated-sampling study: fresh observed data per replication, fresh or
// shared simulation bank per the config.
McReport run_mc(const ExperimentConfig& cfg);

struct AlphaSvReport {
  AuxGarchFit aux_fit;
  SummaryVector eta_y;
  MethodResult raw;
  MethodResult adjusted;
  CompatReport compat;
  AcceptanceCurve curve;
  AcceptedSample sample;
  std::vector<double> distance_sketch;  // quantile sketch of all simulated distances
  std::vector<DensityGrid> densities;
};

// Alpha-stable SV study with auxiliary GARCH score summaries (R-ABC-S).
// `returns` are standardized internally (idempotent).
AlphaSvReport run_alpha_sv(const ExperimentConfig& cfg, const Series& returns);

// Divide by the full-sample standard deviation, then subtract the mean.
// Throws on zero-variance input.
Series standardize_returns(const Series& r);

// Inverse prior-predictive standard deviations of the bank's summaries
// (adjusted summaries eta + Gamma_S when `adjusted`); used as fixed distance
// weights.
std::vector<double> prior_predictive_weights(const SimulationBank& bank, bool adjusted);

// Observed-data generator shared by sweep and MC studies; `grid_value`
// overrides the scale parameter for normal/mixture true models.
Series simulate_true_dgp(const std::string& true_model, const std::vector<double>& params,
                         std::optional<double> grid_value, std::size_t n, RngStream& s);

// Assumed-model simulator and summary map factories.
Simulator make_simulator(const std::string& assumed_model, std::size_t n_obs);
SummaryMap make_summary_map(const std::string& summary_id);
std::size_t summary_dim(const std::string& summary_id);
std::size_t model_dim(const std::string& assumed_model);

}  // namespace rabc
