#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rabc/robust.hpp"
#include "rabc/summaries.hpp"

namespace rabc {

// Fixed tags for deriving independent sub-stream families from one root seed.
namespace seed_tag {
constexpr std::uint64_t kObserved = 1;
constexpr std::uint64_t kBank = 2;
constexpr std::uint64_t kGammaS = 3;
constexpr std::uint64_t kGammaW = 4;
constexpr std::uint64_t kReplication = 5;
}  // namespace seed_tag

struct MarginalPrior {
  enum class Kind { Uniform, Normal, Fixed };
  Kind kind = Kind::Uniform;
  double a = 0.0;  // lower / mean / value
  double b = 0.0;  // upper / sd
  double sample(RngStream& s) const;
  std::string describe() const;
};

// Joint prior pi(zeta) = pi(theta) pi(Gamma). The optional constraint turns
// the product of box marginals into a joint rejection sampler (the MA(2)
// invertibility triangle is not a product set).
struct PriorSpec {
  enum class Constraint { None, Ma2Invertible };
  std::vector<MarginalPrior> theta;
  Constraint constraint = Constraint::None;
  GammaPrior gamma;

  std::size_t dim() const { return theta.size(); }
  void sample_theta(RngStream& s, std::span<double> out) const;
};

// Distance between observed and simulated summaries.
//   Euclidean:      ||diff||
//   FixedWeighted:  sqrt(sum_i (w_i diff_i)^2)
//   GammaWeighted:  sqrt(diff' D^{1/2} [I + diag(gamma^2)] D^{1/2} diff)
struct DistanceSpec {
  enum class Kind { Euclidean, FixedWeighted, GammaWeighted };
  Kind kind = Kind::Euclidean;
  std::vector<double> weights;  // w for FixedWeighted, D diagonal for GammaWeighted

  static DistanceSpec euclidean() { return {Kind::Euclidean, {}}; }
  static DistanceSpec fixed_weighted(std::vector<double> w) { return {Kind::FixedWeighted, std::move(w)}; }
  static DistanceSpec gamma_weighted(std::vector<double> d) { return {Kind::GammaWeighted, std::move(d)}; }
};

double distance(const SummaryVector& eta_y, const SummaryVector& eta_z,
                std::span<const double> gamma, const DistanceSpec& spec);

struct JointDraw {
  std::vector<double> theta;
  std::vector<double> gamma;        // empty for plain ABC
  SummaryVector sim_summary;        // phi(z,Gamma) for R-ABC-S, eta(z) otherwise
  double distance = 0.0;
  std::uint64_t stream_id = 0;
};

struct AcceptedSample {
  std::vector<JointDraw> draws;  // sorted by (distance, stream_id)
  double epsilon = 0.0;
  std::size_t n_total = 0;
  std::size_t n_failed = 0;
  Method method = Method::Abc;
  GammaPrior gamma_prior;
  SummaryVector eta_y;
};

// A simulator maps a parameter draw to a pseudo data set (n is baked in).
using Simulator = std::function<Series(std::span<const double>, RngStream&)>;
using SummaryMap = std::function<SummaryVector(const Series&)>;

// Prior-predictive simulations shared across methods and (in sweeps) across
// observed data sets. Row i is fully determined by (seed, i): parameter and
// pseudo-data variates come from stream (seed, i), gamma draws from the
// derived streams (seed_tag::kGammaS/W, i), so any subset of columns can be
// materialized without perturbing the others.
struct SimulationBank {
  std::size_t n_draws = 0;
  std::size_t d_theta = 0;
  std::size_t d_eta = 0;
  std::uint64_t seed = 0;
  std::vector<double> theta;    // n_draws x d_theta
  std::vector<double> eta;      // n_draws x d_eta (raw eta(z))
  std::vector<double> gamma_s;  // n_draws x d_eta when requested
  std::vector<double> gamma_w;  // n_draws x d_eta when requested
  std::vector<std::uint8_t> ok;
  std::size_t n_failed = 0;

  bool has_gamma_s() const { return !gamma_s.empty(); }
  bool has_gamma_w() const { return !gamma_w.empty(); }
};

struct BankRequest {
  std::size_t n_draws = 0;
  std::size_t d_eta = 0;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  GammaPrior gamma_s;  // Kind::None to skip the column
  GammaPrior gamma_w;
};

SimulationBank build_bank(const Simulator& model, const SummaryMap& summary,
                          const PriorSpec& prior, const BankRequest& req);

struct SelectSpec {
  Method method = Method::Abc;
  DistanceSpec distance;
  double accept_quantile = 0.0;  // in (0,1]
  GammaPrior gamma_prior;        // recorded in the sample for diagnostics
};

// Distances for every bank row under the given method (failures map to +inf).
std::vector<double> bank_distances(const SimulationBank& bank, const SummaryVector& eta_y,
                                   const SelectSpec& spec);

AcceptedSample select_accepted(const SimulationBank& bank, const SummaryVector& eta_y,
                               const SelectSpec& spec);

struct RejectionConfig {
  std::size_t n_draws = 0;
  double accept_quantile = 0.0;
  std::uint64_t root_seed = 0;
  int threads = 0;
  Method method = Method::Abc;
};

// Algorithm-1 rejection sampler: draw from the prior, simulate, accept the
// ceil(q N) smallest distances; epsilon is the realized q-quantile.
AcceptedSample run_rejection(const Simulator& model, const SummaryMap& summary,
                             const PriorSpec& prior, const DistanceSpec& dist,
                             const SummaryVector& eta_y, const RejectionConfig& cfg);

struct PosteriorStats {
  std::vector<double> mean, sd, lo, hi;  // per parameter; [lo, hi] is the equal-tailed 95% set
  std::size_t n_draws = 0;
};

// Componentwise moments and [2.5%, 97.5%] quantiles; requires >= 20 draws.
PosteriorStats posterior_stats(const std::vector<std::vector<double>>& draws);
PosteriorStats posterior_stats_theta(const AcceptedSample& s);

std::size_t default_thread_count();

}  // namespace rabc
