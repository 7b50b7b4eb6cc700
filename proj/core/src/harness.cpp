#include "rabc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rabc/stats.hpp"

namespace rabc {

std::string variant_name(MethodVariant v) {
  switch (v) {
    case MethodVariant::Abc: return "abc";
    case MethodVariant::AbcReg: return "abc-reg";
    case MethodVariant::RabcS: return "rabc-s";
    case MethodVariant::RabcSReg: return "rabc-s-reg";
    case MethodVariant::RabcW: return "rabc-w";
    case MethodVariant::RabcWReg: return "rabc-w-reg";
  }
  return "?";
}

std::optional<MethodVariant> variant_from_name(const std::string& name) {
  for (MethodVariant v : {MethodVariant::Abc, MethodVariant::AbcReg, MethodVariant::RabcS,
                          MethodVariant::RabcSReg, MethodVariant::RabcW, MethodVariant::RabcWReg})
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

Method variant_base(MethodVariant v) {
  switch (v) {
    case MethodVariant::Abc:
    case MethodVariant::AbcReg: return Method::Abc;
    case MethodVariant::RabcS:
    case MethodVariant::RabcSReg: return Method::RabcS;
    case MethodVariant::RabcW:
    case MethodVariant::RabcWReg: return Method::RabcW;
  }
  return Method::Abc;
}

bool variant_adjusted(MethodVariant v) {
  return v == MethodVariant::AbcReg || v == MethodVariant::RabcSReg ||
         v == MethodVariant::RabcWReg;
}

GammaPrior ExperimentConfig::gamma_for(Method m) const {
  if (m == Method::Abc) return {};
  if (m == Method::RabcS) return gamma_s.robust() ? gamma_s : default_gamma_prior(m);
  return gamma_w.robust() ? gamma_w : default_gamma_prior(m);
}

PriorSpec ExperimentConfig::prior_for(Method m) const {
  PriorSpec p;
  p.theta = theta_prior;
  p.constraint = theta_constraint;
  p.gamma = gamma_for(m);
  return p;
}

DistanceSpec ExperimentConfig::distance_for(Method m) const {
  if (m == Method::RabcW) return DistanceSpec::gamma_weighted(weight_base);
  if (!fixed_weights.empty()) return DistanceSpec::fixed_weighted(fixed_weights);
  return DistanceSpec::euclidean();
}

DensityGrid kde_grid(const std::vector<double>& draws, std::size_t points,
                     const std::string& label) {
  if (draws.size() < 2 || points < 2) throw std::invalid_argument("kde_grid: too little data");
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(variance_of(sorted));
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, 1e-9);
  const double bw =
      std::max(0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2), 1e-9);

  DensityGrid grid;
  grid.param = label;
  grid.x.resize(points);
  grid.density.assign(points, 0.0);
  const double lo = sorted.front() - 3.0 * bw;
  const double hi = sorted.back() + 3.0 * bw;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  const double norm = 1.0 / (static_cast<double>(sorted.size()) * bw * std::numbers::sqrt2 *
                             std::sqrt(std::numbers::pi));
  for (std::size_t k = 0; k < points; ++k) {
    const double x = lo + step * static_cast<double>(k);
    double acc = 0.0;
    for (double v : sorted) {
      const double z = (x - v) / bw;
      acc += std::exp(-0.5 * z * z);
    }
    grid.x[k] = x;
    grid.density[k] = acc * norm;
  }
  return grid;
}

Series simulate_true_dgp(const std::string& true_model, const std::vector<double>& params,
                         std::optional<double> grid_value, std::size_t n, RngStream& s) {
  if (true_model == "normal") {
    if (params.empty()) throw std::invalid_argument("true_model normal: params {theta[, sigma]}");
    const double theta = params[0];
    const double sigma = grid_value ? *grid_value : (params.size() > 1 ? params[1] : 1.0);
    if (!(sigma > 0.0)) throw std::invalid_argument("true_model normal: sigma must be > 0");
    Series y(n);
    for (auto& v : y) v = theta + sigma * sample_normal(s, 0.0, 1.0);
    return y;
  }
  if (true_model == "mixture") {
    if (params.empty()) throw std::invalid_argument("true_model mixture: params {theta[, sigma]}");
    MixtureParams p;
    p.theta = params[0];
    p.sigma = grid_value ? *grid_value : (params.size() > 1 ? params[1] : 1.0);
    return simulate_mixture(p, n, s);
  }
  if (true_model == "sv") {
    if (params.size() != 3) throw std::invalid_argument("true_model sv: params {omega, rho, sigma_v}");
    return simulate_sv({params[0], params[1], params[2]}, n, s);
  }
  if (true_model == "alpha_sv") {
    if (params.size() != 5)
      throw std::invalid_argument("true_model alpha_sv: params {theta1..theta5}");
    return simulate_alpha_sv({params[0], params[1], params[2], params[3], params[4]}, n, s);
  }
  throw std::invalid_argument("unknown true model: " + true_model);
}

Simulator make_simulator(const std::string& assumed_model, std::size_t n_obs) {
  if (assumed_model == "normal")
    return [n_obs](std::span<const double> th, RngStream& s) {
      return simulate_normal(th[0], n_obs, s);
    };
  if (assumed_model == "ma2")
    return [n_obs](std::span<const double> th, RngStream& s) {
      return simulate_ma({{th[0], th[1]}}, n_obs, s);
    };
  if (assumed_model == "alpha_sv")
    return [n_obs](std::span<const double> th, RngStream& s) {
      return simulate_alpha_sv({0.0, th[0], th[1], th[2], 0.0}, n_obs, s);
    };
  throw std::invalid_argument("unknown assumed model: " + assumed_model);
}

SummaryMap make_summary_map(const std::string& summary_id) {
  if (summary_id == "mean_var") return [](const Series& z) { return mean_var(z); };
  if (summary_id == "autocov2") return [](const Series& z) { return autocov(z, 2); };
  throw std::invalid_argument("unknown summary: " + summary_id);
}

std::size_t summary_dim(const std::string& summary_id) {
  if (summary_id == "mean_var") return 2;
  if (summary_id == "autocov2") return 3;
  if (summary_id == "aux_score") return 4;
  throw std::invalid_argument("unknown summary: " + summary_id);
}

std::size_t model_dim(const std::string& assumed_model) {
  if (assumed_model == "normal") return 1;
  if (assumed_model == "ma2") return 2;
  if (assumed_model == "alpha_sv") return 3;
  throw std::invalid_argument("unknown assumed model: " + assumed_model);
}

namespace {

bool wants_base(const ExperimentConfig& cfg, Method m) {
  for (MethodVariant v : cfg.methods)
    if (variant_base(v) == m) return true;
  return false;
}

SimulationBank build_shared_bank(const ExperimentConfig& cfg, const Simulator& sim,
                                 const SummaryMap& summary, std::uint64_t bank_seed) {
  BankRequest req;
  req.n_draws = cfg.n_draws;
  req.d_eta = summary_dim(cfg.summary_id);
  req.seed = bank_seed;
  req.threads = cfg.threads;
  if (wants_base(cfg, Method::RabcS)) req.gamma_s = cfg.gamma_for(Method::RabcS);
  if (wants_base(cfg, Method::RabcW)) req.gamma_w = cfg.gamma_for(Method::RabcW);
  return build_bank(sim, summary, cfg.prior_for(Method::Abc), req);
}

MethodResult evaluate_variant(const ExperimentConfig& cfg, const SimulationBank& bank,
                              const SummaryVector& eta_y, MethodVariant v,
                              AcceptedSample* keep_sample = nullptr) {
  const Method base = variant_base(v);
  SelectSpec sel{base, cfg.distance_for(base), cfg.accept_quantile, cfg.gamma_for(base)};
  AcceptedSample sample = select_accepted(bank, eta_y, sel);
  MethodResult res;
  res.variant = v;
  res.epsilon = sample.epsilon;
  res.n_accepted = sample.draws.size();
  if (variant_adjusted(v)) {
    res.stats = adjusted_posterior_stats(sample, eta_y, cfg.kernel, &res.degenerate_fit);
  } else {
    res.stats = posterior_stats_theta(sample);
  }
  if (keep_sample) *keep_sample = std::move(sample);
  return res;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw std::invalid_argument("run_sweep: no methods requested");

  const Simulator sim = make_simulator(cfg.assumed_model, cfg.n_obs);
  const SummaryMap summary = make_summary_map(cfg.summary_id);
  const SimulationBank bank =
      build_shared_bank(cfg, sim, summary, derive_seed(cfg.root_seed, seed_tag::kBank));
  const std::uint64_t obs_seed = derive_seed(cfg.root_seed, seed_tag::kObserved);

  // An empty grid runs a single cell at the configured true parameters.
  std::vector<std::optional<double>> grid;
  if (cfg.sweep_grid.empty())
    grid.push_back(std::nullopt);
  else
    for (double g : cfg.sweep_grid) grid.push_back(g);

  SweepResult result;
  result.n_draws = cfg.n_draws;
  result.bank_failures = bank.n_failed;
  for (const auto& g : grid) {
    // The observed-data stream is identical across grid values; only the
    // scale parameter changes.
    RngStream obs(obs_seed, 0);
    const Series y = simulate_true_dgp(cfg.true_model, cfg.true_params, g, cfg.n_obs, obs);
    const SummaryVector eta_y = summary(y);

    SweepCell cell;
    cell.grid_value = g ? *g : 0.0;
    for (MethodVariant v : cfg.methods) {
      const Method base = variant_base(v);
      SelectSpec sel{base, cfg.distance_for(base), cfg.accept_quantile, cfg.gamma_for(base)};
      const AcceptedSample sample = select_accepted(bank, eta_y, sel);

      MethodResult res;
      res.variant = v;
      res.epsilon = sample.epsilon;
      res.n_accepted = sample.draws.size();
      std::vector<std::vector<double>> theta_draws;
      if (variant_adjusted(v)) {
        const RegressionFit fit = fit_adjustment(sample, eta_y, cfg.kernel);
        res.degenerate_fit = fit.degenerate;
        theta_draws = apply_adjustment(sample, fit, eta_y);
      } else {
        theta_draws.reserve(sample.draws.size());
        for (const auto& d : sample.draws) theta_draws.push_back(d.theta);
      }
      res.stats = posterior_stats(theta_draws);

      const bool robust_raw = !variant_adjusted(v) && base != Method::Abc;
      if (robust_raw && sample.draws.size() >= 100) {
        cell.compat.push_back(gamma_compat(sample, cfg.compat_threshold));
        cell.compat_methods.push_back(variant_name(v));
      }
      if (cfg.density_points >= 2) {
        const auto add_density = [&](const std::vector<std::vector<double>>& draws,
                                     const std::string& prefix) {
          if (draws.size() < 2) return;
          const std::size_t p = draws.front().size();
          std::vector<double> col(draws.size());
          for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < draws.size(); ++i) col[i] = draws[i][j];
            cell.densities.push_back(
                kde_grid(col, cfg.density_points,
                         variant_name(v) + "/" + prefix + std::to_string(j + 1)));
          }
        };
        add_density(theta_draws, "theta");
        if (robust_raw) {
          std::vector<std::vector<double>> ga;
          ga.reserve(sample.draws.size());
          for (const auto& d : sample.draws) ga.push_back(d.gamma);
          add_density(ga, "gamma");
        }
      }
      cell.methods.push_back(std::move(res));
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

McReport run_mc(const ExperimentConfig& cfg) {
  if (cfg.replications == 0) throw std::invalid_argument("run_mc: replications must be >= 1");
  if (cfg.pseudo_true.empty()) throw std::invalid_argument("run_mc: pseudo_true required");
  if (cfg.methods.empty()) throw std::invalid_argument("run_mc: no methods requested");

  const Simulator sim = make_simulator(cfg.assumed_model, cfg.n_obs);
  const SummaryMap summary = make_summary_map(cfg.summary_id);
  const std::size_t d_theta = model_dim(cfg.assumed_model);
  if (cfg.pseudo_true.size() != d_theta)
    throw std::invalid_argument("run_mc: pseudo_true dimension mismatch");

  // An empty grid means a single cell at the configured true parameters.
  std::vector<std::optional<double>> grid;
  if (cfg.sweep_grid.empty())
    grid.push_back(std::nullopt);
  else
    for (double g : cfg.sweep_grid) grid.push_back(g);

  McReport report;
  report.replications = cfg.replications;

  SimulationBank shared;
  if (!cfg.fresh_bank)
    shared = build_shared_bank(cfg, sim, summary, derive_seed(cfg.root_seed, seed_tag::kBank));

  for (const auto& g : grid) {
    McCell cell;
    cell.grid_value = g ? *g : 0.0;
    std::vector<McMethodSummary> summaries;
    for (MethodVariant v : cfg.methods) {
      McMethodSummary ms;
      ms.variant = v;
      ms.coverage.assign(d_theta, 0.0);
      ms.bias.assign(d_theta, 0.0);
      ms.std_.assign(d_theta, 0.0);
      summaries.push_back(std::move(ms));
    }

    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const std::uint64_t rep_seed = derive_seed(cfg.root_seed, seed_tag::kReplication, rep);
      RngStream obs(derive_seed(rep_seed, seed_tag::kObserved), 0);
      const Series y = simulate_true_dgp(cfg.true_model, cfg.true_params, g, cfg.n_obs, obs);
      const SummaryVector eta_y = summary(y);

      const SimulationBank* bank = &shared;
      SimulationBank fresh;
      if (cfg.fresh_bank) {
        fresh = build_shared_bank(cfg, sim, summary, derive_seed(rep_seed, seed_tag::kBank));
        bank = &fresh;
      }

      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        McRecord rec;
        rec.replication = rep;
        rec.variant = cfg.methods[mi];
        try {
          const MethodResult res = evaluate_variant(cfg, *bank, eta_y, cfg.methods[mi]);
          if (res.degenerate_fit) throw std::runtime_error("degenerate regression fit");
          rec.post_mean = res.stats.mean;
          rec.post_sd = res.stats.sd;
          rec.lo = res.stats.lo;
          rec.hi = res.stats.hi;
        } catch (const std::exception&) {
          rec.failed = true;
          ++summaries[mi].failures;
        }
        cell.records.push_back(std::move(rec));
      }
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      auto& ms = summaries[mi];
      std::size_t n_ok = 0;
      for (const auto& rec : cell.records) {
        if (rec.variant != cfg.methods[mi] || rec.failed) continue;
        ++n_ok;
        for (std::size_t j = 0; j < d_theta; ++j) {
          if (rec.lo[j] <= cfg.pseudo_true[j] && cfg.pseudo_true[j] <= rec.hi[j])
            ms.coverage[j] += 1.0;
          ms.bias[j] += rec.post_mean[j] - cfg.pseudo_true[j];
          ms.std_[j] += rec.post_sd[j];
        }
      }
      if (n_ok > 0)
        for (std::size_t j = 0; j < d_theta; ++j) {
          ms.coverage[j] /= static_cast<double>(n_ok);
          ms.bias[j] /= static_cast<double>(n_ok);
          ms.std_[j] /= static_cast<double>(n_ok);
        }
      ms.unreliable =
          static_cast<double>(ms.failures) > 0.1 * static_cast<double>(cfg.replications);
    }
    cell.methods = std::move(summaries);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::vector<double> prior_predictive_weights(const SimulationBank& bank, bool adjusted) {
  std::vector<double> w(bank.d_eta, 1.0);
  std::vector<double> col;
  col.reserve(bank.n_draws);
  for (std::size_t j = 0; j < bank.d_eta; ++j) {
    col.clear();
    for (std::size_t i = 0; i < bank.n_draws; ++i) {
      if (!bank.ok[i]) continue;
      double v = bank.eta[i * bank.d_eta + j];
      if (adjusted && bank.has_gamma_s()) v += bank.gamma_s[i * bank.d_eta + j];
      col.push_back(v);
    }
    if (col.size() < 2) throw std::invalid_argument("prior_predictive_weights: too few draws");
    const double sd = std::sqrt(variance_of(col));
    w[j] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
  return w;
}

Series standardize_returns(const Series& r) {
  if (r.size() < 2) throw std::invalid_argument("standardize_returns: need n >= 2");
  const double sd = std::sqrt(variance_of(r));
  if (!(sd > 0.0)) throw std::invalid_argument("standardize_returns: zero variance");
  Series out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] / sd;
  const double m = mean_of(out);
  for (auto& v : out) v -= m;
  return out;
}

AlphaSvReport run_alpha_sv(const ExperimentConfig& cfg, const Series& returns) {
  if (cfg.theta_prior.size() != 3)
    throw std::invalid_argument("run_alpha_sv: needs a 3-component theta prior");

  AlphaSvReport report;
  const Series y = standardize_returns(returns);

  const AuxGarchFit fit = fit_aux_garch(y, default_garch_init(y));
  if (!fit.converged)
    throw std::runtime_error("run_alpha_sv: auxiliary GARCH fit did not converge (score norm above tolerance)");
  report.aux_fit = fit;

  const SummaryMap summary = [beta = fit.beta](const Series& z) { return aux_score(z, beta); };
  report.eta_y = summary(y);

  const Simulator sim = make_simulator("alpha_sv", y.size());
  const GammaPrior gs = cfg.gamma_for(Method::RabcS);

  BankRequest req;
  req.n_draws = cfg.n_draws;
  req.d_eta = 4;
  req.seed = derive_seed(cfg.root_seed, seed_tag::kBank);
  req.threads = cfg.threads;
  req.gamma_s = gs;
  const SimulationBank bank = build_bank(sim, summary, cfg.prior_for(Method::Abc), req);

  DistanceSpec dist = cfg.distance_for(Method::RabcS);
  if (cfg.auto_scale_weights && cfg.fixed_weights.empty())
    dist = DistanceSpec::fixed_weighted(prior_predictive_weights(bank, true));

  SelectSpec sel{Method::RabcS, dist, cfg.accept_quantile, gs};
  const std::vector<double> distances = bank_distances(bank, report.eta_y, sel);
  report.sample = select_accepted(bank, report.eta_y, sel);

  report.raw.variant = MethodVariant::RabcS;
  report.raw.stats = posterior_stats_theta(report.sample);
  report.raw.epsilon = report.sample.epsilon;
  report.raw.n_accepted = report.sample.draws.size();

  report.adjusted.variant = MethodVariant::RabcSReg;
  report.adjusted.stats =
      adjusted_posterior_stats(report.sample, report.eta_y, cfg.kernel,
                               &report.adjusted.degenerate_fit);
  report.adjusted.epsilon = report.sample.epsilon;
  report.adjusted.n_accepted = report.sample.draws.size();

  report.compat = gamma_compat(report.sample, cfg.compat_threshold);
  report.curve = acceptance_curve(distances, 200);

  // Quantile sketch of the full distance list for the sample archive.
  std::vector<double> finite;
  finite.reserve(distances.size());
  for (double d : distances)
    if (std::isfinite(d)) finite.push_back(d);
  std::sort(finite.begin(), finite.end());
  const std::size_t sketch_n = std::min<std::size_t>(finite.size(), 4096);
  report.distance_sketch.reserve(sketch_n);
  for (std::size_t k = 0; k < sketch_n; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(sketch_n - 1);
    report.distance_sketch.push_back(quantile_sorted(finite, p));
  }

  if (cfg.density_points >= 2) {
    std::vector<double> col(report.sample.draws.size());
    const char* theta_names[] = {"theta2", "theta3", "theta4"};
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < col.size(); ++i) col[i] = report.sample.draws[i].theta[j];
      report.densities.push_back(kde_grid(col, cfg.density_points,
                                          std::string("rabc-s/") + theta_names[j]));
    }
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t i = 0; i < col.size(); ++i) col[i] = report.sample.draws[i].gamma[j];
      report.densities.push_back(
          kde_grid(col, cfg.density_points, "rabc-s/gamma" + std::to_string(j + 1)));
    }
  }
  return report;
}

}  // namespace rabc
