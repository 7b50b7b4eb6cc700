#include "rabc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "rabc/io.hpp"
#include "rabc/version.hpp"

namespace rabc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Row = std::vector<std::string>;
using Rows = std::vector<Row>;

std::string method_col(MethodVariant v) { return variant_name(v); }

void emit_stats_rows(Rows& rows, const std::string& grid, const MethodResult& m) {
  for (std::size_t j = 0; j < m.stats.mean.size(); ++j)
    rows.push_back({grid, method_col(m.variant), std::to_string(j + 1),
                    fmt_double(m.stats.mean[j]), fmt_double(m.stats.sd[j]),
                    fmt_double(m.stats.lo[j]), fmt_double(m.stats.hi[j]), fmt_double(m.epsilon),
                    std::to_string(m.n_accepted), m.degenerate_fit ? "1" : "0"});
}

void emit_compat_rows(Rows& rows, const std::string& grid, const std::string& method,
                      const CompatReport& rep) {
  for (const auto& e : rep.entries)
    rows.push_back({grid, method, e.gamma_label, fmt_double(e.prior_stat),
                    fmt_double(e.posterior_stat), fmt_double(e.divergence),
                    e.flagged ? "1" : "0"});
}

void emit_density_rows(Rows& rows, const std::string& grid,
                       const std::vector<DensityGrid>& densities) {
  for (const auto& d : densities)
    for (std::size_t k = 0; k < d.x.size(); ++k)
      rows.push_back({grid, d.param, fmt_double(d.x[k]), fmt_double(d.density[k])});
}

struct OutputSet {
  fs::path dir;
  std::string prefix;
  std::vector<std::string> written;

  std::string file(const std::string& suffix) {
    const fs::path p = dir / (prefix + "_" + suffix);
    written.push_back(p.string());
    return p.string();
  }
};

void write_curve_csv(OutputSet& out, const AcceptanceCurve& curve) {
  Rows rows;
  for (const auto& [tol, acc] : curve.points)
    rows.push_back({fmt_double(tol), fmt_double(acc)});
  write_csv(out.file("curve.csv"), {"tolerance", "acceptance"}, rows);
}

int run_sweep_cmd(const RunSettings& rs, OutputSet& out, json& summary) {
  const SweepResult res = run_sweep(rs.experiment);
  Rows stats, compat, dens;
  for (const auto& cell : res.cells) {
    const std::string g = fmt_double(cell.grid_value);
    for (const auto& m : cell.methods) emit_stats_rows(stats, g, m);
    for (std::size_t c = 0; c < cell.compat.size(); ++c)
      emit_compat_rows(compat, g, cell.compat_methods[c], cell.compat[c]);
    emit_density_rows(dens, g, cell.densities);
  }
  write_csv(out.file("sweep.csv"),
            {"sigma", "method", "param", "post_mean", "post_sd", "ci_lo", "ci_hi", "epsilon",
             "n_accepted", "degenerate"},
            stats);
  if (!compat.empty())
    write_csv(out.file("compat.csv"),
              {"sigma", "method", "gamma", "prior_stat", "posterior_stat", "ks", "flagged"},
              compat);
  if (!dens.empty())
    write_csv(out.file("densities.csv"), {"sigma", "series", "x", "density"}, dens);

  summary["bank_failures"] = res.bank_failures;
  summary["cells"] = res.cells.size();
  return 0;
}

int run_mc_cmd(const RunSettings& rs, OutputSet& out, json& summary) {
  const McReport rep = run_mc(rs.experiment);
  Rows agg, rec;
  bool any_unreliable = false;
  for (const auto& cell : rep.cells) {
    const std::string g = fmt_double(cell.grid_value);
    for (const auto& m : cell.methods) {
      any_unreliable = any_unreliable || m.unreliable;
      for (std::size_t j = 0; j < m.coverage.size(); ++j)
        agg.push_back({g, method_col(m.variant), std::to_string(j + 1),
                       fmt_double(m.coverage[j]), fmt_double(m.bias[j]), fmt_double(m.std_[j]),
                       std::to_string(m.failures), m.unreliable ? "1" : "0"});
    }
    for (const auto& r : cell.records) {
      if (r.failed) {
        rec.push_back({g, std::to_string(r.replication), method_col(r.variant), "", "", "", "",
                       "", "1"});
        continue;
      }
      for (std::size_t j = 0; j < r.post_mean.size(); ++j)
        rec.push_back({g, std::to_string(r.replication), method_col(r.variant),
                       std::to_string(j + 1), fmt_double(r.post_mean[j]),
                       fmt_double(r.post_sd[j]), fmt_double(r.lo[j]), fmt_double(r.hi[j]), "0"});
    }
  }
  write_csv(out.file("mc.csv"),
            {"sigma", "method", "param", "coverage", "bias", "std", "failures", "unreliable"},
            agg);
  write_csv(out.file("mc_records.csv"),
            {"sigma", "replication", "method", "param", "post_mean", "post_sd", "ci_lo", "ci_hi",
             "failed"},
            rec);
  summary["replications"] = rep.replications;
  summary["unreliable"] = any_unreliable;
  return any_unreliable ? 1 : 0;
}

int run_alpha_sv_cmd(const RunSettings& rs, OutputSet& out, json& summary) {
  const ExperimentConfig& cfg = rs.experiment;
  Series returns;
  if (!cfg.returns_csv.empty()) {
    returns = ingest_returns(cfg.returns_csv);
  } else {
    // Simulated stand-in series from the configured alpha-stable SV DGP.
    RngStream obs(derive_seed(cfg.root_seed, seed_tag::kObserved), 0);
    returns = simulate_true_dgp("alpha_sv", rs.sim_true_params, std::nullopt, rs.sim_n_obs, obs);
  }
  const AlphaSvReport rep = run_alpha_sv(cfg, returns);

  Rows stats;
  emit_stats_rows(stats, "0", rep.raw);
  emit_stats_rows(stats, "0", rep.adjusted);
  write_csv(out.file("posterior.csv"),
            {"sigma", "method", "param", "post_mean", "post_sd", "ci_lo", "ci_hi", "epsilon",
             "n_accepted", "degenerate"},
            stats);

  Rows compat;
  emit_compat_rows(compat, "0", "rabc-s", rep.compat);
  write_csv(out.file("compat.csv"),
            {"sigma", "method", "gamma", "prior_stat", "posterior_stat", "ks", "flagged"},
            compat);

  write_curve_csv(out, rep.curve);
  if (!rep.densities.empty()) {
    Rows dens;
    emit_density_rows(dens, "0", rep.densities);
    write_csv(out.file("densities.csv"), {"sigma", "series", "x", "density"}, dens);
  }
  save_sample_archive(out.file("sample.csv"), rep.sample, rep.distance_sketch);

  summary["aux_beta"] = rep.aux_fit.beta;
  summary["aux_loglik"] = rep.aux_fit.loglik;
  summary["aux_converged"] = rep.aux_fit.converged;
  summary["curve_max_deviation"] = rep.curve.max_deviation;
  bool any_flag = false;
  for (const auto& e : rep.compat.entries) any_flag = any_flag || e.flagged;
  summary["gamma_flagged"] = any_flag;
  summary["n_accepted"] = rep.raw.n_accepted;
  return 0;
}

}  // namespace

int cmd_run(const CliOptions& opts) {
  ConfigDoc doc;
  RunSettings rs;
  try {
    doc = parse_config_file(opts.config_path);
    rs = settings_from_doc(doc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  // Command-line overrides, folded into the config hash.
  std::string override_tag;
  if (opts.seed) {
    rs.experiment.root_seed = *opts.seed;
    override_tag += ";seed=" + std::to_string(*opts.seed);
  }
  if (opts.draws) {
    rs.experiment.n_draws = *opts.draws;
    override_tag += ";draws=" + std::to_string(*opts.draws);
  }
  if (opts.quantile) {
    rs.experiment.accept_quantile = *opts.quantile;
    override_tag += ";quantile=" + fmt_double(*opts.quantile);
  }
  if (opts.threads) rs.experiment.threads = *opts.threads;

  try {
    OutputSet out;
    out.dir = opts.out_dir;
    fs::create_directories(out.dir);
    out.prefix = rs.out_prefix.empty() ? fs::path(opts.config_path).stem().string()
                                       : rs.out_prefix;

    RunManifest manifest;
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(doc.raw_text + override_tag)));
    manifest.config_hash = hash;
    manifest.tool_version = kVersion;
    manifest.root_seed = rs.experiment.root_seed;
    manifest.started_at = iso8601_now();

    json summary;
    summary["config"] = opts.config_path;
    summary["config_hash"] = manifest.config_hash;
    summary["root_seed"] = rs.experiment.root_seed;
    summary["n_draws"] = rs.experiment.n_draws;
    summary["accept_quantile"] = rs.experiment.accept_quantile;
    summary["tool_version"] = kVersion;

    int rc = 0;
    switch (rs.experiment.kind) {
      case ExperimentConfig::Kind::Sweep: rc = run_sweep_cmd(rs, out, summary); break;
      case ExperimentConfig::Kind::Mc: rc = run_mc_cmd(rs, out, summary); break;
      case ExperimentConfig::Kind::AlphaSv: rc = run_alpha_sv_cmd(rs, out, summary); break;
    }

    {
      const std::string path = out.file("summary.json");
      std::ofstream js(path);
      js << summary.dump(2) << '\n';
      if (!js) throw std::runtime_error(path + ": write failed");
    }
    manifest.finished_at = iso8601_now();
    manifest.outputs = out.written;
    write_manifest((out.dir / (out.prefix + "_manifest.json")).string(), manifest);
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_diagnose(const std::string& sample_path, const std::string& out_dir) {
  try {
    const SampleArchive arc = load_sample_archive(sample_path);
    OutputSet out;
    out.dir = out_dir;
    fs::create_directories(out.dir);
    out.prefix = fs::path(sample_path).stem().string() + "_diagnose";

    if (arc.sample.method != Method::Abc) {
      Rows compat;
      emit_compat_rows(compat, "0", method_name(arc.sample.method), gamma_compat(arc.sample));
      write_csv(out.file("compat.csv"),
                {"sigma", "method", "gamma", "prior_stat", "posterior_stat", "ks", "flagged"},
                compat);
    }
    const AcceptanceCurve curve = acceptance_curve(arc.distance_sketch, 200);
    write_curve_csv(out, curve);
    std::cout << "curve max deviation from diagonal: " << fmt_double(curve.max_deviation) << "\n";
    for (const auto& f : out.written) std::cout << f << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_fit_aux(const std::string& returns_csv, const std::string& out_dir) {
  try {
    const Series y = ingest_returns(returns_csv);
    const AuxGarchFit fit = fit_aux_garch(y, default_garch_init(y));
    json j;
    j["beta"] = fit.beta;
    j["loglik"] = fit.loglik;
    j["converged"] = fit.converged;
    j["n_obs"] = y.size();
    try {
      j["score"] = aux_score(y, fit.beta).values;
    } catch (const std::domain_error&) {
      j["score"] = nullptr;  // boundary fits can make the score inevaluable
    }

    fs::create_directories(out_dir);
    const fs::path p =
        fs::path(out_dir) / (fs::path(returns_csv).stem().string() + "_aux_fit.json");
    std::ofstream out(p);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error(p.string() + ": write failed");
    std::cout << j.dump(2) << "\n";
    return fit.converged ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rabc
