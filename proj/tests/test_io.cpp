#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <stdexcept>

#include "rabc/cli.hpp"
#include "rabc/config.hpp"
#include "rabc/io.hpp"
#include "rabc/models.hpp"
#include "rabc/rng.hpp"

using namespace rabc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rabc_test_" + std::to_string(RngStream(::getpid(), 0).next_u64() % 1000000));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fmt_double round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, 1e-17, 123456.789123456789, -0.0001, 2.2250738585072014e-308}) {
    CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("csv write/read round trip and errors") {
  TempDir tmp;
  const std::string p = tmp.file("t.csv");
  write_csv(p, {"a", "b"}, {{fmt_double(1.0 / 3.0), "x"}, {fmt_double(-2.5e-9), "y"}});
  const CsvTable t = read_csv(p);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(std::strtod(t.rows[0][0].c_str(), nullptr) == 1.0 / 3.0);
  CHECK(t.col("b") == 1);
  CHECK_THROWS_AS(t.col("c"), std::runtime_error);

  write_text(tmp.file("ragged.csv"), "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(tmp.file("ragged.csv")), std::runtime_error);
  write_text(tmp.file("empty.csv"), "");
  CHECK_THROWS_AS(read_csv(tmp.file("empty.csv")), std::runtime_error);
}

TEST_CASE("ingest_returns: return column, open/close, errors") {
  TempDir tmp;
  write_text(tmp.file("r.csv"), "date,return\n1,0.01\n2,-0.02\n3,0.005\n4,0.01\n");
  const Series r = ingest_returns(tmp.file("r.csv"));
  CHECK(r.size() == 4);

  write_text(tmp.file("oc.csv"), "open,close\n100,101\n101,99\n99,100\n100,102\n");
  const Series raw = read_returns_raw(tmp.file("oc.csv"));
  CHECK(raw[0] == doctest::Approx(std::log(101.0 / 100.0)));
  CHECK(raw[1] == doctest::Approx(std::log(99.0 / 101.0)));

  // open == close everywhere: zero returns, standardization must refuse.
  write_text(tmp.file("flat.csv"), "open,close\n10,10\n11,11\n12,12\n");
  const Series flat = read_returns_raw(tmp.file("flat.csv"));
  CHECK(flat == Series{0.0, 0.0, 0.0});
  CHECK_THROWS_WITH_AS(ingest_returns(tmp.file("flat.csv")),
                       doctest::Contains("zero variance"), std::invalid_argument);

  write_text(tmp.file("bad.csv"), "return\n0.01\nnot_a_number\n");
  CHECK_THROWS_WITH_AS(ingest_returns(tmp.file("bad.csv")), doctest::Contains("row 3"),
                       std::runtime_error);

  write_text(tmp.file("nocol.csv"), "date,price\n1,100\n");
  CHECK_THROWS_AS(ingest_returns(tmp.file("nocol.csv")), std::runtime_error);

  // A realistic daily-returns length parses in full.
  std::string big = "return\n";
  RngStream s(7, 0);
  for (int i = 0; i < 1033; ++i) big += fmt_double(sample_normal(s, 0.0, 0.01)) + "\n";
  write_text(tmp.file("big.csv"), big);
  CHECK(ingest_returns(tmp.file("big.csv")).size() == 1033);
}

TEST_CASE("sample archive round trip") {
  AcceptedSample s;
  s.method = Method::RabcS;
  s.epsilon = 0.125;
  s.n_total = 5000;
  s.n_failed = 3;
  s.gamma_prior = {GammaPrior::Kind::Laplace, 4.0, 0.0};
  s.eta_y = {{0.5, 1.5}, {"mean", "var"}};
  RngStream g(8, 0);
  for (int i = 0; i < 150; ++i) {
    JointDraw d;
    d.stream_id = i * 7;
    d.distance = 0.001 * i;
    d.theta = {sample_normal(g, 0.0, 1.0)};
    d.gamma = {sample_laplace(g, 4.0), sample_laplace(g, 4.0)};
    d.sim_summary = {{sample_normal(g, 0.0, 1.0), sample_normal(g, 1.0, 0.2)}, {"mean", "var"}};
    s.draws.push_back(std::move(d));
  }
  std::vector<double> sketch(1200);
  for (std::size_t i = 0; i < sketch.size(); ++i) sketch[i] = 0.01 * static_cast<double>(i);

  TempDir tmp;
  const std::string p = tmp.file("sample.csv");
  save_sample_archive(p, s, sketch);
  const SampleArchive arc = load_sample_archive(p);

  CHECK(arc.sample.method == Method::RabcS);
  CHECK(arc.sample.epsilon == s.epsilon);
  CHECK(arc.sample.n_total == s.n_total);
  CHECK(arc.sample.n_failed == s.n_failed);
  CHECK(arc.sample.gamma_prior.kind == GammaPrior::Kind::Laplace);
  CHECK(arc.sample.gamma_prior.rate == 4.0);
  CHECK(arc.sample.eta_y.values == s.eta_y.values);
  CHECK(arc.sample.eta_y.labels == s.eta_y.labels);
  CHECK(arc.distance_sketch == sketch);
  REQUIRE(arc.sample.draws.size() == s.draws.size());
  for (std::size_t i = 0; i < s.draws.size(); ++i) {
    CHECK(arc.sample.draws[i].stream_id == s.draws[i].stream_id);
    CHECK(arc.sample.draws[i].distance == s.draws[i].distance);
    CHECK(arc.sample.draws[i].theta == s.draws[i].theta);
    CHECK(arc.sample.draws[i].gamma == s.draws[i].gamma);
    CHECK(arc.sample.draws[i].sim_summary.values == s.draws[i].sim_summary.values);
  }

  write_text(tmp.file("vbad.csv"), "# rabc-sample-archive v99\n# method=abc\n");
  CHECK_THROWS_WITH_AS(load_sample_archive(tmp.file("vbad.csv")),
                       doctest::Contains("version"), std::runtime_error);
  write_text(tmp.file("corrupt.csv"), "# rabc-sample-archive v1\n# method=abc\ngarbage\n");
  CHECK_THROWS_AS(load_sample_archive(tmp.file("corrupt.csv")), std::runtime_error);
}

TEST_CASE("config parsing: values, errors, line anchors") {
  const char* text =
      "kind = sweep\n"
      "seed = 7\n"
      "draws = 5000\n"
      "quantile = 0.01\n"
      "n_obs = 50\n"
      "assumed_model = normal\n"
      "summary = mean_var\n"
      "true_model = mixture\n"
      "true_params = 0.0\n"
      "sigma_grid = 1.0:2.0:0.5\n"
      "methods = abc, rabc-s\n"
      "prior = normal(0, 5)\n"
      "gamma_prior_s = laplace(4)\n"
      "kernel = epanechnikov\n";
  const RunSettings rs = settings_from_doc(parse_config_text(text, "t.cfg"));
  CHECK(rs.experiment.kind == ExperimentConfig::Kind::Sweep);
  CHECK(rs.experiment.root_seed == 7);
  CHECK(rs.experiment.n_draws == 5000);
  CHECK(rs.experiment.sweep_grid == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(rs.experiment.methods.size() == 2);
  CHECK(rs.experiment.gamma_s.kind == GammaPrior::Kind::Laplace);
  CHECK(rs.experiment.theta_prior[0].kind == MarginalPrior::Kind::Normal);
  CHECK(rs.experiment.kernel == KernelKind::Epanechnikov);

  // Missing required key names the key.
  CHECK_THROWS_WITH_AS(settings_from_doc(parse_config_text("kind = sweep\nseed = 1\n", "t.cfg")),
                       doctest::Contains("'draws'"), ConfigError);
  // Bad values carry the line number.
  CHECK_THROWS_WITH_AS(
      settings_from_doc(parse_config_text("kind = nope\nseed = 1\ndraws = 10\nquantile = 0.5\n",
                                          "t.cfg")),
      doctest::Contains("t.cfg:1"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("kind\n", "t.cfg"), doctest::Contains("t.cfg:1"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("a = 1\na = 2\n", "t.cfg"),
                       doctest::Contains("duplicate"), ConfigError);
  // Unknown key.
  std::string unknown = std::string(text) + "mystery_key = 1\n";
  CHECK_THROWS_WITH_AS(settings_from_doc(parse_config_text(unknown, "t.cfg")),
                       doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("cmd_run: smoke, determinism, schema exit code") {
  TempDir tmp;
  const std::string cfg_path = tmp.file("mini.cfg");
  write_text(cfg_path,
             "kind = sweep\n"
             "seed = 5\n"
             "draws = 4000\n"
             "quantile = 0.01\n"
             "n_obs = 40\n"
             "assumed_model = normal\n"
             "summary = mean_var\n"
             "true_model = mixture\n"
             "true_params = 0.0\n"
             "sigma_grid = 1.0, 3.0\n"
             "methods = abc, abc-reg, rabc-s\n"
             "prior = normal(0, 5)\n"
             "kernel = epanechnikov\n"
             "out_prefix = mini\n");

  CliOptions opts;
  opts.config_path = cfg_path;
  opts.out_dir = tmp.file("out_a");
  CHECK(cmd_run(opts) == 0);
  CHECK(fs::exists(tmp.file("out_a") + "/mini_sweep.csv"));
  CHECK(fs::exists(tmp.file("out_a") + "/mini_summary.json"));
  CHECK(fs::exists(tmp.file("out_a") + "/mini_manifest.json"));

  // One row per (sigma, method, param).
  const CsvTable t = read_csv(tmp.file("out_a") + "/mini_sweep.csv");
  CHECK(t.rows.size() == 2 * 3);

  opts.out_dir = tmp.file("out_b");
  CHECK(cmd_run(opts) == 0);
  std::ifstream a(tmp.file("out_a") + "/mini_sweep.csv"), b(tmp.file("out_b") + "/mini_sweep.csv");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);

  // Schema violation: exit code 2.
  const std::string bad_path = tmp.file("bad.cfg");
  write_text(bad_path, "kind = sweep\nseed = 5\n");
  CliOptions bad_opts;
  bad_opts.config_path = bad_path;
  bad_opts.out_dir = tmp.file("out_c");
  CHECK(cmd_run(bad_opts) == 2);

  CliOptions missing;
  missing.config_path = tmp.file("nonexistent.cfg");
  CHECK(cmd_run(missing) == 2);

  // A study whose methods fail on every replication exits nonzero.
  const std::string unrel_path = tmp.file("unreliable.cfg");
  write_text(unrel_path,
             "kind = mc\n"
             "seed = 5\n"
             "draws = 1000\n"
             "quantile = 0.01\n"      // 10 accepted: below the posterior minimum
             "n_obs = 40\n"
             "assumed_model = normal\n"
             "summary = mean_var\n"
             "true_model = normal\n"
             "true_params = 0.0, 1.0\n"
             "methods = abc\n"
             "prior = normal(0, 5)\n"
             "replications = 3\n"
             "pseudo_true = 0.0\n");
  CliOptions unrel;
  unrel.config_path = unrel_path;
  unrel.out_dir = tmp.file("out_d");
  CHECK(cmd_run(unrel) == 1);
}

TEST_CASE("cmd_diagnose: robust archive, plain archive, corrupt input") {
  TempDir tmp;

  AcceptedSample s;
  s.method = Method::RabcW;
  s.epsilon = 1.0;
  s.n_total = 4000;
  s.gamma_prior = {GammaPrior::Kind::Exponential, 0.5, 0.0};
  s.eta_y = {{0.0, 1.0}, {"mean", "var"}};
  RngStream g(9, 0);
  for (int i = 0; i < 200; ++i) {
    JointDraw d;
    d.stream_id = i;
    d.distance = 0.002 * i;
    d.theta = {sample_normal(g, 0.0, 1.0)};
    d.gamma = {sample_exponential(g, 0.5), sample_exponential(g, 0.5)};
    d.sim_summary = s.eta_y;
    s.draws.push_back(std::move(d));
  }
  std::vector<double> sketch(1100);
  for (std::size_t i = 0; i < sketch.size(); ++i) sketch[i] = g.next_uniform();
  std::sort(sketch.begin(), sketch.end());

  const std::string robust_path = tmp.file("robust_sample.csv");
  save_sample_archive(robust_path, s, sketch);
  CHECK(cmd_diagnose(robust_path, tmp.file("d1")) == 0);
  CHECK(fs::exists(tmp.file("d1") + "/robust_sample_diagnose_compat.csv"));
  CHECK(fs::exists(tmp.file("d1") + "/robust_sample_diagnose_curve.csv"));
  const CsvTable compat = read_csv(tmp.file("d1") + "/robust_sample_diagnose_compat.csv");
  CHECK(compat.rows.size() == 2);  // one per summary

  // Plain-ABC archive: compat omitted, curve still produced.
  AcceptedSample plain = s;
  plain.method = Method::Abc;
  plain.gamma_prior = {};
  for (auto& d : plain.draws) d.gamma.clear();
  const std::string plain_path = tmp.file("plain_sample.csv");
  save_sample_archive(plain_path, plain, sketch);
  CHECK(cmd_diagnose(plain_path, tmp.file("d2")) == 0);
  CHECK_FALSE(fs::exists(tmp.file("d2") + "/plain_sample_diagnose_compat.csv"));
  CHECK(fs::exists(tmp.file("d2") + "/plain_sample_diagnose_curve.csv"));

  write_text(tmp.file("corrupt.csv"), "not an archive\n");
  CHECK(cmd_diagnose(tmp.file("corrupt.csv"), tmp.file("d3")) != 0);
}

TEST_CASE("cmd_fit_aux: fits volatility-clustered returns and writes the fit") {
  TempDir tmp;
  // SV returns have the ARCH-type dependence the auxiliary model targets.
  RngStream g(10, 0);
  const Series r = simulate_sv({-0.1, 0.9, 0.3}, 600, g);
  std::string csv = "return\n";
  for (double v : r) csv += fmt_double(v) + "\n";
  write_text(tmp.file("sv.csv"), csv);

  CHECK(cmd_fit_aux(tmp.file("sv.csv"), tmp.file("fa")) == 0);
  CHECK(fs::exists(tmp.file("fa") + "/sv_aux_fit.json"));

  CHECK(cmd_fit_aux(tmp.file("missing.csv"), tmp.file("fa2")) != 0);
}

TEST_CASE("manifest: atomic write and json shape") {
  TempDir tmp;
  RunManifest m;
  m.config_hash = "deadbeef";
  m.tool_version = "0.1.0";
  m.root_seed = 42;
  m.started_at = iso8601_now();
  m.finished_at = iso8601_now();
  m.outputs = {"a.csv", "b.csv"};
  const std::string p = tmp.file("manifest.json");
  write_manifest(p, m);
  CHECK(fs::exists(p));
  CHECK_FALSE(fs::exists(p + ".tmp"));
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"config_hash\": \"deadbeef\"") != std::string::npos);
  CHECK(text.find("\"root_seed\": 42") != std::string::npos);
}

TEST_CASE("fnv1a64 is stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("abc") != fnv1a64("acb"));
}

}  // TEST_SUITE
