#include "rabc/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace rabc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

}  // namespace

const ConfigDoc::Entry* ConfigDoc::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

ConfigDoc parse_config_text(const std::string& text, const std::string& path) {
  ConfigDoc doc;
  doc.path = path;
  doc.raw_text = text;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    ConfigDoc::Entry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (doc.find(e.key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + e.key + "'");
    doc.entries.push_back(std::move(e));
  }
  return doc;
}

ConfigDoc parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

[[noreturn]] void fail(const ConfigDoc& doc, const ConfigDoc::Entry& e, const std::string& msg) {
  throw ConfigError(doc.path + ":" + std::to_string(e.line) + ": key '" + e.key + "': " + msg);
}

const ConfigDoc::Entry& require(const ConfigDoc& doc, const std::string& key) {
  const auto* e = doc.find(key);
  if (!e) throw ConfigError(doc.path + ": missing required key '" + key + "'");
  return *e;
}

double parse_real(const ConfigDoc& doc, const ConfigDoc::Entry& e, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    fail(doc, e, "expected a number, got '" + s + "'");
  return v;
}

double real_value(const ConfigDoc& doc, const std::string& key) {
  const auto& e = require(doc, key);
  return parse_real(doc, e, e.value);
}

std::uint64_t uint_value(const ConfigDoc& doc, const std::string& key) {
  const auto& e = require(doc, key);
  const double v = parse_real(doc, e, e.value);
  if (v < 0 || v != std::floor(v)) fail(doc, e, "expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> list_value(const ConfigDoc& doc, const ConfigDoc::Entry& e) {
  std::vector<double> out;
  for (const auto& part : split_list(e.value, ','))
    out.push_back(parse_real(doc, e, part));
  return out;
}

// `lo:hi:step` or a comma list.
std::vector<double> grid_value(const ConfigDoc& doc, const ConfigDoc::Entry& e) {
  if (e.value.find(':') != std::string::npos) {
    const auto parts = split_list(e.value, ':');
    if (parts.size() != 3) fail(doc, e, "grid must be 'lo:hi:step' or a comma list");
    const double lo = parse_real(doc, e, parts[0]);
    const double hi = parse_real(doc, e, parts[1]);
    const double step = parse_real(doc, e, parts[2]);
    if (!(step > 0.0) || hi < lo) fail(doc, e, "grid needs hi >= lo and step > 0");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-12 * step; v += step) out.push_back(v);
    return out;
  }
  return list_value(doc, e);
}

// `name(arg1, arg2)` form.
bool parse_call(const std::string& s, std::string& name, std::vector<std::string>& args) {
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') return false;
  name = trim(s.substr(0, open));
  const std::string inner = s.substr(open + 1, s.size() - open - 2);
  args.clear();
  if (!trim(inner).empty())
    for (const auto& a : split_list(inner, ',')) args.push_back(a);
  return true;
}

MarginalPrior parse_marginal(const ConfigDoc& doc, const ConfigDoc::Entry& e,
                             const std::string& s) {
  std::string name;
  std::vector<std::string> args;
  if (!parse_call(s, name, args)) fail(doc, e, "expected uniform(a,b) | normal(m,s) | fixed(v)");
  MarginalPrior p;
  if (name == "uniform" && args.size() == 2) {
    p.kind = MarginalPrior::Kind::Uniform;
    p.a = parse_real(doc, e, args[0]);
    p.b = parse_real(doc, e, args[1]);
    if (!(p.a < p.b)) fail(doc, e, "uniform needs a < b");
  } else if (name == "normal" && args.size() == 2) {
    p.kind = MarginalPrior::Kind::Normal;
    p.a = parse_real(doc, e, args[0]);
    p.b = parse_real(doc, e, args[1]);
    if (!(p.b > 0.0)) fail(doc, e, "normal needs sd > 0");
  } else if (name == "fixed" && args.size() == 1) {
    p.kind = MarginalPrior::Kind::Fixed;
    p.a = parse_real(doc, e, args[0]);
  } else {
    fail(doc, e, "unknown prior '" + s + "'");
  }
  return p;
}

GammaPrior parse_gamma_prior(const ConfigDoc& doc, const ConfigDoc::Entry& e) {
  if (e.value == "none") return {};
  std::string name;
  std::vector<std::string> args;
  if (!parse_call(e.value, name, args) || args.size() != 1)
    fail(doc, e, "expected laplace(rate) | exponential(rate) | point_mass(v) | none");
  GammaPrior g;
  const double v = parse_real(doc, e, args[0]);
  if (name == "laplace") {
    g.kind = GammaPrior::Kind::Laplace;
    g.rate = v;
    if (!(v > 0.0)) fail(doc, e, "rate must be > 0");
  } else if (name == "exponential") {
    g.kind = GammaPrior::Kind::Exponential;
    g.rate = v;
    if (!(v > 0.0)) fail(doc, e, "rate must be > 0");
  } else if (name == "point_mass") {
    g.kind = GammaPrior::Kind::PointMass;
    g.value = v;
  } else {
    fail(doc, e, "unknown gamma prior '" + e.value + "'");
  }
  return g;
}

bool bool_value(const ConfigDoc& doc, const ConfigDoc::Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(doc, e, "expected true or false");
}

const std::set<std::string> kKnownKeys = {
    "kind", "seed", "draws", "quantile", "threads", "out_prefix", "save_samples",
    "n_obs", "assumed_model", "summary", "true_model", "true_params", "methods",
    "prior", "constraint", "gamma_prior_s", "gamma_prior_w", "distance_weights",
    "weight_base", "kernel", "sigma_grid", "density_points", "auto_scale_weights",
    "compat_threshold", "replications", "pseudo_true", "fresh_bank",
    "returns_csv", "sim_true_params", "sim_n_obs"};

}  // namespace

RunSettings settings_from_doc(const ConfigDoc& doc) {
  for (const auto& e : doc.entries)
    if (!kKnownKeys.count(e.key)) fail(doc, e, "unknown key");

  RunSettings rs;
  ExperimentConfig& cfg = rs.experiment;

  const auto& kind_e = require(doc, "kind");
  if (kind_e.value == "sweep") cfg.kind = ExperimentConfig::Kind::Sweep;
  else if (kind_e.value == "mc") cfg.kind = ExperimentConfig::Kind::Mc;
  else if (kind_e.value == "alpha_sv") cfg.kind = ExperimentConfig::Kind::AlphaSv;
  else fail(doc, kind_e, "expected sweep | mc | alpha_sv");

  cfg.root_seed = uint_value(doc, "seed");
  cfg.n_draws = uint_value(doc, "draws");
  cfg.accept_quantile = real_value(doc, "quantile");
  if (!(cfg.accept_quantile > 0.0 && cfg.accept_quantile <= 1.0)) {
    fail(doc, require(doc, "quantile"), "must be in (0, 1]");
  }
  if (doc.has("threads")) cfg.threads = static_cast<int>(uint_value(doc, "threads"));
  if (const auto* e = doc.find("out_prefix")) rs.out_prefix = e->value;
  if (const auto* e = doc.find("save_samples")) rs.save_samples = bool_value(doc, *e);
  if (doc.has("density_points"))
    cfg.density_points = static_cast<std::size_t>(uint_value(doc, "density_points"));

  // Theta prior (required for every kind).
  {
    const auto& e = require(doc, "prior");
    for (const auto& part : split_list(e.value, ';'))
      cfg.theta_prior.push_back(parse_marginal(doc, e, part));
    if (cfg.theta_prior.empty()) fail(doc, e, "at least one marginal required");
  }
  if (const auto* e = doc.find("constraint")) {
    if (e->value == "none") cfg.theta_constraint = PriorSpec::Constraint::None;
    else if (e->value == "ma2_invertible") cfg.theta_constraint = PriorSpec::Constraint::Ma2Invertible;
    else fail(doc, *e, "expected none | ma2_invertible");
  }
  if (const auto* e = doc.find("gamma_prior_s")) cfg.gamma_s = parse_gamma_prior(doc, *e);
  if (const auto* e = doc.find("gamma_prior_w")) cfg.gamma_w = parse_gamma_prior(doc, *e);
  if (const auto* e = doc.find("kernel")) {
    if (e->value == "uniform") cfg.kernel = KernelKind::Uniform;
    else if (e->value == "epanechnikov") cfg.kernel = KernelKind::Epanechnikov;
    else fail(doc, *e, "expected uniform | epanechnikov");
  }
  if (const auto* e = doc.find("distance_weights")) cfg.fixed_weights = list_value(doc, *e);
  if (const auto* e = doc.find("weight_base")) cfg.weight_base = list_value(doc, *e);
  if (const auto* e = doc.find("auto_scale_weights")) cfg.auto_scale_weights = bool_value(doc, *e);
  if (doc.has("compat_threshold")) {
    cfg.compat_threshold = real_value(doc, "compat_threshold");
    if (!(cfg.compat_threshold > 0.0 && cfg.compat_threshold < 1.0))
      fail(doc, require(doc, "compat_threshold"), "must be in (0, 1)");
  }

  if (cfg.kind == ExperimentConfig::Kind::AlphaSv) {
    if (cfg.theta_prior.size() != 3)
      fail(doc, require(doc, "prior"), "alpha_sv needs exactly 3 marginals (theta2; theta3; theta4)");
    if (const auto* e = doc.find("returns_csv")) cfg.returns_csv = e->value;
    if (doc.has("sim_true_params")) {
      rs.sim_true_params = list_value(doc, require(doc, "sim_true_params"));
      if (rs.sim_true_params.size() != 5)
        fail(doc, require(doc, "sim_true_params"), "expected 5 values (theta1..theta5)");
      rs.sim_n_obs = uint_value(doc, "sim_n_obs");
      if (rs.sim_n_obs < 100) fail(doc, require(doc, "sim_n_obs"), "need at least 100");
    }
    if (cfg.returns_csv.empty() && rs.sim_true_params.empty())
      throw ConfigError(doc.path + ": missing required key 'returns_csv' (or 'sim_true_params')");
    return rs;
  }

  // Sweep / MC common schema.
  cfg.n_obs = uint_value(doc, "n_obs");
  if (cfg.n_obs < 2) fail(doc, require(doc, "n_obs"), "need n_obs >= 2");
  cfg.assumed_model = require(doc, "assumed_model").value;
  cfg.summary_id = require(doc, "summary").value;
  cfg.true_model = require(doc, "true_model").value;
  cfg.true_params = list_value(doc, require(doc, "true_params"));
  {
    const auto& e = require(doc, "methods");
    for (const auto& part : split_list(e.value, ',')) {
      const auto v = variant_from_name(part);
      if (!v) fail(doc, e, "unknown method '" + part + "'");
      cfg.methods.push_back(*v);
    }
    if (cfg.methods.empty()) fail(doc, e, "at least one method required");
  }
  if (model_dim(cfg.assumed_model) != cfg.theta_prior.size())
    fail(doc, require(doc, "prior"),
         "prior dimension does not match assumed model '" + cfg.assumed_model + "'");
  if (const auto* e = doc.find("sigma_grid")) cfg.sweep_grid = grid_value(doc, *e);

  if (cfg.kind == ExperimentConfig::Kind::Mc) {
    cfg.replications = uint_value(doc, "replications");
    if (cfg.replications < 1) fail(doc, require(doc, "replications"), "need >= 1");
    cfg.pseudo_true = list_value(doc, require(doc, "pseudo_true"));
    if (cfg.pseudo_true.size() != model_dim(cfg.assumed_model))
      fail(doc, require(doc, "pseudo_true"), "dimension does not match assumed model");
    if (const auto* e = doc.find("fresh_bank")) cfg.fresh_bank = bool_value(doc, *e);
  } else {
    if (cfg.sweep_grid.empty() &&
        (cfg.true_model == "normal" || cfg.true_model == "mixture"))
      throw ConfigError(doc.path + ": missing required key 'sigma_grid'");
  }
  return rs;
}

}  // namespace rabc
