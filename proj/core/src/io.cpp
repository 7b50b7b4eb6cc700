#include "rabc/io.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rabc/harness.hpp"
#include "rabc/version.hpp"

namespace rabc {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double_cell(const std::string& cell, const std::string& path, std::size_t row,
                         const std::string& colname) {
  const std::string t = trim(cell);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw std::runtime_error(path + ": row " + std::to_string(row) + ": non-numeric cell '" +
                             cell + "' in column '" + colname + "'");
  return v;
}

}  // namespace

std::size_t CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error("missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (t.header.empty()) {
      for (auto& c : cells) c = trim(c);
      t.header = cells;
    } else {
      if (cells.size() != t.header.size())
        throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                                 ": expected " + std::to_string(t.header.size()) + " cells, got " +
                                 std::to_string(cells.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) throw std::runtime_error(path + ": empty file");
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? ',' : '\n');
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Series read_returns_raw(const std::string& csv_path) {
  const CsvTable t = read_csv(csv_path);
  if (t.rows.empty()) throw std::runtime_error(csv_path + ": no data rows");

  bool has_return = false, has_oc = false;
  for (const auto& h : t.header) {
    if (h == "return") has_return = true;
  }
  if (!has_return) {
    bool open = false, close = false;
    for (const auto& h : t.header) {
      open = open || h == "open";
      close = close || h == "close";
    }
    has_oc = open && close;
  }
  if (!has_return && !has_oc)
    throw std::runtime_error(csv_path + ": need a 'return' column or 'open' and 'close' columns");

  Series r;
  r.reserve(t.rows.size());
  if (has_return) {
    const std::size_t c = t.col("return");
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      r.push_back(parse_double_cell(t.rows[i][c], csv_path, i + 2, "return"));
  } else {
    const std::size_t co = t.col("open"), cc = t.col("close");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double open = parse_double_cell(t.rows[i][co], csv_path, i + 2, "open");
      const double close = parse_double_cell(t.rows[i][cc], csv_path, i + 2, "close");
      if (!(open > 0.0) || !(close > 0.0))
        throw std::runtime_error(csv_path + ": row " + std::to_string(i + 2) +
                                 ": prices must be positive");
      r.push_back(std::log(close / open));
    }
  }
  return r;
}

Series ingest_returns(const std::string& csv_path) {
  return standardize_returns(read_returns_raw(csv_path));
}

namespace {

constexpr const char* kArchiveMagic = "# rabc-sample-archive v1";

std::string gamma_kind_name(GammaPrior::Kind k) {
  switch (k) {
    case GammaPrior::Kind::None: return "none";
    case GammaPrior::Kind::Laplace: return "laplace";
    case GammaPrior::Kind::Exponential: return "exponential";
    case GammaPrior::Kind::PointMass: return "point_mass";
  }
  return "?";
}

GammaPrior::Kind gamma_kind_from(const std::string& s) {
  if (s == "none") return GammaPrior::Kind::None;
  if (s == "laplace") return GammaPrior::Kind::Laplace;
  if (s == "exponential") return GammaPrior::Kind::Exponential;
  if (s == "point_mass") return GammaPrior::Kind::PointMass;
  throw std::runtime_error("archive: unknown gamma prior kind '" + s + "'");
}

Method method_from(const std::string& s) {
  for (Method m : {Method::Abc, Method::RabcS, Method::RabcW})
    if (method_name(m) == s) return m;
  throw std::runtime_error("archive: unknown method '" + s + "'");
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

}  // namespace

void save_sample_archive(const std::string& path, const AcceptedSample& sample,
                         const std::vector<double>& distance_sketch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const std::size_t d_theta = sample.draws.empty() ? 0 : sample.draws.front().theta.size();
  const std::size_t d_gamma = sample.draws.empty() ? 0 : sample.draws.front().gamma.size();
  const std::size_t d_eta = sample.eta_y.size();

  out << kArchiveMagic << '\n';
  out << "# method=" << method_name(sample.method) << '\n';
  out << "# epsilon=" << fmt_double(sample.epsilon) << '\n';
  out << "# n_total=" << sample.n_total << '\n';
  out << "# n_failed=" << sample.n_failed << '\n';
  out << "# gamma_kind=" << gamma_kind_name(sample.gamma_prior.kind) << '\n';
  out << "# gamma_rate=" << fmt_double(sample.gamma_prior.rate) << '\n';
  out << "# gamma_value=" << fmt_double(sample.gamma_prior.value) << '\n';
  out << "# d_theta=" << d_theta << '\n';
  out << "# d_gamma=" << d_gamma << '\n';
  out << "# d_eta=" << d_eta << '\n';
  out << "# labels=" << join(sample.eta_y.labels, '|') << '\n';
  std::vector<std::string> ey;
  for (double v : sample.eta_y.values) ey.push_back(fmt_double(v));
  out << "# eta_y=" << join(ey, '|') << '\n';

  out << "[distances]\n";
  for (double v : distance_sketch) out << fmt_double(v) << '\n';

  out << "[draws]\n";
  out << "stream_id,distance";
  for (std::size_t j = 0; j < d_theta; ++j) out << ",theta_" << (j + 1);
  for (std::size_t j = 0; j < d_gamma; ++j) out << ",gamma_" << (j + 1);
  for (std::size_t j = 0; j < d_eta; ++j) out << ",sim_" << (j + 1);
  out << '\n';
  for (const auto& d : sample.draws) {
    out << d.stream_id << ',' << fmt_double(d.distance);
    for (double v : d.theta) out << ',' << fmt_double(v);
    for (double v : d.gamma) out << ',' << fmt_double(v);
    for (double v : d.sim_summary.values) out << ',' << fmt_double(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

SampleArchive load_sample_archive(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || trim(line) != kArchiveMagic)
    throw std::runtime_error(path + ": not a rabc sample archive, or version mismatch");

  SampleArchive arc;
  AcceptedSample& s = arc.sample;
  std::size_t d_theta = 0, d_gamma = 0, d_eta = 0;
  auto need = [&](const std::string& v, const char* what) {
    if (v.empty()) throw std::runtime_error(path + ": corrupt archive: missing " + std::string(what));
    return v;
  };

  // Header block.
  while (std::getline(in, line)) {
    line = trim(line);
    if (line == "[distances]") break;
    if (line.rfind("# ", 0) != 0) throw std::runtime_error(path + ": corrupt archive header");
    const std::string kv = line.substr(2);
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error(path + ": corrupt archive header");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "method") s.method = method_from(val);
    else if (key == "epsilon") s.epsilon = std::stod(need(val, "epsilon"));
    else if (key == "n_total") s.n_total = std::stoull(need(val, "n_total"));
    else if (key == "n_failed") s.n_failed = std::stoull(need(val, "n_failed"));
    else if (key == "gamma_kind") s.gamma_prior.kind = gamma_kind_from(val);
    else if (key == "gamma_rate") s.gamma_prior.rate = std::stod(need(val, "gamma_rate"));
    else if (key == "gamma_value") s.gamma_prior.value = std::stod(need(val, "gamma_value"));
    else if (key == "d_theta") d_theta = std::stoull(need(val, "d_theta"));
    else if (key == "d_gamma") d_gamma = std::stoull(need(val, "d_gamma"));
    else if (key == "d_eta") d_eta = std::stoull(need(val, "d_eta"));
    else if (key == "labels") s.eta_y.labels = split(val, '|');
    else if (key == "eta_y") {
      for (const auto& c : split(val, '|')) s.eta_y.values.push_back(std::stod(c));
    }
  }
  if (d_eta == 0 || s.eta_y.values.size() != d_eta || s.eta_y.labels.size() != d_eta)
    throw std::runtime_error(path + ": corrupt archive: bad dimensions");

  // Distance sketch.
  while (std::getline(in, line)) {
    line = trim(line);
    if (line == "[draws]") break;
    if (line.empty()) continue;
    arc.distance_sketch.push_back(std::stod(line));
  }

  // Draws table (skip its header row).
  if (!std::getline(in, line)) throw std::runtime_error(path + ": corrupt archive: no draws");
  const std::size_t n_cols = 2 + d_theta + d_gamma + d_eta;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != n_cols) throw std::runtime_error(path + ": corrupt archive: bad draw row");
    JointDraw d;
    d.stream_id = std::stoull(cells[0]);
    d.distance = std::stod(cells[1]);
    std::size_t k = 2;
    for (std::size_t j = 0; j < d_theta; ++j) d.theta.push_back(std::stod(cells[k++]));
    for (std::size_t j = 0; j < d_gamma; ++j) d.gamma.push_back(std::stod(cells[k++]));
    d.sim_summary.labels = s.eta_y.labels;
    for (std::size_t j = 0; j < d_eta; ++j) d.sim_summary.values.push_back(std::stod(cells[k++]));
    s.draws.push_back(std::move(d));
  }
  if (s.draws.empty()) throw std::runtime_error(path + ": corrupt archive: no draws");
  return arc;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["tool_version"] = m.tool_version;
  j["root_seed"] = m.root_seed;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error(tmp + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rabc
