#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rabc/engine.hpp"

namespace rabc {

// Round-trip double formatting (17 significant digits).
std::string fmt_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t col(const std::string& name) const;  // throws when the column is absent
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Daily returns from a CSV with either a `return` column or `open`,`close`
// columns (log close-over-open). Errors carry the offending row number.
Series read_returns_raw(const std::string& csv_path);
// Raw returns standardized (divide by sd, subtract mean).
Series ingest_returns(const std::string& csv_path);

// Versioned CSV archive of an accepted sample plus a quantile sketch of the
// full simulated-distance list (enough to rebuild the acceptance curve).
void save_sample_archive(const std::string& path, const AcceptedSample& sample,
                         const std::vector<double>& distance_sketch);

struct SampleArchive {
  AcceptedSample sample;
  std::vector<double> distance_sketch;
};

SampleArchive load_sample_archive(const std::string& path);

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::uint64_t root_seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
};

// Written to a temp file and renamed into place.
void write_manifest(const std::string& path, const RunManifest& m);

std::uint64_t fnv1a64(std::string_view data);
std::string iso8601_now();

}  // namespace rabc
