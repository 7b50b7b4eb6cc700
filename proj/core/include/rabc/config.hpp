#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabc/harness.hpp"

namespace rabc {

// Schema or parse failure; `message` is already anchored to file:line where
// a line exists, and names the offending key otherwise.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Plain-text key = value document, one entry per line; '#' starts a comment.
struct ConfigDoc {
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  std::string path;
  std::string raw_text;
  std::vector<Entry> entries;

  const Entry* find(const std::string& key) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }
};

ConfigDoc parse_config_text(const std::string& text, const std::string& path);
ConfigDoc parse_config_file(const std::string& path);

struct RunSettings {
  ExperimentConfig experiment;
  std::string out_prefix;
  bool save_samples = false;
  // alpha-sv stand-in simulation (used when returns_csv is absent)
  std::vector<double> sim_true_params;
  std::size_t sim_n_obs = 0;
};

// Validates the document against the schema (docs/config_format.md) and
// throws ConfigError on violations; unknown keys are errors.
RunSettings settings_from_doc(const ConfigDoc& doc);

}  // namespace rabc
