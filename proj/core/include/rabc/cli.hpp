#pragma once

#include <optional>
#include <string>

#include "rabc/config.hpp"

namespace rabc {

// Exit codes: 0 success; 1 runtime failure or an unreliable method in the
// report; 2 config schema violation.
struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> draws;
  std::optional<double> quantile;
  std::optional<int> threads;
};

int cmd_run(const CliOptions& opts);
int cmd_diagnose(const std::string& sample_path, const std::string& out_dir);
int cmd_fit_aux(const std::string& returns_csv, const std::string& out_dir);

}  // namespace rabc
