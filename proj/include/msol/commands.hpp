#pragma once

#include <string>
#include <utility>
#include <vector>

#include "msol/config.hpp"

namespace msol {

inline constexpr const char* kToolVersion = "0.1.0";

/// build, ergodic, pair, homology, dualform, selfint, decompose, acceptance
const std::vector<std::string>& command_names();

struct RunReport {
  std::string command;
  Json echo;
  Json results;
  bool ok = true;  // false when a checked contract failed (acceptance)
  double wall_seconds = 0.0;
  /// Extra output files (name, contents), written next to report.json.
  std::vector<std::pair<std::string, std::string>> files;

  /// {command, tool_version, config, results}. No timing, so reruns are
  /// byte-identical.
  Json to_json() const;
};

/// Runs one command on a parsed config. No file system access.
RunReport run_command(const std::string& command, const ExperimentConfig& cfg);

/// Writes report.json, timing.json and the command's files into `dir`.
void write_report(const RunReport& report, const std::string& dir);

std::string component_label(std::uint32_t mask);

}  // namespace msol
