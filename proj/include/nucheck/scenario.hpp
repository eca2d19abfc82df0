#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nucheck/criteria.hpp"
#include "nucheck/report.hpp"

namespace nucheck {

/// Scenario file:
///
///   # comment
///   [scenario]
///   id = m1_identity
///   [weights]
///   nu = standard:1
///   mu = standard:1
///   [functions]
///   g = poly:[0,0;1,0]
///   phi = z
///   family = poly:[1,0] | z          (as_probe members, '|'-separated)
///   [parameters]
///   alpha = 2
///   beta = 1
///   gamma = 1
///   operator = T                     (T or S; default T)
///   [tasks]
///   list = m1, m_alpha, nuclear
///   [resolution]
///   k_max = 10                       (integer overrides, see kResolutionKeys)
///   [output]
///   csv = m1.csv
///   json = m1.json
struct ScenarioConfig {
  std::string id;
  std::optional<std::string> nu;
  std::optional<std::string> mu;
  std::optional<std::string> g;
  std::optional<std::string> phi;
  std::vector<std::string> family;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> gamma;
  OperatorKind op = OperatorKind::T;
  std::vector<std::string> tasks;
  std::map<std::string, int> resolution;
  std::optional<std::string> csv;
  std::optional<std::string> json;
  /// Directory against which relative `table:` paths are resolved (not serialized).
  std::string base_dir;

  bool operator==(const ScenarioConfig& other) const;
};

extern const std::vector<std::string> kScenarioTasks;
extern const std::vector<std::string> kResolutionKeys;

/// Throws ParseError (with line and field) on unknown sections, keys, tasks or
/// weight kinds, malformed expressions, missing fields required by a task,
/// and phi failing the self-map certificate.
ScenarioConfig parse_scenario(std::string_view text, const std::string& base_dir = "");
ScenarioConfig load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& config);

struct RunOptions {
  /// Directory for relative output paths (default: current directory).
  std::string out_dir;
  bool write_files = true;
};

struct ScenarioOutcome {
  /// 0 success, 3 numerical evaluation error (the report records the failing task).
  int exit_code = 0;
  report::Json report;
  std::string csv;
  std::string csv_path;
  std::string json_path;
};

/// Runs the tasks in order. A refused nuclear decomposition is recorded and the
/// run continues; any other library error stops the run with exit code 3.
ScenarioOutcome run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace nucheck
