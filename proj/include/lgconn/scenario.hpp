#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgconn/numerics.hpp"

namespace lgconn {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char * kToolVersion = "0.4.0";

/// Process exit codes of the command-line front end.
enum ExitCode : int
{
  kExitPass = 0,
  kExitValidationFailure = 1,
  kExitConfigError = 2,
};

/// Command-line values that take precedence over the scenario file.
struct RunOverrides
{
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> abs_tol;
};

struct SuiteOutcome
{
  std::string suite;
  ValidationReport report;
  std::string error;  ///< set when the suite aborted on a numerical error

  bool passed() const { return error.empty() && report.passed(); }
};

struct RunReport
{
  std::string scenario;
  nlohmann::json config;  ///< effective scenario after overrides
  std::vector<SuiteOutcome> suites;
  double wall_seconds = 0.0;

  bool passed() const;
  int exit_code() const { return passed() ? kExitPass : kExitValidationFailure; }
  /// Machine-readable report. Wall time is left out so repeated runs compare equal.
  nlohmann::json to_json() const;
  /// Human summary table.
  std::string render_table() const;
};

struct BundledScenario
{
  std::string name;
  std::string description;
  bool negative_control = false;
  std::string source;  ///< JSON text
};

/// Bundled scenarios in listing order.
const std::vector<BundledScenario> & bundled_scenarios();

/// Reads a scenario from a file, or from the bundled set when no such file exists.
/// Throws ConfigError on unreadable or malformed input.
nlohmann::json load_scenario(const std::string & path_or_name);

/// Writes the overrides into the document (sampling.seed, sampling.count, tolerances.abs_tol).
nlohmann::json apply_overrides(nlohmann::json doc, const RunOverrides & overrides);

/// Assembles the scenario from the registries and runs every listed suite.
/// Throws ConfigError for unresolved names and inconsistent dimensions.
RunReport run_scenario(const nlohmann::json & doc);

/// The names accepted in the "suites" list, in execution order.
const std::vector<std::string> & known_suites();

}  // namespace lgconn
