#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "umd/ideal_norms.hpp"
#include "umd/serialize.hpp"

namespace umd::cli {

/// Configuration or usage problem; commands map it to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Everything a command run depends on. Two runs with equal RunConfig
/// produce byte-identical reports.
struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  int depth = 2;  // martingale depth n; `identities` reads it as the max Haar level
  std::string space = "lp:2:2";
  std::string target_space;  // empty: same as source
  bool space_set = false;    // true when --space was given explicitly
  bool target_space_set = false;
  std::string operator_file;  // empty: identity on the configured spaces
  std::string input_file;     // spread: document with an expansion and a sign pattern
  double tau_spec = kTauSpec;
  double tol_theorem = kTolHeuristic;
  double roundtrip = kRoundtripTol;
  int restarts = OptimizerBudget{}.restarts;
  int iterations = OptimizerBudget{}.iterations;
  std::int64_t pattern_cutoff = OptimizerBudget{}.pattern_cutoff;
  std::string format = "json";  // json | csv
  std::string out;              // empty: stdout

  /// Throws ConfigError on any out-of-range field.
  void validate() const;

  OptimizerBudget budget() const;
};

struct CommandResult {
  int exit_code;
  json report;
};

CommandResult cmd_identities(const RunConfig& cfg);
CommandResult cmd_spread(const RunConfig& cfg);
CommandResult cmd_estimate(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);

/// Renders the report in the configured format (trailing newline included).
std::string render(const RunConfig& cfg, const json& report);

/// Renders and writes to cfg.out or stdout. Throws ConfigError when the
/// output file cannot be written.
void write_report(const RunConfig& cfg, const json& report);

/// Runs a command end to end: validate, execute, emit the report, map
/// exceptions to exit codes (2 for configuration and parse problems, 1 for
/// assertion and certificate failures). Diagnostics go to stderr.
int run_command(const RunConfig& cfg, CommandResult (*command)(const RunConfig&));

}  // namespace umd::cli
