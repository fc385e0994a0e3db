#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elicit/analysis.hpp"
#include "elicit/json_io.hpp"
#include "elicit/mechanism.hpp"
#include "elicit/value_model.hpp"

namespace elicit::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kThresholdExceeded = 3,
  kComparisonFailed = 4,
  kSizeError = 5,
};

enum class OutputFormat { kJson, kCsv };

struct RunParams {
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double sigmas = 3.0;
  std::optional<std::string> dump_path;  // JSON-lines per-run outcomes
};

/// A fully validated experiment. Built from the JSON config record after flag
/// overrides have been merged into it.
struct ExperimentConfig {
  std::optional<Prior> prior;
  std::optional<ValueModel> model;
  std::optional<Money> cost;  // agent.c, absent when not given
  AgentConfig agent;
  std::optional<MechanismSpec> mechanism;
  std::optional<CostPrior> cost_prior;
  Json design;    // design record (target and its parameters)
  Json optimize;  // optimize record
  RunParams run;
  OutputFormat format = OutputFormat::kJson;
};

/// Parses and validates a config record; throws ConfigError (unknown keys
/// included), ThresholdExceeded from embedded cdf designs.
ExperimentConfig parse_config(const Json& record);

/// Builds a reserve cdf from a design record such as {"target":"gc","c":200,"margin":1}.
ReserveCdf design_cdf(const Json& design, const ExperimentConfig& cfg);

/// Flattens a JSON document into the fixed two-column CSV layout.
std::string to_csv(const Json& doc);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elicit::cli
