#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "elicit/analysis.hpp"
#include "elicit/mechanism.hpp"

namespace elicit {

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(n)

  bool operator==(const MeanEstimate&) const = default;
};

struct BatchResult {
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  MeanEstimate agent_utility;
  MeanEstimate principal_loss;
  MeanEstimate sale_rate;  // mean sold fraction: the sale frequency for whole-object sales
  MeanEstimate info_elicited_rate;

  bool operator==(const BatchResult&) const = default;
};

/// Called once per trial, in trial order, when a batch runs sequentially.
using OutcomeSink = std::function<void(std::uint64_t trial, const Outcome&)>;

/// Runs n_trials independent settlements. Trial i draws from its own stream
/// seeded by substream_seed(seed, i), so the set of outcomes does not depend
/// on `workers`; with workers = 1 the reduction is sequential and the result
/// is bit-reproducible. A sink forces sequential execution.
/// Throws ConfigError on an invalid configuration.
BatchResult run_batch(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg,
                      std::uint64_t n_trials, std::uint64_t seed, unsigned workers = 1,
                      const OutcomeSink& sink = {});

struct FieldVerdict {
  std::string field;
  double simulated;
  double standard_error;
  double analytic;
  double tolerance;
  bool pass;
};

struct Comparison {
  std::vector<FieldVerdict> fields;
  bool pass() const;
};

/// Each simulated mean must sit within `sigmas` standard errors of the
/// analytic value, widened by the epsilon budget.
Comparison compare_to_analytic(const BatchResult& batch, const UtilityReport& report, const EpsilonBudget& budget,
                               double sigmas = 3.0);

}  // namespace elicit
