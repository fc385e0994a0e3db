#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "elicit/core.hpp"
#include "elicit/prior.hpp"

namespace elicit {

struct ValuePair {
  Money principal;
  Money agent;
};

/// v_a = v_p.
struct CommonValue {
  Prior prior;
};

/// v_a = a * v_p.
struct ScaledValue {
  Prior principal_prior;
  double a;
};

/// Arbitrary dependence, given only through a sampler. A reference sample
/// of pairs is drawn once at construction; every analytic quantity for a
/// joint model is an average over that sample.
struct JointValue {
  using Sampler = std::function<ValuePair(Rng&)>;
  Sampler sampler;
  std::shared_ptr<const std::vector<ValuePair>> reference;
};

/// Relationship between the principal's and the agent's value.
class ValueModel {
 public:
  using Kind = std::variant<CommonValue, ScaledValue, JointValue>;

  static ValueModel common(Prior prior);
  static ValueModel scaled(Prior principal_prior, double a);
  /// Draws `reference_size` pairs with `seed` to build the reference sample.
  static ValueModel joint(JointValue::Sampler sampler, std::size_t reference_size, std::uint64_t seed);

  const Kind& kind() const { return kind_; }
  bool is_common() const { return std::holds_alternative<CommonValue>(kind_); }

 private:
  explicit ValueModel(Kind kind, Prior agent) : kind_(std::move(kind)), agent_prior_(std::move(agent)) {}

  Kind kind_;
  Prior agent_prior_;

  friend const Prior& agent_prior(const ValueModel& model);
};

/// Marginal law of v_a. Closed form for common and scaled models, the
/// empirical law of the reference sample for joint models.
const Prior& agent_prior(const ValueModel& model);

ValuePair sample_pair(const ValueModel& model, Rng& rng);

/// E[v_p] - E[v_a].
Money mean_value_gap(const ValueModel& model);

/// E[(v_p - v_a) * 1{v_a >= x}] (inclusive) or with 1{v_a > x} (strict).
/// This is the correction term between the agent's surplus and the
/// principal's loss when a sale happens whenever v_a clears x.
Money value_gap_above(const ValueModel& model, Money x, bool inclusive = true);

}  // namespace elicit
