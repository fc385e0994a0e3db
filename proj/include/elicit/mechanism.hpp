#pragma once

#include <optional>
#include <variant>

#include "elicit/agent.hpp"
#include "elicit/core.hpp"
#include "elicit/reserve_cdf.hpp"
#include "elicit/value_model.hpp"

namespace elicit {

/// Secret reserve r drawn from the epsilon-mixture of G and the uniform law
/// on the value support; the agent bids b and buys at r iff b >= r.
struct SecretReserve {
  Probability epsilon = 0.0;
  ReserveCdf g = ReserveCdf::never_sell();
};

/// The agent bids b and buys with probability G(b) at b - Ĝ(b)/G(b).
struct BidDerivedPrice {
  ReserveCdf g = ReserveCdf::never_sell();
  /// Unset: the agent bids its best response in closed form (v, or E[v]
  /// when uninformed). Set: the agent searches a bid grid of this step.
  std::optional<Money> bid_grid_step;
};

/// Posted price t, sold with probability p on acceptance; when nothing sold,
/// a secret-reserve round with the delta cdf of an informed agent follows.
struct PostedPrice {
  Money t = 0.0;
  Probability p = 0.0;
  Probability delta = 0.0;
  Probability fallback_epsilon = 0.0;
};

struct MechanismSpec {
  std::variant<SecretReserve, BidDerivedPrice, PostedPrice> kind;
  /// Secret reserve only, with a cdf of the form p at E[v] plus never-sell:
  /// the reserve is drawn from the unit step and only a fraction p is sold.
  bool fractional_sale = false;
  /// Paid by the principal to the agent on participation.
  Money delivery_cost_reimbursed = 0.0;
};

/// One settled run.
struct Outcome {
  Money value_principal = 0.0;
  Money value_agent = 0.0;
  bool computed = false;
  std::optional<Money> bid;
  std::optional<Money> reserve;  // may hold kNeverSell
  double sold_fraction = 0.0;
  Money price_paid = 0.0;
  Money trade_surplus = 0.0;         // agent: v_a * fraction - price
  Money principal_trade_loss = 0.0;  // principal: v_p * fraction - price
  Money agent_utility = 0.0;         // trade surplus - c if computed + reimbursement - delivery cost
  Money principal_loss = 0.0;        // trade loss + reimbursement
  bool info_elicited = false;
};

/// A mechanism bound to a value model and an agent. Validation and the
/// agent's (configuration-only) strategy choice happen once here; `run` then
/// only draws values and the mechanism's own randomness.
class PreparedMechanism {
 public:
  /// Throws ConfigError on an invalid combination.
  PreparedMechanism(MechanismSpec spec, ValueModel model, AgentConfig cfg);

  /// Draw (v_p, v_a) and settle. Draw order: values, then the mechanism's
  /// randomness (reserve; or sale lottery; or lottery then fallback reserve).
  Outcome run(Rng& rng) const;

  /// Settle with the values given.
  Outcome settle(const ValuePair& values, Rng& rng) const;

  const MechanismSpec& spec() const { return spec_; }
  const ValueModel& model() const { return model_; }
  const AgentConfig& agent() const { return cfg_; }
  /// Whether the agent pays to learn v (fixed by the configuration).
  bool computes() const { return computes_; }

 private:
  MechanismSpec spec_;
  ValueModel model_;
  AgentConfig cfg_;
  bool computes_ = false;
  Money agent_mean_ = 0.0;
  Money support_lo_ = 0.0;
  Money support_hi_ = 0.0;
  ReserveCdf draw_cdf_ = ReserveCdf::never_sell();  // cdf the reserve is actually drawn from
  double fraction_ = 1.0;
  PostedPriceDecision posted_{};
};

Outcome run_secret_reserve(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg, Rng& rng);
Outcome run_bid_derived(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg, Rng& rng);
Outcome run_posted_price(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg, Rng& rng);

// Deterministic settlement from fixed draws.

/// Sale iff bid >= reserve; pays fraction * reserve for `fraction` of the object.
Outcome settle_secret_reserve(const ValuePair& values, bool computed, Money bid, Money reserve, double fraction,
                              const MechanismSpec& spec, const AgentConfig& cfg);

/// Sale (when `lottery_won`) at b - Ĝ(b)/G(b); no sale when G(b) = 0.
Outcome settle_bid_derived(const ValuePair& values, bool computed, Money bid, bool lottery_won, const ReserveCdf& g,
                           const MechanismSpec& spec, const AgentConfig& cfg);

/// Step-3 sale at t when accepted and the lottery is won; otherwise the
/// fallback round sells at `fallback_reserve` iff `fallback_bid` clears it.
Outcome settle_posted_price(const ValuePair& values, bool computed, bool accepted, bool lottery_won,
                            Money fallback_bid, Money fallback_reserve, const MechanismSpec& spec,
                            const AgentConfig& cfg);

}  // namespace elicit
