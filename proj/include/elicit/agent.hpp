#pragma once

#include <optional>

#include "elicit/core.hpp"
#include "elicit/prior.hpp"
#include "elicit/reserve_cdf.hpp"

namespace elicit {

struct AgentConfig {
  Money cost = 0.0;           // cost of computing v
  Money delivery_cost = 0.0;  // reimbursed by the principal on participation
  Probability epsilon = 0.0;  // the mechanism's epsilon as known to the agent
};

enum class Strategy { kCooperative, kHeuristic };

struct StrategyChoice {
  Strategy kind;
  Money expected_gain_gap;  // u_net - cost
};

/// Expected trade surplus when the agent learns v and bids it: E[Ĝ(v)].
Money u_coop(const ReserveCdf& g, const Prior& agent_prior);

/// Expected trade surplus when the agent bids E[v] blind: Ĝ(E[v]).
Money u_heur(const ReserveCdf& g, const Prior& agent_prior);

/// Value of computing: u_coop - u_heur. Never negative, since Ĝ is convex.
Money u_net(const ReserveCdf& g, const Prior& agent_prior);

/// Cooperative iff u_net exceeds the computation cost. Delivery cost does not
/// enter: the principal reimburses it.
StrategyChoice choose_strategy(const ReserveCdf& g, const Prior& agent_prior, const AgentConfig& cfg);

/// Truthful bid when v is known, the prior mean otherwise.
Money best_bid_secret_reserve(std::optional<Money> v_known, const Prior& agent_prior);

/// Expected trade surplus of bidding b with value v when the reserve is drawn
/// from the epsilon-mixture of g and the uniform law on [support_lo, support_hi].
Money secret_reserve_bid_payoff(const ReserveCdf& g, Probability epsilon, Money support_lo, Money support_hi,
                                Money v, Money b);

/// Grid argmax of secret_reserve_bid_payoff over bids in the prior's support.
/// Ties go to the bid closest to v.
Money best_bid_secret_reserve_grid(const ReserveCdf& g, Probability epsilon, const Prior& agent_prior, Money v,
                                   Money grid_step);

/// Expected surplus of bidding b under the bid-derived price rule:
/// G(b) (v - b) + Ĝ(b).
Money derived_price_bid_payoff(const ReserveCdf& g, Money v, Money b);

/// Grid argmax of derived_price_bid_payoff over the prior's support, with v
/// the known value or the prior mean. Ties go to the truthful bid.
Money best_bid_derived_price(const ReserveCdf& g, std::optional<Money> v_known, const Prior& agent_prior,
                             Money grid_step);

struct PostedPriceDecision {
  bool compute;
  /// When computing: accept iff v_a > t. Otherwise this fixed answer, taken
  /// from E[v_a] > t.
  bool accept_blind;
  Money price;

  bool accepts(Money v_agent) const;  // for an agent that computed
};

/// Compute iff p E[max(0, v_a - t)] - p max(0, E[v_a] - t) > cost.
PostedPriceDecision posted_price_decision(Money t, Probability p, const Prior& agent_prior, const AgentConfig& cfg);

}  // namespace elicit
