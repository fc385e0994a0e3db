#include "elicit/agent.hpp"

#include <algorithm>
#include <cmath>

namespace elicit {
namespace {

// Relative tolerance under which two grid payoffs count as tied.
constexpr double kTieTolerance = 1e-12;

template <class Payoff>
Money grid_argmax(Money lo, Money hi, Money step, Money target, Payoff&& payoff) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  Money best_bid = lo;
  double best = payoff(lo);
  for (std::size_t i = 1; i <= n; ++i) {
    const Money b = std::min(hi, lo + static_cast<double>(i) * step);
    const double value = payoff(b);
    const double tol = kTieTolerance * std::max(1.0, std::abs(best));
    if (value > best + tol) {
      best = value;
      best_bid = b;
    } else if (value >= best - tol && std::abs(b - target) < std::abs(best_bid - target)) {
      best = std::max(best, value);
      best_bid = b;
    }
  }
  return best_bid;
}

}  // namespace

Money u_coop(const ReserveCdf& g, const Prior& agent_prior) {
  // E[Ĝ(v)] term by term: an atom at a contributes E[(v - a)+]; a uniform
  // piece on [lo, hi] contributes (E[(v - lo)+^2] - E[(v - hi)+^2]) / (2 (hi - lo)).
  double acc = 0.0;
  for (const auto& a : g.atoms()) {
    if (is_never_sell(a.location)) continue;
    acc += a.mass * expected_excess(agent_prior, a.location);
  }
  for (const auto& p : g.pieces()) {
    acc += p.mass * (expected_excess_sq(agent_prior, p.lo) - expected_excess_sq(agent_prior, p.hi)) /
           (2.0 * (p.hi - p.lo));
  }
  return acc;
}

Money u_heur(const ReserveCdf& g, const Prior& agent_prior) { return integral(g, mean(agent_prior)); }

Money u_net(const ReserveCdf& g, const Prior& agent_prior) { return u_coop(g, agent_prior) - u_heur(g, agent_prior); }

StrategyChoice choose_strategy(const ReserveCdf& g, const Prior& agent_prior, const AgentConfig& cfg) {
  const Money gap = u_net(g, agent_prior) - cfg.cost;
  return {gap > 0.0 ? Strategy::kCooperative : Strategy::kHeuristic, gap};
}

Money best_bid_secret_reserve(std::optional<Money> v_known, const Prior& agent_prior) {
  return v_known ? *v_known : mean(agent_prior);
}

Money secret_reserve_bid_payoff(const ReserveCdf& g, Probability epsilon, Money support_lo, Money support_hi,
                                Money v, Money b) {
  double uniform_part = 0.0;
  if (support_hi > support_lo) {
    const UniformPiece u{support_lo, support_hi, 1.0};
    const ReserveCdf unif({}, {u});
    uniform_part = derived_price_bid_payoff(unif, v, b);
  } else if (b >= support_lo) {
    uniform_part = v - support_lo;
  }
  return (1.0 - epsilon) * derived_price_bid_payoff(g, v, b) + epsilon * uniform_part;
}

Money best_bid_secret_reserve_grid(const ReserveCdf& g, Probability epsilon, const Prior& agent_prior, Money v,
                                   Money grid_step) {
  const Money lo = agent_prior.support_lo();
  const Money hi = agent_prior.support_hi();
  return grid_argmax(lo, hi, grid_step, v,
                     [&](Money b) { return secret_reserve_bid_payoff(g, epsilon, lo, hi, v, b); });
}

Money derived_price_bid_payoff(const ReserveCdf& g, Money v, Money b) { return eval(g, b) * (v - b) + integral(g, b); }

Money best_bid_derived_price(const ReserveCdf& g, std::optional<Money> v_known, const Prior& agent_prior,
                             Money grid_step) {
  const Money v = v_known ? *v_known : mean(agent_prior);
  return grid_argmax(agent_prior.support_lo(), agent_prior.support_hi(), grid_step, v,
                     [&](Money b) { return derived_price_bid_payoff(g, v, b); });
}

bool PostedPriceDecision::accepts(Money v_agent) const { return compute ? v_agent > price : accept_blind; }

PostedPriceDecision posted_price_decision(Money t, Probability p, const Prior& agent_prior, const AgentConfig& cfg) {
  const Money informed = p * expected_excess(agent_prior, t);
  const Money blind = p * std::max(0.0, mean(agent_prior) - t);
  return {informed - blind > cfg.cost, mean(agent_prior) > t, t};
}

}  // namespace elicit
