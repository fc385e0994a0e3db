#include "elicit/mechanism.hpp"

#include <cmath>

namespace elicit {
namespace {

using detail::Overloaded;

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

void finish(Outcome& out, const MechanismSpec& spec, const AgentConfig& cfg) {
  out.trade_surplus = out.value_agent * out.sold_fraction - out.price_paid;
  out.principal_trade_loss = out.value_principal * out.sold_fraction - out.price_paid;
  out.agent_utility = out.trade_surplus - (out.computed ? cfg.cost : 0.0) + spec.delivery_cost_reimbursed -
                      cfg.delivery_cost;
  out.principal_loss = out.principal_trade_loss + spec.delivery_cost_reimbursed;
}

// Share of the object sold per sale when a step-shaped cdf is sold fractionally.
double fractional_share(const ReserveCdf& g) {
  if (!g.pieces().empty()) throw ConfigError("fractional sale needs a cdf without uniform pieces");
  const auto& atoms = g.atoms();
  const bool shaped = (atoms.size() == 1 && !is_never_sell(atoms[0].location)) ||
                      (atoms.size() == 2 && !is_never_sell(atoms[0].location) && is_never_sell(atoms[1].location));
  if (!shaped) throw ConfigError("fractional sale needs one finite step plus never-sell mass");
  return atoms[0].mass;
}

}  // namespace

PreparedMechanism::PreparedMechanism(MechanismSpec spec, ValueModel model, AgentConfig cfg)
    : spec_(std::move(spec)), model_(std::move(model)), cfg_(cfg) {
  if (!(cfg_.cost >= 0.0) || !(cfg_.delivery_cost >= 0.0)) throw ConfigError("agent costs must be >= 0");
  if (!is_probability(cfg_.epsilon)) throw ConfigError("agent epsilon must lie in [0, 1]");
  if (!(spec_.delivery_cost_reimbursed >= 0.0)) throw ConfigError("delivery reimbursement must be >= 0");

  const Prior& prior = agent_prior(model_);
  agent_mean_ = mean(prior);
  support_lo_ = prior.support_lo();
  support_hi_ = prior.support_hi();

  std::visit(Overloaded{
                 [&](const SecretReserve& m) {
                   if (!is_probability(m.epsilon)) throw ConfigError("epsilon must lie in [0, 1]");
                   computes_ = choose_strategy(m.g, prior, cfg_).kind == Strategy::kCooperative;
                   draw_cdf_ = m.g;
                   if (spec_.fractional_sale) {
                     fraction_ = fractional_share(m.g);
                     draw_cdf_ = ReserveCdf::step(m.g.atoms()[0].location);
                   }
                 },
                 [&](const BidDerivedPrice& m) {
                   if (spec_.fractional_sale) throw ConfigError("fractional sale applies to the secret reserve only");
                   if (m.bid_grid_step && !(*m.bid_grid_step > 0.0)) throw ConfigError("bid grid step must be > 0");
                   computes_ = choose_strategy(m.g, prior, cfg_).kind == Strategy::kCooperative;
                   draw_cdf_ = m.g;
                 },
                 [&](const PostedPrice& m) {
                   if (spec_.fractional_sale) throw ConfigError("fractional sale applies to the secret reserve only");
                   if (!is_probability(m.p) || !is_probability(m.delta) || !is_probability(m.fallback_epsilon))
                     throw ConfigError("posted price probabilities must lie in [0, 1]");
                   if (!(m.t >= support_lo_ && m.t <= support_hi_))
                     throw ConfigError("posted price must lie within the value support");
                   posted_ = posted_price_decision(m.t, m.p, prior, cfg_);
                   computes_ = posted_.compute;
                   draw_cdf_ = make_g0(support_lo_, support_hi_, m.delta);
                 },
             },
             spec_.kind);
}

Outcome PreparedMechanism::run(Rng& rng) const { return settle(sample_pair(model_, rng), rng); }

Outcome PreparedMechanism::settle(const ValuePair& values, Rng& rng) const {
  const Money informed_bid = computes_ ? values.agent : agent_mean_;
  return std::visit(
      Overloaded{
          [&](const SecretReserve& m) {
            const Money reserve = sample_reserve(draw_cdf_, m.epsilon, support_lo_, support_hi_, rng);
            return settle_secret_reserve(values, computes_, informed_bid, reserve, fraction_, spec_, cfg_);
          },
          [&](const BidDerivedPrice& m) {
            Money bid = informed_bid;
            if (m.bid_grid_step) {
              const auto known = computes_ ? std::optional<Money>(values.agent) : std::nullopt;
              bid = best_bid_derived_price(m.g, known, agent_prior(model_), *m.bid_grid_step);
            }
            const bool won = uniform01(rng) < eval(m.g, bid);
            return settle_bid_derived(values, computes_, bid, won, m.g, spec_, cfg_);
          },
          [&](const PostedPrice& m) {
            const bool accepted = posted_.accepts(values.agent);
            const bool won = uniform01(rng) < m.p;
            Money fallback_reserve = kNeverSell;
            if (!(accepted && won))
              fallback_reserve = sample_reserve(draw_cdf_, m.fallback_epsilon, support_lo_, support_hi_, rng);
            return settle_posted_price(values, computes_, accepted, won, informed_bid, fallback_reserve, spec_, cfg_);
          },
      },
      spec_.kind);
}

Outcome run_secret_reserve(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg, Rng& rng) {
  if (!std::holds_alternative<SecretReserve>(spec.kind)) throw ConfigError("expected a secret-reserve mechanism");
  return PreparedMechanism(spec, model, cfg).run(rng);
}

Outcome run_bid_derived(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg, Rng& rng) {
  if (!std::holds_alternative<BidDerivedPrice>(spec.kind)) throw ConfigError("expected a bid-derived-price mechanism");
  return PreparedMechanism(spec, model, cfg).run(rng);
}

Outcome run_posted_price(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg, Rng& rng) {
  if (!std::holds_alternative<PostedPrice>(spec.kind)) throw ConfigError("expected a posted-price mechanism");
  return PreparedMechanism(spec, model, cfg).run(rng);
}

Outcome settle_secret_reserve(const ValuePair& values, bool computed, Money bid, Money reserve, double fraction,
                              const MechanismSpec& spec, const AgentConfig& cfg) {
  Outcome out;
  out.value_principal = values.principal;
  out.value_agent = values.agent;
  out.computed = computed;
  out.info_elicited = computed;
  out.bid = bid;
  out.reserve = reserve;
  if (!is_never_sell(reserve) && bid >= reserve) {
    out.sold_fraction = fraction;
    out.price_paid = fraction * reserve;
  }
  finish(out, spec, cfg);
  return out;
}

Outcome settle_bid_derived(const ValuePair& values, bool computed, Money bid, bool lottery_won, const ReserveCdf& g,
                           const MechanismSpec& spec, const AgentConfig& cfg) {
  Outcome out;
  out.value_principal = values.principal;
  out.value_agent = values.agent;
  out.computed = computed;
  out.info_elicited = computed;
  out.bid = bid;
  const Probability sale_prob = eval(g, bid);
  if (lottery_won && sale_prob > 0.0) {
    out.sold_fraction = 1.0;
    out.price_paid = bid - integral(g, bid) / sale_prob;
  }
  finish(out, spec, cfg);
  return out;
}

Outcome settle_posted_price(const ValuePair& values, bool computed, bool accepted, bool lottery_won,
                            Money fallback_bid, Money fallback_reserve, const MechanismSpec& spec,
                            const AgentConfig& cfg) {
  const auto& m = std::get<PostedPrice>(spec.kind);
  Outcome out;
  out.value_principal = values.principal;
  out.value_agent = values.agent;
  out.computed = computed;
  if (accepted && lottery_won) {
    out.sold_fraction = 1.0;
    out.price_paid = m.t;
    out.reserve = m.t;
  } else {
    // Fallback round: an agent that computed already knows v and reveals it.
    out.bid = fallback_bid;
    out.reserve = fallback_reserve;
    out.info_elicited = computed;
    if (!is_never_sell(fallback_reserve) && fallback_bid >= fallback_reserve) {
      out.sold_fraction = 1.0;
      out.price_paid = fallback_reserve;
    }
  }
  finish(out, spec, cfg);
  return out;
}

}  // namespace elicit
