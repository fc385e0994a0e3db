#include <cmath>
#include <string>

#include "elicit/cli.hpp"

namespace elicit::cli {
namespace {

double number_or(const Json& record, const char* key, double fallback) {
  if (!record.contains(key)) return fallback;
  const Json& x = record.at(key);
  if (!x.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double v = x.get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string("'") + key + "' must be finite");
  return v;
}

double number(const Json& record, const char* key, const char* what) {
  if (!record.contains(key)) throw ConfigError(std::string(what) + ": missing '" + key + "'");
  return number_or(record, key, 0.0);
}

std::uint64_t count_or(const Json& record, const char* key, std::uint64_t fallback) {
  if (!record.contains(key)) return fallback;
  const Json& x = record.at(key);
  if (x.is_number_unsigned()) return x.get<std::uint64_t>();
  if (x.is_number_float()) {
    const double v = x.get<double>();
    if (v >= 0.0 && v < 1.8e19 && std::floor(v) == v) return static_cast<std::uint64_t>(v);
  }
  throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
}

bool flag_or(const Json& record, const char* key, bool fallback) {
  if (!record.contains(key)) return fallback;
  if (!record.at(key).is_boolean()) throw ConfigError(std::string("'") + key + "' must be true or false");
  return record.at(key).get<bool>();
}

std::string string_field(const Json& record, const char* key, const char* what) {
  if (!record.contains(key) || !record.at(key).is_string())
    throw ConfigError(std::string(what) + ": missing string '" + key + "'");
  return record.at(key).get<std::string>();
}

ValueModel parse_value_model(const Json& record, const Prior& prior) {
  const auto kind = string_field(record, "kind", "value_model");
  if (kind == "common") {
    require_keys(record, {"kind"}, "common value model");
    return ValueModel::common(prior);
  }
  if (kind == "scaled") {
    require_keys(record, {"kind", "a"}, "scaled value model");
    const double a = number(record, "a", "scaled value model");
    if (!(a > 0.0)) throw ConfigError("scaled value model: a must be > 0");
    return ValueModel::scaled(prior, a);
  }
  if (kind == "joint") {
    // v_a = max(0, a v_p + n - E[n]) with n drawn from the noise prior.
    require_keys(record, {"kind", "a", "noise", "reference_size", "reference_seed"}, "joint value model");
    const double a = number_or(record, "a", 1.0);
    if (!(a > 0.0)) throw ConfigError("joint value model: a must be > 0");
    if (!record.contains("noise")) throw ConfigError("joint value model: missing 'noise' prior");
    const Prior noise = prior_from_json(record.at("noise"));
    const std::uint64_t size = count_or(record, "reference_size", 100'000);
    if (size < 2) throw ConfigError("joint value model: reference_size must be >= 2");
    const std::uint64_t seed = count_or(record, "reference_seed", 0);
    const Money noise_mean = mean(noise);
    auto sampler = [prior, noise, a, noise_mean](Rng& rng) {
      const Money vp = sample(prior, rng);
      const Money va = std::max(0.0, a * vp + sample(noise, rng) - noise_mean);
      return ValuePair{vp, va};
    };
    return ValueModel::joint(sampler, size, seed);
  }
  throw ConfigError("unknown value_model kind '" + kind + "'");
}

CostPrior parse_cost_prior(const Json& record) {
  const auto family = string_field(record, "family", "cost_prior");
  try {
    if (family == "uniform") {
      require_keys(record, {"family", "lo", "hi"}, "uniform cost prior");
      return CostPrior::uniform(number(record, "lo", "cost_prior"), number(record, "hi", "cost_prior"));
    }
    if (family == "empirical") {
      require_keys(record, {"family", "samples", "bandwidth"}, "empirical cost prior");
      if (!record.contains("samples") || !record.at("samples").is_array())
        throw ConfigError("empirical cost prior needs a 'samples' array");
      return CostPrior::empirical(record.at("samples").get<std::vector<double>>(),
                                  number_or(record, "bandwidth", 0.0));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown cost_prior family '" + family + "'");
}

void check_design_keys(const Json& record) {
  require_keys(record, {"target", "c", "margin", "delta", "u", "t", "p", "never_sell_at_support_max"}, "design");
}

MechanismSpec parse_mechanism(const Json& record, const ExperimentConfig& cfg) {
  const auto kind = string_field(record, "kind", "mechanism");
  MechanismSpec spec;
  auto cdf = [&]() -> ReserveCdf {
    if (!record.contains("cdf")) throw ConfigError("mechanism: missing 'cdf'");
    const Json& g = record.at("cdf");
    if (g.is_object() && g.contains("target")) return design_cdf(g, cfg);
    return cdf_from_json(g);
  };
  if (kind == "secret_reserve") {
    require_keys(record, {"kind", "epsilon", "cdf", "fractional_sale", "delivery_cost_reimbursed"},
                 "secret_reserve mechanism");
    spec.kind = SecretReserve{number_or(record, "epsilon", 0.0), cdf()};
    spec.fractional_sale = flag_or(record, "fractional_sale", false);
  } else if (kind == "bid_derived") {
    require_keys(record, {"kind", "cdf", "bid_grid_step", "delivery_cost_reimbursed"}, "bid_derived mechanism");
    BidDerivedPrice m{cdf(), std::nullopt};
    if (record.contains("bid_grid_step")) m.bid_grid_step = number(record, "bid_grid_step", "bid_derived");
    spec.kind = m;
  } else if (kind == "posted_price") {
    require_keys(record, {"kind", "t", "p", "delta", "fallback_epsilon", "delivery_cost_reimbursed"},
                 "posted_price mechanism");
    spec.kind = PostedPrice{number(record, "t", "posted_price"), number(record, "p", "posted_price"),
                            number_or(record, "delta", 0.0), number_or(record, "fallback_epsilon", 0.0)};
  } else {
    throw ConfigError("unknown mechanism kind '" + kind + "'");
  }
  spec.delivery_cost_reimbursed = number_or(record, "delivery_cost_reimbursed", 0.0);
  return spec;
}

}  // namespace

ReserveCdf design_cdf(const Json& design, const ExperimentConfig& cfg) {
  check_design_keys(design);
  if (!cfg.model) throw ConfigError("design needs a prior");
  const Prior& prior = agent_prior(*cfg.model);
  const auto target = string_field(design, "target", "design");
  const auto placement = flag_or(design, "never_sell_at_support_max", false) ? NeverSellPlacement::kAtSupportMax
                                                                              : NeverSellPlacement::kAboveSupport;
  try {
    if (target == "gstar") return make_gstar(prior);
    if (target == "gc") {
      const double c = design.contains("c") ? number(design, "c", "design") : cfg.cost.value_or(-1.0);
      if (c < 0.0) throw ConfigError("design gc: needs a cost c >= 0");
      const double margin = number_or(design, "margin", 0.0);
      if (margin < 0.0) throw ConfigError("design gc: margin must be >= 0");
      return make_gc(prior, c + margin, placement);
    }
    if (target == "g0")
      return make_g0(prior.support_lo(), prior.support_hi(), number_or(design, "delta", 0.0), placement);
    if (target == "step") {
      const double p = number_or(design, "p", 1.0);
      return scale_by_sale_prob(ReserveCdf::step(number(design, "t", "design step")), p);
    }
    if (target == "gzu") {
      if (!cfg.cost_prior) throw ConfigError("design gzu: needs a cost_prior");
      return optimal_offer(*cfg.cost_prior, prior, number(design, "u", "design gzu")).g;
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown design target '" + target + "'");
}

ExperimentConfig parse_config(const Json& record) {
  require_keys(record, {"prior", "value_model", "agent", "mechanism", "cost_prior", "design", "optimize", "run", "output"},
               "config");
  ExperimentConfig cfg;
  if (record.contains("prior")) cfg.prior = prior_from_json(record.at("prior"));

  if (record.contains("value_model")) {
    if (!cfg.prior) throw ConfigError("value_model needs a prior");
    cfg.model = parse_value_model(record.at("value_model"), *cfg.prior);
  } else if (cfg.prior) {
    cfg.model = ValueModel::common(*cfg.prior);
  }

  if (record.contains("agent")) {
    const Json& a = record.at("agent");
    require_keys(a, {"c", "delivery_cost", "epsilon"}, "agent");
    if (a.contains("c")) {
      cfg.cost = number(a, "c", "agent");
      if (*cfg.cost < 0.0) throw ConfigError("agent: c must be >= 0");
    }
    cfg.agent.delivery_cost = number_or(a, "delivery_cost", 0.0);
    cfg.agent.epsilon = number_or(a, "epsilon", 0.0);
    if (cfg.agent.delivery_cost < 0.0) throw ConfigError("agent: delivery_cost must be >= 0");
    if (cfg.agent.epsilon < 0.0) throw ConfigError("agent: epsilon must be >= 0");
  }
  cfg.agent.cost = cfg.cost.value_or(0.0);

  if (record.contains("cost_prior")) cfg.cost_prior = parse_cost_prior(record.at("cost_prior"));

  if (record.contains("design")) {
    cfg.design = record.at("design");
    check_design_keys(cfg.design);
  } else {
    cfg.design = Json::object();
  }
  if (record.contains("optimize")) {
    cfg.optimize = record.at("optimize");
    require_keys(cfg.optimize, {"mode", "grid_step", "n_grid", "n_levels", "method", "c_target", "budget"},
                 "optimize");
  } else {
    cfg.optimize = Json::object();
  }

  if (record.contains("run")) {
    const Json& r = record.at("run");
    require_keys(r, {"n_trials", "seed", "workers", "sigmas", "dump"}, "run");
    cfg.run.n_trials = count_or(r, "n_trials", cfg.run.n_trials);
    if (cfg.run.n_trials < 1) throw ConfigError("run: n_trials must be >= 1");
    cfg.run.seed = count_or(r, "seed", 0);
    const auto workers = count_or(r, "workers", 1);
    if (workers < 1 || workers > 4096) throw ConfigError("run: workers must be in [1, 4096]");
    cfg.run.workers = static_cast<unsigned>(workers);
    cfg.run.sigmas = number_or(r, "sigmas", 3.0);
    if (!(cfg.run.sigmas > 0.0)) throw ConfigError("run: sigmas must be > 0");
    if (r.contains("dump")) cfg.run.dump_path = string_field(r, "dump", "run");
  }

  if (record.contains("output")) {
    const Json& o = record.at("output");
    if (o == "json") cfg.format = OutputFormat::kJson;
    else if (o == "csv") cfg.format = OutputFormat::kCsv;
    else throw ConfigError("output must be \"json\" or \"csv\"");
  }

  if (record.contains("mechanism")) {
    if (!cfg.model) throw ConfigError("mechanism needs a prior");
    cfg.mechanism = parse_mechanism(record.at("mechanism"), cfg);
  }
  return cfg;
}

}  // namespace elicit::cli
