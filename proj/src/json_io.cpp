#include "elicit/json_io.hpp"

#include <string>

namespace elicit {
namespace {

using detail::Overloaded;

double number(const Json& record, const char* key, const char* what) {
  if (!record.contains(key) || !record.at(key).is_number())
    throw ConfigError(std::string(what) + ": missing numeric field '" + key + "'");
  return record.at(key).get<double>();
}

Money location_from_json(const Json& x) {
  if (x.is_string() && x.get<std::string>() == "never") return kNeverSell;
  if (!x.is_number()) throw ConfigError("reserve location must be a number or \"never\"");
  return x.get<double>();
}

}  // namespace

void require_keys(const Json& record, std::initializer_list<const char*> allowed, const char* what) {
  if (!record.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : record.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

Json prior_to_json(const Prior& prior) {
  return std::visit(Overloaded{
                        [](const UniformFamily& u) { return Json{{"family", "uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
                        [](const TriangularFamily& t) {
                          return Json{{"family", "triangular"}, {"lo", t.lo}, {"hi", t.hi}};
                        },
                        [](const ExponentialFamily& e) { return Json{{"family", "exponential"}, {"mean", e.mean}}; },
                        [](const TwoPointFamily& t) {
                          return Json{{"family", "two_point"}, {"q", t.q}, {"high", t.high}};
                        },
                        [](const EmpiricalFamily& e) { return Json{{"family", "empirical"}, {"samples", *e.sorted}}; },
                    },
                    prior.family());
}

Prior prior_from_json(const Json& record) {
  if (!record.is_object() || !record.contains("family") || !record.at("family").is_string())
    throw ConfigError("prior needs a string 'family'");
  const auto family = record.at("family").get<std::string>();
  try {
    if (family == "uniform") {
      require_keys(record, {"family", "lo", "hi"}, "uniform prior");
      return Prior::uniform(number(record, "lo", "uniform prior"), number(record, "hi", "uniform prior"));
    }
    if (family == "triangular") {
      require_keys(record, {"family", "lo", "hi"}, "triangular prior");
      return Prior::triangular(number(record, "lo", "triangular prior"), number(record, "hi", "triangular prior"));
    }
    if (family == "exponential") {
      require_keys(record, {"family", "mean"}, "exponential prior");
      return Prior::exponential(number(record, "mean", "exponential prior"));
    }
    if (family == "two_point") {
      require_keys(record, {"family", "q", "high"}, "two-point prior");
      return Prior::two_point(number(record, "q", "two-point prior"), number(record, "high", "two-point prior"));
    }
    if (family == "empirical") {
      require_keys(record, {"family", "samples"}, "empirical prior");
      if (!record.contains("samples") || !record.at("samples").is_array())
        throw ConfigError("empirical prior needs a 'samples' array");
      return Prior::empirical(record.at("samples").get<std::vector<double>>());
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown prior family '" + family + "'");
}

Json money_or_never(Money x) { return is_never_sell(x) ? Json("never") : Json(x); }

Json cdf_to_json(const ReserveCdf& g) {
  Json atoms = Json::array();
  for (const auto& a : g.atoms()) atoms.push_back(Json::array({money_or_never(a.location), a.mass}));
  Json pieces = Json::array();
  for (const auto& p : g.pieces()) pieces.push_back(Json::array({p.lo, p.hi, p.mass}));
  return Json{{"atoms", atoms}, {"pieces", pieces}};
}

ReserveCdf cdf_from_json(const Json& record) {
  require_keys(record, {"atoms", "pieces"}, "reserve cdf");
  std::vector<Atom> atoms;
  std::vector<UniformPiece> pieces;
  try {
    if (record.contains("atoms")) {
      for (const auto& a : record.at("atoms")) {
        if (!a.is_array() || a.size() != 2) throw ConfigError("reserve atom must be [location, mass]");
        atoms.push_back({location_from_json(a[0]), a[1].get<double>()});
      }
    }
    if (record.contains("pieces")) {
      for (const auto& p : record.at("pieces")) {
        if (!p.is_array() || p.size() != 3) throw ConfigError("reserve piece must be [lo, hi, mass]");
        pieces.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      }
    }
    return ReserveCdf(std::move(atoms), std::move(pieces));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(e.what());
  }
}

Json outcome_to_json(const Outcome& o) {
  Json j{{"value_principal", o.value_principal},
         {"value_agent", o.value_agent},
         {"computed", o.computed},
         {"bid", o.bid ? Json(*o.bid) : Json(nullptr)},
         {"reserve", o.reserve ? money_or_never(*o.reserve) : Json(nullptr)},
         {"sold_fraction", o.sold_fraction},
         {"price_paid", o.price_paid},
         {"trade_surplus", o.trade_surplus},
         {"principal_trade_loss", o.principal_trade_loss},
         {"agent_utility", o.agent_utility},
         {"principal_loss", o.principal_loss},
         {"info_elicited", o.info_elicited}};
  return j;
}

Json batch_to_json(const BatchResult& b) {
  auto est = [](const MeanEstimate& m) { return Json{{"mean", m.mean}, {"se", m.standard_error}}; };
  return Json{{"n_trials", b.n_trials},
              {"seed", b.seed},
              {"workers", b.workers},
              {"agent_utility", est(b.agent_utility)},
              {"principal_loss", est(b.principal_loss)},
              {"sale_rate", est(b.sale_rate)},
              {"info_elicited_rate", est(b.info_elicited_rate)}};
}

Json report_to_json(const UtilityReport& r) {
  return Json{{"u_coop", r.u_coop},
              {"u_heur", r.u_heur},
              {"u_net", r.u_net},
              {"principal_loss", r.principal_loss},
              {"truthful", r.truthful},
              {"threshold", r.threshold},
              {"expected_agent_utility", r.expected_agent_utility},
              {"expected_principal_loss", r.expected_principal_loss},
              {"expected_sale_rate", r.expected_sale_rate},
              {"expected_info_rate", r.expected_info_rate}};
}

Json comparison_to_json(const Comparison& c) {
  Json fields = Json::object();
  for (const auto& f : c.fields) {
    fields[f.field] = Json{{"simulated", f.simulated},
                           {"se", f.standard_error},
                           {"analytic", f.analytic},
                           {"tolerance", f.tolerance},
                           {"pass", f.pass}};
  }
  return Json{{"pass", c.pass()}, {"fields", fields}};
}

}  // namespace elicit
