#pragma once

// JSON records for the library's external formats:
//   prior      {"family":"uniform","lo":0,"hi":20}, {"family":"triangular",...},
//              {"family":"exponential","mean":1}, {"family":"two_point","q":0.3,"high":10},
//              {"family":"empirical","samples":[...]}
//   reserve    {"atoms":[[loc,mass],...],"pieces":[[lo,hi,mass],...]}, "never" for the never-sell location
//   outcome    one object per run (JSON-lines batch dumps)
//   batch      BatchResult, UtilityReport, Comparison

#include <json.hpp>

#include "elicit/analysis.hpp"
#include "elicit/mechanism.hpp"
#include "elicit/montecarlo.hpp"
#include "elicit/prior.hpp"
#include "elicit/reserve_cdf.hpp"

namespace elicit {

using Json = nlohmann::json;

/// Throws ConfigError on a key outside `allowed` or a non-object record.
void require_keys(const Json& record, std::initializer_list<const char*> allowed, const char* what);

Json prior_to_json(const Prior& prior);
Prior prior_from_json(const Json& record);

Json cdf_to_json(const ReserveCdf& g);
ReserveCdf cdf_from_json(const Json& record);

Json money_or_never(Money x);

Json outcome_to_json(const Outcome& o);
Json batch_to_json(const BatchResult& b);
Json report_to_json(const UtilityReport& r);
Json comparison_to_json(const Comparison& c);

}  // namespace elicit
