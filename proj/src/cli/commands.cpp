#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "elicit/cli.hpp"
#include "elicit/montecarlo.hpp"

namespace elicit::cli {
namespace {

// Command-line values; each one, when given, overwrites the matching config key.
struct Flags {
  std::string config_path;
  std::optional<std::string> prior;
  std::optional<std::string> cost_prior;
  std::optional<double> c;
  std::optional<double> delivery_cost;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::string> dump;

  std::optional<std::string> target;
  std::optional<double> margin;
  std::optional<double> delta;
  std::optional<double> u;
  std::optional<double> t;
  std::optional<double> p;

  std::optional<std::uint64_t> n_trials;
  std::optional<std::uint64_t> workers;
  std::optional<double> sigmas;

  std::optional<std::string> mode;
  std::optional<double> grid_step;
  std::optional<std::uint64_t> n_grid;
  std::optional<std::uint64_t> n_levels;
  std::optional<std::string> method;
  std::optional<double> c_target;
  std::optional<std::uint64_t> budget;
};

// "uniform:0:20", "triangular:0:20", "exponential:5", "two_point:0.3:10", or a JSON record.
Json prior_flag(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return Json::parse(text);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("bad prior JSON: ") + e.what());
    }
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad distribution spec '" + text + "'");
    }
  };
  const std::string family = parts.empty() ? "" : parts[0];
  if ((family == "uniform" || family == "triangular") && parts.size() == 3)
    return Json{{"family", family}, {"lo", num(1)}, {"hi", num(2)}};
  if (family == "exponential" && parts.size() == 2) return Json{{"family", family}, {"mean", num(1)}};
  if (family == "two_point" && parts.size() == 3) return Json{{"family", family}, {"q", num(1)}, {"high", num(2)}};
  throw ConfigError("bad distribution spec '" + text + "'");
}

Json load_record(const Flags& f) {
  Json record = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError("cannot read config file '" + f.config_path + "'");
    try {
      record = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    if (!record.is_object()) throw ConfigError("config must be a JSON object");
  }
  auto set = [&](const char* section, const char* key, const auto& value) {
    if (!value) return;
    Json& s = record[section];
    if (!s.is_object()) s = Json::object();
    s[key] = *value;
  };
  if (f.prior) record["prior"] = prior_flag(*f.prior);
  if (f.cost_prior) record["cost_prior"] = prior_flag(*f.cost_prior);
  if (f.format) record["output"] = *f.format;
  set("agent", "c", f.c);
  set("agent", "delivery_cost", f.delivery_cost);
  set("agent", "epsilon", f.epsilon);
  set("run", "seed", f.seed);
  set("run", "dump", f.dump);
  set("run", "n_trials", f.n_trials);
  set("run", "workers", f.workers);
  set("run", "sigmas", f.sigmas);
  set("design", "target", f.target);
  set("design", "margin", f.margin);
  set("design", "delta", f.delta);
  set("design", "u", f.u);
  set("design", "t", f.t);
  set("design", "p", f.p);
  set("optimize", "mode", f.mode);
  set("optimize", "grid_step", f.grid_step);
  set("optimize", "n_grid", f.n_grid);
  set("optimize", "n_levels", f.n_levels);
  set("optimize", "method", f.method);
  set("optimize", "c_target", f.c_target);
  set("optimize", "budget", f.budget);
  return record;
}

const ValueModel& require_model(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("a prior is required");
  return *cfg.model;
}

Json value_model_json(const ValueModel& model) {
  return std::visit(detail::Overloaded{
                        [](const CommonValue&) { return Json{{"kind", "common"}}; },
                        [](const ScaledValue& s) { return Json{{"kind", "scaled"}, {"a", s.a}}; },
                        [](const JointValue& j) { return Json{{"kind", "joint"}, {"reference_size", j.reference->size()}}; },
                    },
                    model.kind());
}

Json cmd_threshold(const ExperimentConfig& cfg) {
  const Prior& prior = agent_prior(require_model(cfg));
  const Money threshold = truthfulness_threshold(prior);
  Json doc{{"command", "threshold"},
           {"seed", cfg.run.seed},
           {"prior", prior_to_json(*cfg.prior)},
           {"value_model", value_model_json(*cfg.model)},
           {"mean", mean(prior)},
           {"threshold", threshold}};
  if (cfg.cost) {
    doc["c"] = *cfg.cost;
    doc["truthful"] = exists_truthful(prior, *cfg.cost);
  }
  return doc;
}

Json cmd_design(const ExperimentConfig& cfg) {
  const ValueModel& model = require_model(cfg);
  const Prior& prior = agent_prior(model);
  Json design = cfg.design;
  if (!design.contains("target")) design["target"] = "gc";
  const ReserveCdf g = design_cdf(design, cfg);
  const LossEstimate loss = principal_loss_general(g, model);
  Json doc{{"command", "design"},
           {"seed", cfg.run.seed},
           {"target", design.at("target")},
           {"cdf", cdf_to_json(g)},
           {"p", 1.0 - g.never_sell_mass()},
           {"u_coop", u_coop(g, prior)},
           {"u_heur", u_heur(g, prior)},
           {"u_net", u_net(g, prior)},
           {"threshold", truthfulness_threshold(prior)},
           {"principal_loss", loss.value}};
  if (!loss.exact) doc["principal_loss_se"] = loss.standard_error;
  if (design.at("target") == "gzu") {
    const Money u = design.at("u").get<double>();
    const Offer offer = optimal_offer(*cfg.cost_prior, prior, u);
    doc["u"] = u;
    doc["reserve_offer"] = offer.reserve_offer;
    doc["participation_prob"] = offer.participation_prob;
    doc["expected_loss"] = loss_for_offer(*cfg.cost_prior, offer.reserve_offer, u);
  }
  return doc;
}

struct SimulateResult {
  Json doc;
  bool pass;
};

SimulateResult cmd_simulate(const ExperimentConfig& cfg) {
  const ValueModel& model = require_model(cfg);
  if (!cfg.mechanism) throw ConfigError("simulate needs a mechanism");
  const MechanismSpec& spec = *cfg.mechanism;

  std::ofstream dump;
  OutcomeSink sink;
  if (cfg.run.dump_path) {
    dump.open(*cfg.run.dump_path);
    if (!dump) throw ConfigError("cannot write dump file '" + *cfg.run.dump_path + "'");
    sink = [&dump](std::uint64_t trial, const Outcome& o) {
      Json line = outcome_to_json(o);
      line["trial"] = trial;
      dump << line.dump() << '\n';
    };
  }
  const BatchResult batch = run_batch(spec, model, cfg.agent, cfg.run.n_trials, cfg.run.seed, cfg.run.workers, sink);
  const UtilityReport report = analyze(spec, model, cfg.agent);
  const EpsilonBudget budget = epsilon_budget(spec, model);
  const Comparison cmp = compare_to_analytic(batch, report, budget, cfg.run.sigmas);
  Json doc{{"command", "simulate"},
           {"seed", cfg.run.seed},
           {"batch", batch_to_json(batch)},
           {"analytic", report_to_json(report)},
           {"epsilon_budget", Json{{"money", budget.money}, {"rate", budget.rate}}},
           {"comparison", comparison_to_json(cmp)}};
  return {doc, cmp.pass()};
}

double opt_number(const Json& o, const char* key, double fallback) {
  if (!o.contains(key)) return fallback;
  if (!o.at(key).is_number()) throw ConfigError(std::string("optimize: '") + key + "' must be a number");
  return o.at(key).get<double>();
}

int opt_int(const Json& o, const char* key, int fallback) {
  const double v = opt_number(o, key, fallback);
  if (v < 1.0 || v > 1e7 || v != static_cast<int>(v))
    throw ConfigError(std::string("optimize: '") + key + "' must be a positive integer");
  return static_cast<int>(v);
}

Json cmd_optimize(const ExperimentConfig& cfg) {
  const ValueModel& model = require_model(cfg);
  const Prior& prior = agent_prior(model);
  const Json& o = cfg.optimize;
  const std::string mode = o.value("mode", std::string("steps"));
  const auto budget = static_cast<std::uint64_t>(opt_number(o, "budget", static_cast<double>(kDefaultSearchBudget)));
  Json doc{{"command", "optimize"}, {"seed", cfg.run.seed}, {"mode", mode}};

  if (mode == "steps") {
    const double step = opt_number(o, "grid_step", (prior.support_hi() - prior.support_lo()) / 1000.0);
    if (!(step > 0.0)) throw ConfigError("optimize: grid_step must be > 0");
    const StepOptimum best = optimize_unet_over_steps(prior, step);
    doc["t_star"] = best.t_star;
    doc["value"] = best.value;
    doc["threshold"] = truthfulness_threshold(prior);
  } else if (mode == "lattice") {
    const int n_grid = opt_int(o, "n_grid", 21);
    const int n_levels = opt_int(o, "n_levels", 2);
    if (n_levels < 2) throw ConfigError("optimize: n_levels must be >= 2");
    const std::string method = o.value("method", std::string("exhaustive"));
    LatticeMethod m;
    if (method == "exhaustive") m = LatticeMethod::kExhaustive;
    else if (method == "dp") m = LatticeMethod::kDynamicProgram;
    else throw ConfigError("optimize: method must be \"exhaustive\" or \"dp\"");
    const LatticeOptimum best = optimize_unet_over_lattice(prior, n_grid, n_levels, m, budget);
    doc["method"] = method;
    doc["value"] = best.value;
    doc["threshold"] = truthfulness_threshold(prior);
    doc["candidates"] = best.candidates;
    doc["grid"] = best.best.grid;
    doc["levels"] = best.best.levels;
    doc["n_levels"] = best.best.n_levels;
    doc["cdf"] = cdf_to_json(to_reserve_cdf(best.best));
  } else if (mode == "minloss") {
    const double target = opt_number(o, "c_target", cfg.cost.value_or(-1.0));
    if (target < 0.0) throw ConfigError("optimize minloss: needs c_target (or agent c) >= 0");
    const int n_grid = opt_int(o, "n_grid", 41);
    const int n_levels = opt_int(o, "n_levels", 201);
    const MinLossResult best = min_loss_search_general(model, target, n_grid, n_levels, budget);
    doc["c_target"] = target;
    doc["cdf"] = cdf_to_json(best.cdf);
    doc["loss"] = best.loss;
    doc["u_net"] = best.u_net;
    doc["grid_lower_bound"] = best.grid_lower_bound;
    doc["certified"] = best.certified;
  } else {
    throw ConfigError("optimize: mode must be steps, lattice or minloss");
  }
  return doc;
}

void flatten(const Json& node, const std::string& path, std::ostream& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) flatten(value, path.empty() ? key : path + "." + key, out);
    return;
  }
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) flatten(node[i], path + "." + std::to_string(i), out);
    return;
  }
  out << path << ',';
  if (node.is_string()) {
    const auto s = node.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) {
      out << s;
    } else {
      out << '"';
      for (char ch : s) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    }
  } else if (!node.is_null()) {
    out << node.dump();  // same text as the JSON output
  }
  out << '\n';
}

void emit(const Json& doc, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::kCsv) out << to_csv(doc);
  else out << doc.dump(2) << '\n';
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--prior", f.prior, "value prior: JSON record or family:params (uniform:0:20)");
  sub->add_option("--c", f.c, "computation cost");
  sub->add_option("--delivery-cost", f.delivery_cost, "delivery cost");
  sub->add_option("--epsilon", f.epsilon, "agent epsilon");
  sub->add_option("--seed", f.seed, "random seed (default 0)");
  sub->add_option("--format", f.format, "json or csv");
}

}  // namespace

std::string to_csv(const Json& doc) {
  std::ostringstream out;
  out << "# elicit-csv v1\nfield,value\n";
  flatten(doc, "", out);
  return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truthful value elicitation: thresholds, reserve design, simulation and search", "elicit"};
  app.require_subcommand(1);
  Flags f;

  auto* threshold = app.add_subcommand("threshold", "truthfulness threshold and verdict for a cost");
  add_common(threshold, f);

  auto* design = app.add_subcommand("design", "build a reserve cdf and its predicted utilities");
  add_common(design, f);
  design->add_option("--target", f.target, "gstar, gc, g0, step or gzu");
  design->add_option("--margin", f.margin, "gc: net utility above c");
  design->add_option("--delta", f.delta, "g0: sale mass at the support minimum");
  design->add_option("--u", f.u, "gzu: value of the information to the principal");
  design->add_option("--t", f.t, "step: location");
  design->add_option("--p", f.p, "step: sale probability");
  design->add_option("--cost-prior", f.cost_prior, "gzu: cost prior, JSON record or uniform:lo:hi");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo batch checked against the analytics");
  add_common(simulate, f);
  simulate->add_option("--n-trials", f.n_trials, "number of runs (default 1000000)");
  simulate->add_option("--workers", f.workers, "worker threads (default 1)");
  simulate->add_option("--sigmas", f.sigmas, "acceptance band in standard errors (default 3)");
  simulate->add_option("--dump", f.dump, "write per-run outcomes as JSON lines");

  auto* optimize = app.add_subcommand("optimize", "search reserve cdfs");
  add_common(optimize, f);
  optimize->add_option("--mode", f.mode, "steps, lattice or minloss");
  optimize->add_option("--grid-step", f.grid_step, "steps: spacing of step locations");
  optimize->add_option("--n-grid", f.n_grid, "lattice/minloss: grid points");
  optimize->add_option("--n-levels", f.n_levels, "lattice/minloss: cdf levels");
  optimize->add_option("--method", f.method, "lattice: exhaustive or dp");
  optimize->add_option("--c-target", f.c_target, "minloss: required net utility");
  optimize->add_option("--budget", f.budget, "maximum search size");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const ExperimentConfig cfg = parse_config(load_record(f));
    if (*threshold) {
      emit(cmd_threshold(cfg), cfg.format, out);
    } else if (*design) {
      emit(cmd_design(cfg), cfg.format, out);
    } else if (*simulate) {
      const SimulateResult r = cmd_simulate(cfg);
      emit(r.doc, cfg.format, out);
      if (!r.pass) {
        err << "error: simulated means disagree with the analytic values\n";
        return kComparisonFailed;
      }
    } else if (*optimize) {
      emit(cmd_optimize(cfg), cfg.format, out);
    }
  } catch (const ThresholdExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kThresholdExceeded;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << '\n';
    return kThresholdExceeded;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kSizeError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace elicit::cli
