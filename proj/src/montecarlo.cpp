#include "elicit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace elicit {
namespace {

// Welford accumulator; partial results merge with Chan's update.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    n = total;
  }

  MeanEstimate estimate() const {
    const double var = n > 1.0 ? m2 / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
  }
};

struct Tally {
  Moments agent;
  Moments principal;
  Moments sale;
  Moments info;

  void add(const Outcome& o) {
    agent.add(o.agent_utility);
    principal.add(o.principal_loss);
    sale.add(o.sold_fraction);  // share of the object transferred; 0/1 unless sold fractionally
    info.add(o.info_elicited ? 1.0 : 0.0);
  }

  void merge(const Tally& t) {
    agent.merge(t.agent);
    principal.merge(t.principal);
    sale.merge(t.sale);
    info.merge(t.info);
  }
};

Tally run_range(const PreparedMechanism& mech, std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                const OutcomeSink* sink) {
  Tally tally;
  for (std::uint64_t i = begin; i < end; ++i) {
    Rng rng(substream_seed(seed, i));
    const Outcome o = mech.run(rng);
    if (sink) (*sink)(i, o);
    tally.add(o);
  }
  return tally;
}

}  // namespace

BatchResult run_batch(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg,
                      std::uint64_t n_trials, std::uint64_t seed, unsigned workers, const OutcomeSink& sink) {
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  const PreparedMechanism mech(spec, model, cfg);

  Tally total;
  if (workers == 1 || sink) {
    total = run_range(mech, seed, 0, n_trials, sink ? &sink : nullptr);
  } else {
    const std::uint64_t parts = std::min<std::uint64_t>(workers, n_trials);
    std::vector<Tally> partial(parts);
    std::vector<std::thread> threads;
    for (std::uint64_t w = 0; w < parts; ++w) {
      const std::uint64_t begin = n_trials * w / parts;
      const std::uint64_t end = n_trials * (w + 1) / parts;
      threads.emplace_back([&, w, begin, end] { partial[w] = run_range(mech, seed, begin, end, nullptr); });
    }
    for (auto& t : threads) t.join();
    for (const auto& p : partial) total.merge(p);
  }

  BatchResult r;
  r.n_trials = n_trials;
  r.seed = seed;
  r.workers = sink ? 1 : workers;
  r.agent_utility = total.agent.estimate();
  r.principal_loss = total.principal.estimate();
  r.sale_rate = total.sale.estimate();
  r.info_elicited_rate = total.info.estimate();
  return r;
}

bool Comparison::pass() const {
  return std::all_of(fields.begin(), fields.end(), [](const FieldVerdict& f) { return f.pass; });
}

Comparison compare_to_analytic(const BatchResult& batch, const UtilityReport& report, const EpsilonBudget& budget,
                               double sigmas) {
  Comparison c;
  auto check = [&](const char* name, const MeanEstimate& sim, double analytic, double slack) {
    const double tol = sigmas * sim.standard_error + slack + 1e-12 * std::max(1.0, std::abs(analytic));
    c.fields.push_back({name, sim.mean, sim.standard_error, analytic, tol, std::abs(sim.mean - analytic) <= tol});
  };
  check("agent_utility", batch.agent_utility, report.expected_agent_utility, budget.money);
  check("principal_loss", batch.principal_loss, report.expected_principal_loss, budget.money);
  check("sale_rate", batch.sale_rate, report.expected_sale_rate, budget.rate);
  check("info_elicited_rate", batch.info_elicited_rate, report.expected_info_rate, budget.rate);
  return c;
}

}  // namespace elicit
