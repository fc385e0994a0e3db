#include "elicit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace elicit {
namespace {

using detail::Overloaded;

std::vector<Money> linspace(Money lo, Money hi, int n) {
  std::vector<Money> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  if (n > 1) xs.back() = hi;
  return xs;
}

// Net utility per unit of reserve mass at x: E[(v - x)+] - (E[v] - x)+.
Money unit_step_unet(const Prior& prior, Money mean_v, Money x) {
  return expected_excess(prior, x) - std::max(0.0, mean_v - x);
}

// E[v (v - x)+].
double excess_times_value(const Prior& prior, Money x) {
  return expected_excess_sq(prior, x) + x * expected_excess(prior, x);
}

// E[(v_p - v_a) G(v_a)]: the gap between principal loss and agent surplus.
Money gap_weighted_sale(const ReserveCdf& g, const ValueModel& model) {
  return std::visit(
      Overloaded{
          [](const CommonValue&) { return 0.0; },
          [&](const ScaledValue& m) {
            const Prior& pa = agent_prior(model);
            double acc = 0.0;
            for (const auto& a : g.atoms())
              if (!is_never_sell(a.location)) acc += a.mass * value_gap_above(model, a.location, true);
            for (const auto& p : g.pieces())
              acc += p.mass * (1.0 / m.a - 1.0) * (excess_times_value(pa, p.lo) - excess_times_value(pa, p.hi)) /
                     (p.hi - p.lo);
            return acc;
          },
          [&](const JointValue& m) {
            double acc = 0.0;
            for (const auto& pair : *m.reference) acc += (pair.principal - pair.agent) * eval(g, pair.agent);
            return acc / static_cast<double>(m.reference->size());
          },
      },
      model.kind());
}

// E[G(v_a)], right-continuous: the sale probability of a truthful bidder.
Probability expected_sale_prob(const ReserveCdf& g, const Prior& pa) {
  double acc = 0.0;
  for (const auto& a : g.atoms())
    if (!is_never_sell(a.location)) acc += a.mass * (1.0 - cdf_left(pa, a.location));
  for (const auto& p : g.pieces())
    acc += p.mass * (expected_excess(pa, p.lo) - expected_excess(pa, p.hi)) / (p.hi - p.lo);
  return acc;
}

Money principal_value_ceiling(const ValueModel& model) {
  return std::visit(Overloaded{
                        [](const CommonValue& m) { return m.prior.support_hi(); },
                        [](const ScaledValue& m) { return m.principal_prior.support_hi(); },
                        [](const JointValue& m) {
                          Money hi = 0.0;
                          for (const auto& p : *m.reference) hi = std::max(hi, std::abs(p.principal));
                          return hi;
                        },
                    },
                    model.kind());
}

}  // namespace

bool exists_truthful(const Prior& prior, Money c) {
  if (!(c >= 0.0)) throw DomainError("cost must be >= 0");
  return c < truthfulness_threshold(prior);
}

Money principal_loss_common(const ReserveCdf& g, const Prior& prior) { return u_coop(g, prior); }

LossEstimate principal_loss_general(const ReserveCdf& g, const ValueModel& model) {
  if (const auto* joint = std::get_if<JointValue>(&model.kind())) {
    const auto& ref = *joint->reference;
    double mean_acc = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (const auto& pair : ref) {
      const double x = integral(g, pair.agent) + (pair.principal - pair.agent) * eval(g, pair.agent);
      ++n;
      const double delta = x - mean_acc;
      mean_acc += delta / static_cast<double>(n);
      m2 += delta * (x - mean_acc);
    }
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean_acc, std::sqrt(var / static_cast<double>(n)), false};
  }
  return {u_coop(g, agent_prior(model)) + gap_weighted_sale(g, model), 0.0, true};
}

ReserveCdf design_min_loss_cdf(const Prior& prior, Money c, Money margin) {
  if (!(margin > 0.0)) throw DomainError("margin must be positive");
  if (!(c >= 0.0)) throw DomainError("cost must be >= 0");
  return make_gc(prior, c + margin);
}

StepOptimum optimize_unet_over_steps(const Prior& prior, Money grid_step) {
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  const Money lo = prior.support_lo();
  const Money hi = prior.support_hi();
  const Money mean_v = mean(prior);
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / grid_step + 1e-9));
  StepOptimum best{lo, unit_step_unet(prior, mean_v, lo)};
  for (std::size_t i = 1; i <= n; ++i) {
    const Money t = std::min(hi, lo + static_cast<double>(i) * grid_step);
    const Money value = unit_step_unet(prior, mean_v, t);
    if (value > best.value) best = {t, value};
  }
  return best;
}

ReserveCdf to_reserve_cdf(const LatticeCdf& lattice) {
  const double q = lattice.n_levels - 1;
  std::vector<Atom> atoms;
  int prev = 0;
  for (std::size_t i = 0; i < lattice.grid.size(); ++i) {
    atoms.push_back({lattice.grid[i], (lattice.levels[i] - prev) / q});
    prev = lattice.levels[i];
  }
  atoms.push_back({kNeverSell, (lattice.n_levels - 1 - prev) / q});
  return ReserveCdf(std::move(atoms), {});
}

std::uint64_t lattice_size(int n_grid, int n_levels) {
  // C(n + k, k) with k = n_levels - 1, built so each partial product is exact.
  const unsigned __int128 cap = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 r = 1;
  for (int i = 1; i < n_levels; ++i) {
    r = r * static_cast<unsigned>(n_grid + i) / static_cast<unsigned>(i);
    if (r > cap) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

LatticeOptimum optimize_unet_over_lattice(const Prior& prior, int n_grid, int n_levels, LatticeMethod method,
                                          std::uint64_t budget) {
  if (n_grid < 1 || n_levels < 2) throw DomainError("lattice needs n_grid >= 1 and n_levels >= 2");
  const auto grid = linspace(prior.support_lo(), prior.support_hi(), n_grid);
  const Money mean_v = mean(prior);
  const double q = n_levels - 1;

  // u_net = sum_i (G_i - G_{i-1}) w_i = sum_i G_i (w_i - w_{i+1}).
  std::vector<double> w(grid.size() + 1, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = unit_step_unet(prior, mean_v, grid[i]);
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) d[i] = (w[i] - w[i + 1]) / q;

  LatticeOptimum out{0.0, {grid, std::vector<int>(grid.size(), 0), n_levels}, 0};

  if (method == LatticeMethod::kExhaustive) {
    const std::uint64_t total = lattice_size(n_grid, n_levels);
    if (total > budget) throw SizeError("lattice has " + std::to_string(total) + " candidates, over budget");
    std::vector<int> levels(grid.size(), 0);
    double best = -std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, int, double)> walk = [&](std::size_t i, int floor_level, double acc) {
      if (i == grid.size()) {
        ++out.candidates;
        if (acc > best) {
          best = acc;
          out.best.levels = levels;
        }
        return;
      }
      for (int k = floor_level; k < n_levels; ++k) {
        levels[i] = k;
        walk(i + 1, k, acc + k * d[i]);
      }
    };
    walk(0, 0, 0.0);
    out.value = best;
    return out;
  }

  const auto cells = static_cast<std::uint64_t>(n_grid) * static_cast<std::uint64_t>(n_levels);
  if (cells > budget) throw SizeError("lattice dynamic program has " + std::to_string(cells) + " cells, over budget");
  const auto n = grid.size();
  const auto levels = static_cast<std::size_t>(n_levels);
  // value[i][k]: best sum over prefixes ending at level k; from[i][k]: level at i-1.
  std::vector<std::vector<double>> value(n, std::vector<double>(levels));
  std::vector<std::vector<int>> from(n, std::vector<int>(levels, 0));
  for (std::size_t k = 0; k < levels; ++k) value[0][k] = static_cast<double>(k) * d[0];
  for (std::size_t i = 1; i < n; ++i) {
    double run_best = -std::numeric_limits<double>::infinity();
    int run_arg = 0;
    for (std::size_t k = 0; k < levels; ++k) {
      if (value[i - 1][k] > run_best) {
        run_best = value[i - 1][k];
        run_arg = static_cast<int>(k);
      }
      value[i][k] = run_best + static_cast<double>(k) * d[i];
      from[i][k] = run_arg;
    }
  }
  out.candidates = cells;
  auto last = std::max_element(value[n - 1].begin(), value[n - 1].end());
  out.value = *last;
  int k = static_cast<int>(last - value[n - 1].begin());
  for (std::size_t i = n; i-- > 0;) {
    out.best.levels[i] = k;
    k = from[i][k];
  }
  return out;
}

MinLossResult min_loss_search_general(const ValueModel& model, Money c_target, int n_grid, int n_levels,
                                      std::uint64_t budget) {
  if (n_grid < 1 || n_levels < 2) throw DomainError("search needs n_grid >= 1 and n_levels >= 2");
  if (!(c_target >= 0.0)) throw DomainError("target net utility must be >= 0");
  const auto work = static_cast<std::uint64_t>(n_grid) * static_cast<std::uint64_t>(n_grid) *
                    static_cast<std::uint64_t>(n_levels);
  if (work > budget) throw SizeError("min-loss search needs " + std::to_string(work) + " evaluations, over budget");

  const Prior& pa = agent_prior(model);
  const Money mean_v = mean(pa);
  const auto grid = linspace(pa.support_lo(), pa.support_hi(), n_grid);
  const auto n = grid.size();
  std::vector<double> w(n);
  std::vector<double> loss(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = unit_step_unet(pa, mean_v, grid[i]);
    loss[i] = expected_excess(pa, grid[i]) + value_gap_above(model, grid[i], true);
  }
  const double slack = 1e-12 * std::max(1.0, c_target);
  if (*std::max_element(w.begin(), w.end()) < c_target - slack)
    throw Infeasible("no cdf on the grid reaches the target net utility");

  // Continuous relaxation: a linear program over {m >= 0, sum m <= 1,
  // sum m w >= c}; its minimum sits on a vertex with at most two atoms.
  double lower = std::numeric_limits<double>::infinity();
  if (c_target <= 0.0) lower = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0.0 && c_target / w[i] <= 1.0) lower = std::min(lower, c_target / w[i] * loss[i]);
    if (w[i] >= c_target) lower = std::min(lower, loss[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w[i] == w[j]) continue;
      const double mi = (c_target - w[j]) / (w[i] - w[j]);
      if (mi >= 0.0 && mi <= 1.0) lower = std::min(lower, mi * loss[i] + (1.0 - mi) * loss[j]);
    }
  }

  // Lattice search over two-atom cdfs; for fixed (i, k_i) the objective is
  // linear in k_j, so only the smallest feasible and the largest k_j matter.
  const int quanta = n_levels - 1;
  const double unit = 1.0 / quanta;
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  std::size_t bj = 0;
  int bki = 0;
  int bkj = 0;
  auto consider = [&](std::size_t i, int ki, std::size_t j, int kj) {
    const double u = ki * unit * w[i] + kj * unit * w[j];
    if (u < c_target - slack) return;
    const double l = ki * unit * loss[i] + kj * unit * loss[j];
    if (l < best) {
      best = l;
      bi = i;
      bj = j;
      bki = ki;
      bkj = kj;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (int ki = 0; ki <= quanta; ++ki) {
      consider(i, ki, i, 0);
      const int room = quanta - ki;
      if (room == 0) continue;
      const double residual = c_target - ki * unit * w[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        int kmin = 0;
        if (residual > 0.0) {
          if (w[j] <= 0.0) continue;
          kmin = static_cast<int>(std::ceil(residual / (w[j] * unit) - 1e-9));
          kmin = std::max(kmin, 0);
        }
        if (kmin > room) continue;
        consider(i, ki, j, kmin);
        if (kmin < room) consider(i, ki, j, kmin + 1);
        consider(i, ki, j, room);
      }
    }
  }
  if (!std::isfinite(best)) throw Infeasible("no lattice cdf reaches the target net utility");

  std::vector<Atom> atoms{{grid[bi], bki * unit}};
  if (bj != bi) atoms.push_back({grid[bj], bkj * unit});
  const int used = bki + (bj != bi ? bkj : 0);
  atoms.push_back({kNeverSell, (quanta - used) * unit});
  ReserveCdf cdf(std::move(atoms), {});
  const Money achieved = u_net(cdf, pa);
  const Money realized_loss = principal_loss_general(cdf, model).value;
  return {std::move(cdf), realized_loss, achieved, lower, false};
}

// ---------------------------------------------------------------------------

CostPrior CostPrior::uniform(Money lo, Money hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi))
    throw DomainError("uniform cost prior needs 0 <= lo < hi");
  return CostPrior(UniformCost{lo, hi}, lo, hi);
}

CostPrior CostPrior::empirical(std::vector<Money> samples, Money bandwidth) {
  if (samples.size() < 2) throw DomainError("empirical cost prior needs at least two samples");
  for (Money c : samples)
    if (!(std::isfinite(c) && c >= 0.0)) throw DomainError("cost samples must be finite and >= 0");
  std::sort(samples.begin(), samples.end());
  const Money lo = samples.front();
  const Money hi = samples.back();
  if (!(lo < hi)) throw DomainError("empirical cost prior needs distinct samples");
  if (!(bandwidth > 0.0)) bandwidth = (hi - lo) / 20.0;
  return CostPrior(EmpiricalCost{std::make_shared<const std::vector<Money>>(std::move(samples)), bandwidth}, lo, hi);
}

Probability CostPrior::cdf(Money c) const {
  return std::visit(Overloaded{
                        [&](const UniformCost& u) { return std::clamp((c - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
                        [&](const EmpiricalCost& e) {
                          const auto& xs = *e.sorted;
                          return static_cast<double>(std::upper_bound(xs.begin(), xs.end(), c) - xs.begin()) /
                                 static_cast<double>(xs.size());
                        },
                    },
                    family_);
}

Probability CostPrior::cdf_left(Money c) const {
  return std::visit(Overloaded{
                        [&](const UniformCost&) { return cdf(c); },
                        [&](const EmpiricalCost& e) {
                          const auto& xs = *e.sorted;
                          return static_cast<double>(std::lower_bound(xs.begin(), xs.end(), c) - xs.begin()) /
                                 static_cast<double>(xs.size());
                        },
                    },
                    family_);
}

double CostPrior::pdf(Money c) const {
  if (c < lo_ || c > hi_) return 0.0;
  return std::visit(Overloaded{
                        [&](const UniformCost& u) { return 1.0 / (u.hi - u.lo); },
                        [&](const EmpiricalCost& e) {
                          const Money a = std::max(c - e.bandwidth, lo_);
                          const Money b = std::min(c + e.bandwidth, hi_);
                          return (cdf(b) - cdf_left(a)) / (b - a);
                        },
                    },
                    family_);
}

Money virtual_cost(const CostPrior& cost_prior, Money c) {
  if (!(c >= cost_prior.lo() && c <= cost_prior.hi())) throw DomainError("cost outside the cost prior's support");
  const double h = cost_prior.pdf(c);
  if (!(h > 0.0)) throw DomainError("cost density vanishes; virtual cost undefined");
  return c + cost_prior.cdf(c) / h;
}

void check_regular(const CostPrior& cost_prior, int points) {
  const auto grid = linspace(cost_prior.lo(), cost_prior.hi(), std::max(points, 2));
  double prev = -std::numeric_limits<double>::infinity();
  for (Money c : grid) {
    double z = 0.0;
    try {
      z = virtual_cost(cost_prior, c);
    } catch (const DomainError& e) {
      throw RegularityError(std::string("virtual cost undefined on the support: ") + e.what());
    }
    if (!(z > prev)) throw RegularityError("virtual cost is not strictly increasing");
    prev = z;
  }
}

Offer optimal_offer(const CostPrior& cost_prior, const Prior& value_prior, Money u) {
  if (!(u >= 0.0)) throw DomainError("information value must be >= 0");
  check_regular(cost_prior);
  Money offer = 0.0;
  if (u <= virtual_cost(cost_prior, cost_prior.lo())) {
    offer = 0.0;
  } else if (u >= virtual_cost(cost_prior, cost_prior.hi())) {
    offer = cost_prior.hi();
  } else {
    Money lo = cost_prior.lo();
    Money hi = cost_prior.hi();
    while (hi - lo > 1e-10) {
      const Money mid = 0.5 * (lo + hi);
      if (virtual_cost(cost_prior, mid) < u)
        lo = mid;
      else
        hi = mid;
    }
    offer = 0.5 * (lo + hi);
  }
  const Money threshold = truthfulness_threshold(value_prior);
  double p = 0.0;
  if (offer > 0.0) {
    if (!(threshold > 0.0) || offer > threshold * (1.0 + 1e-12))
      throw ThresholdExceeded("offer exceeds the truthfulness threshold of the value prior");
    p = std::min(1.0, offer / threshold);
  }
  return {offer, p, scale_by_sale_prob(make_gstar(value_prior), p)};
}

Money loss_for_offer(const CostPrior& cost_prior, Money offer, Money u) {
  const Probability accept = cost_prior.cdf_left(offer);
  return accept * offer + (1.0 - accept) * u;
}

Money expected_loss_unknown_cost(const CostPrior& cost_prior, const Prior& value_prior, Money u) {
  return loss_for_offer(cost_prior, optimal_offer(cost_prior, value_prior, u).reserve_offer, u);
}

// ---------------------------------------------------------------------------

UtilityReport analyze(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg) {
  const Prior& pa = agent_prior(model);
  const Money mean_a = mean(pa);
  const Money mean_p = mean_a + mean_value_gap(model);
  const Money transfers = spec.delivery_cost_reimbursed - cfg.delivery_cost;

  UtilityReport r;
  r.threshold = truthfulness_threshold(pa);

  if (const auto* posted = std::get_if<PostedPrice>(&spec.kind)) {
    const Money t = posted->t;
    const double p = posted->p;
    const double delta = posted->delta;
    const Money lo = pa.support_lo();
    const Money excess = expected_excess(pa, t);
    const Probability above = 1.0 - cdf(pa, t);
    r.u_coop = p * excess;
    r.u_heur = p * std::max(0.0, mean_a - t);
    r.u_net = r.u_coop - r.u_heur;
    r.principal_loss = p * (excess + value_gap_above(model, t, false));
    r.truthful = r.u_net > cfg.cost;

    const auto decision = posted_price_decision(t, p, pa, cfg);
    if (decision.compute) {
      // Fallback sells at the support bottom with probability delta whenever
      // step 3 did not sell.
      const Money agent_above_lo = excess + (t - lo) * above;  // E[(v_a - lo) 1{v_a > t}]
      const Money fb_agent = delta * ((mean_a - lo) - p * agent_above_lo);
      const Money fb_principal = delta * ((mean_p - lo) - p * (agent_above_lo + value_gap_above(model, t, false)));
      r.expected_agent_utility = r.u_coop + fb_agent - cfg.cost + transfers;
      r.expected_principal_loss = r.principal_loss + fb_principal + spec.delivery_cost_reimbursed;
      r.expected_sale_rate = p * above + delta * (1.0 - p * above);
      r.expected_info_rate = 1.0 - p * above;
    } else {
      const double sold3 = decision.accept_blind ? p : 0.0;
      r.expected_agent_utility = sold3 * (mean_a - t) + delta * (1.0 - sold3) * (mean_a - lo) + transfers;
      r.expected_principal_loss =
          sold3 * (mean_p - t) + delta * (1.0 - sold3) * (mean_p - lo) + spec.delivery_cost_reimbursed;
      r.expected_sale_rate = sold3 + delta * (1.0 - sold3);
      r.expected_info_rate = 0.0;
    }
    return r;
  }

  const ReserveCdf& g = std::visit(Overloaded{
                                       [](const SecretReserve& m) -> const ReserveCdf& { return m.g; },
                                       [](const BidDerivedPrice& m) -> const ReserveCdf& { return m.g; },
                                       [](const PostedPrice&) -> const ReserveCdf& { throw ConfigError("unreachable"); },
                                   },
                                   spec.kind);
  r.u_coop = u_coop(g, pa);
  r.u_heur = u_heur(g, pa);
  r.u_net = r.u_coop - r.u_heur;
  r.principal_loss = r.u_coop + gap_weighted_sale(g, model);
  r.truthful = r.u_net > cfg.cost;
  if (r.truthful) {
    r.expected_agent_utility = r.u_coop - cfg.cost + transfers;
    r.expected_principal_loss = r.principal_loss + spec.delivery_cost_reimbursed;
    r.expected_sale_rate = expected_sale_prob(g, pa);
    r.expected_info_rate = 1.0;
  } else {
    const Probability sale = eval(g, mean_a);
    r.expected_agent_utility = r.u_heur + transfers;
    r.expected_principal_loss = r.u_heur + (mean_p - mean_a) * sale + spec.delivery_cost_reimbursed;
    r.expected_sale_rate = sale;
    r.expected_info_rate = 0.0;
  }
  return r;
}

EpsilonBudget epsilon_budget(const MechanismSpec& spec, const ValueModel& model) {
  const double eps = std::visit(Overloaded{
                                    [](const SecretReserve& m) { return m.epsilon; },
                                    [](const BidDerivedPrice&) { return 0.0; },
                                    [](const PostedPrice& m) { return m.fallback_epsilon; },
                                },
                                spec.kind);
  const Money span = agent_prior(model).support_hi() + principal_value_ceiling(model);
  return {eps * span, eps};
}

}  // namespace elicit
