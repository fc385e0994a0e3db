#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "elicit/agent.hpp"
#include "elicit/core.hpp"
#include "elicit/mechanism.hpp"
#include "elicit/prior.hpp"
#include "elicit/reserve_cdf.hpp"
#include "elicit/value_model.hpp"

namespace elicit {

inline constexpr std::uint64_t kDefaultSearchBudget = 10'000'000;

// ---------------------------------------------------------------------------
// Truthfulness and loss with known cost

/// A truthful reserve cdf exists iff c is strictly below the threshold.
bool exists_truthful(const Prior& prior, Money c);

/// Expected loss under cooperative play in the common-value setting, E[Ĝ(v)].
/// Equal to u_coop: the game is zero-sum.
Money principal_loss_common(const ReserveCdf& g, const Prior& prior);

struct LossEstimate {
  Money value;
  Money standard_error;  // 0 when exact
  bool exact;
};

/// E[Ĝ(v_a) + (v_p - v_a) G(v_a)]. Exact for common and scaled models; for
/// joint models the average over the model's reference sample, with its SE.
LossEstimate principal_loss_general(const ReserveCdf& g, const ValueModel& model);

/// c + margin worth of net utility at minimal loss: make_gc at c + margin.
/// Throws ThresholdExceeded when c + margin exceeds the threshold.
ReserveCdf design_min_loss_cdf(const Prior& prior, Money c, Money margin);

// ---------------------------------------------------------------------------
// Searches over reserve cdfs

struct StepOptimum {
  Money t_star;
  Money value;
};

/// Brute-force maximum of u_net over unit steps on a grid of step locations.
StepOptimum optimize_unet_over_steps(const Prior& prior, Money grid_step);

enum class LatticeMethod { kExhaustive, kDynamicProgram };

/// Monotone cdf on a point grid: levels[i] = G(grid[i]) / (n_levels - 1).
struct LatticeCdf {
  std::vector<Money> grid;
  std::vector<int> levels;
  int n_levels;
};

/// Atoms at the grid points carrying the level increments; the remaining mass
/// never sells.
ReserveCdf to_reserve_cdf(const LatticeCdf& lattice);

struct LatticeOptimum {
  Money value;
  LatticeCdf best;
  std::uint64_t candidates;  // cdfs enumerated, or DP cells visited
};

/// Number of monotone level sequences: C(n_grid + n_levels - 1, n_levels - 1),
/// saturating at UINT64_MAX.
std::uint64_t lattice_size(int n_grid, int n_levels);

/// Maximum of u_net over monotone cdfs on n_grid evenly spaced support points
/// with values in an n_levels lattice. The exhaustive method enumerates every
/// candidate; the dynamic program exploits linearity in the increments.
/// Throws SizeError when the work exceeds `budget`.
LatticeOptimum optimize_unet_over_lattice(const Prior& prior, int n_grid, int n_levels,
                                          LatticeMethod method = LatticeMethod::kDynamicProgram,
                                          std::uint64_t budget = kDefaultSearchBudget);

struct MinLossResult {
  ReserveCdf cdf;
  Money loss;
  Money u_net;
  /// Exact minimum over all cdfs supported on the grid (continuous masses);
  /// a lower bound for `loss`.
  Money grid_lower_bound;
  bool certified;  // always false: the lattice search is a heuristic
};

/// Minimize E[Ĝ(v_a)] + E[(v_p - v_a) G(v_a)] subject to u_net >= c_target,
/// over cdfs with at most two atoms on an n_grid-point grid and masses in an
/// n_levels lattice (plus never-sell). Throws Infeasible when no grid cdf
/// reaches c_target, SizeError when n_grid^2 n_levels exceeds the budget.
MinLossResult min_loss_search_general(const ValueModel& model, Money c_target, int n_grid, int n_levels,
                                      std::uint64_t budget = kDefaultSearchBudget);

// ---------------------------------------------------------------------------
// Unknown computation cost

struct UniformCost {
  Money lo;
  Money hi;
};

/// Cost samples; H is the empirical cdf and h a centred finite difference of
/// H over `bandwidth` (one-sided at the support edges).
struct EmpiricalCost {
  std::shared_ptr<const std::vector<Money>> sorted;
  Money bandwidth;
};

class CostPrior {
 public:
  using Family = std::variant<UniformCost, EmpiricalCost>;

  static CostPrior uniform(Money lo, Money hi);
  /// bandwidth <= 0 picks (max - min) / 20.
  static CostPrior empirical(std::vector<Money> samples, Money bandwidth = 0.0);

  const Family& family() const { return family_; }
  Money lo() const { return lo_; }
  Money hi() const { return hi_; }

  Probability cdf(Money c) const;       // H(c) = P(cost <= c)
  Probability cdf_left(Money c) const;  // P(cost < c)
  double pdf(Money c) const;            // h(c)

 private:
  CostPrior(Family family, Money lo, Money hi) : family_(std::move(family)), lo_(lo), hi_(hi) {}

  Family family_;
  Money lo_;
  Money hi_;
};

/// z(c) = c + H(c) / h(c). Throws DomainError outside the support or where h = 0.
Money virtual_cost(const CostPrior& cost_prior, Money c);

/// Throws RegularityError unless z is strictly increasing on a grid of
/// `points` points over the cost support.
void check_regular(const CostPrior& cost_prior, int points = 10'000);

struct Offer {
  Money reserve_offer;             // R: the agent participates iff c < R
  Probability participation_prob;  // p = R / threshold
  ReserveCdf g;                    // p at E[v], never-sell otherwise
};

/// Optimal take-it-or-leave-it offer for information worth u to the principal:
/// R = 0 below z(c_min), z^{-1}(u) in range (bisection to 1e-10), c_max above.
Offer optimal_offer(const CostPrior& cost_prior, const Prior& value_prior, Money u);

/// Expected principal loss when offering R: P(c < R) R + (1 - P(c < R)) u.
Money loss_for_offer(const CostPrior& cost_prior, Money offer, Money u);

/// loss_for_offer at the optimal offer.
Money expected_loss_unknown_cost(const CostPrior& cost_prior, const Prior& value_prior, Money u);

// ---------------------------------------------------------------------------
// Analytic expectations of a configured mechanism

struct UtilityReport {
  Money u_coop = 0.0;
  Money u_heur = 0.0;
  Money u_net = 0.0;
  Money principal_loss = 0.0;  // trade loss under cooperative play
  bool truthful = false;       // u_net > c
  Money threshold = 0.0;       // of the agent's prior

  // Expected per-run outcome fields given the agent's actual choice, in the
  // epsilon -> 0 limit.
  Money expected_agent_utility = 0.0;
  Money expected_principal_loss = 0.0;
  Probability expected_sale_rate = 0.0;
  Probability expected_info_rate = 0.0;
};

UtilityReport analyze(const MechanismSpec& spec, const ValueModel& model, const AgentConfig& cfg);

/// Allowed deviation of simulated means from the epsilon -> 0 analytics.
struct EpsilonBudget {
  Money money = 0.0;
  Probability rate = 0.0;
};

EpsilonBudget epsilon_budget(const MechanismSpec& spec, const ValueModel& model);

}  // namespace elicit
