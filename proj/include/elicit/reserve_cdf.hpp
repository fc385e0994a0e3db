#pragma once

#include <span>
#include <utility>
#include <vector>

#include "elicit/core.hpp"
#include "elicit/prior.hpp"

namespace elicit {

struct Atom {
  Money location;  // finite, or kNeverSell
  Probability mass;

  bool operator==(const Atom&) const = default;
};

/// Mass spread uniformly over [lo, hi].
struct UniformPiece {
  Money lo;
  Money hi;
  Probability mass;

  bool operator==(const UniformPiece&) const = default;
};

/// A reserve-price distribution: point masses plus piecewise-uniform mass.
///
/// The class is closed under every construction the mechanisms need (steps,
/// never-sell mixtures, convex combinations, extreme splits), and its running
/// integral is available in closed form. Instances are normalized on
/// construction: zero masses are dropped, coincident atoms merged, and both
/// lists sorted by location.
class ReserveCdf {
 public:
  /// Throws DomainError unless masses are non-negative, pieces have lo < hi,
  /// and the total mass is 1 within 1e-12.
  ReserveCdf(std::vector<Atom> atoms, std::vector<UniformPiece> pieces);

  static ReserveCdf never_sell();
  /// Unit atom at t: the 0-1 step that jumps at t.
  static ReserveCdf step(Money t);
  static ReserveCdf uniform(Money lo, Money hi);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<UniformPiece>& pieces() const { return pieces_; }

  Probability never_sell_mass() const;
  /// Smallest location carrying mass; kNeverSell when nothing is finite.
  Money lowest_location() const;

  bool operator==(const ReserveCdf&) const = default;

 private:
  std::vector<Atom> atoms_;
  std::vector<UniformPiece> pieces_;
};

/// Where a construction puts the mass that must never produce a sale.
enum class NeverSellPlacement {
  kAboveSupport,   // sentinel above every finite value (default)
  kAtSupportMax,   // literally at v_max; sells only when v = v_max at zero surplus
};

/// G(r): mass at locations <= r (right-continuous).
Probability eval(const ReserveCdf& g, Money r);

/// G(r-): mass at locations < r.
Probability eval_left(const ReserveCdf& g, Money r);

/// Running integral of G from -inf to v, exact.
Money integral(const ReserveCdf& g, Money v);

/// Unit step at E[v].
ReserveCdf make_gstar(const Prior& prior);

/// Sale probability p = c_target / threshold at the step E[v], the rest never
/// sells. Throws ThresholdExceeded when c_target exceeds the threshold.
ReserveCdf make_gc(const Prior& prior, Money c_target,
                   NeverSellPlacement placement = NeverSellPlacement::kAboveSupport);

/// Cdf for an agent who already knows v: mass delta at the bottom of the
/// support, the rest never sells.
ReserveCdf make_g0(Money support_lo, Money support_hi, Probability delta,
                   NeverSellPlacement placement = NeverSellPlacement::kAboveSupport);

/// Sells with probability p under g, never otherwise.
ReserveCdf scale_by_sale_prob(const ReserveCdf& g, Probability p);

/// Mixture of cdfs. Throws WeightError unless weights are >= 0 and sum to 1.
ReserveCdf convex_combine(std::span<const std::pair<ReserveCdf, double>> parts);

/// (G1, G2) with G1 = min(1, 2G) and G2 = max(0, 2G - 1); g is their midpoint.
std::pair<ReserveCdf, ReserveCdf> extreme_split(const ReserveCdf& g);

/// Reserve draw: uniform on [support_lo, support_hi] with probability epsilon,
/// otherwise from g. May return kNeverSell.
Money sample_reserve(const ReserveCdf& g, Probability epsilon, Money support_lo, Money support_hi, Rng& rng);

}  // namespace elicit
