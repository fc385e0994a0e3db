#include "elicit/reserve_cdf.hpp"

#include <algorithm>
#include <cmath>

namespace elicit {
namespace {

constexpr double kMassTolerance = 1e-12;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Running integral of the cdf of a unit uniform piece on [lo, hi].
double piece_integral(const UniformPiece& p, Money v) {
  if (v <= p.lo) return 0.0;
  const double w = p.hi - p.lo;
  if (v < p.hi) return (v - p.lo) * (v - p.lo) / (2.0 * w);
  return 0.5 * w + (v - p.hi);
}

// Point where G first reaches 1/2, kNeverSell if the finite mass is below 1/2.
Money half_crossing(const ReserveCdf& g) {
  std::vector<Money> breaks;
  for (const auto& a : g.atoms())
    if (!is_never_sell(a.location)) breaks.push_back(a.location);
  for (const auto& p : g.pieces()) {
    breaks.push_back(p.lo);
    breaks.push_back(p.hi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double prev = 0.0;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double left = eval_left(g, breaks[i]);
    if (left >= 0.5 && i > 0) {
      // G is linear on (breaks[i-1], breaks[i]) and crosses 1/2 there.
      const double frac = (0.5 - prev) / (left - prev);
      return breaks[i - 1] + frac * (breaks[i] - breaks[i - 1]);
    }
    const double at = eval(g, breaks[i]);
    if (at >= 0.5) return breaks[i];
    prev = at;
  }
  return kNeverSell;
}

}  // namespace

ReserveCdf::ReserveCdf(std::vector<Atom> atoms, std::vector<UniformPiece> pieces) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.mass >= 0.0) || std::isnan(a.location) || a.location == -kNeverSell)
      throw DomainError("atom needs a mass >= 0 and a finite or never-sell location");
    total += a.mass;
    if (a.mass > 0.0) atoms_.push_back(a);
  }
  for (const auto& p : pieces) {
    if (!(p.mass >= 0.0) || !std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
      throw DomainError("uniform piece needs finite lo < hi and mass >= 0");
    total += p.mass;
    if (p.mass > 0.0) pieces_.push_back(p);
  }
  if (std::abs(total - 1.0) > kMassTolerance) throw DomainError("reserve cdf masses must sum to 1");

  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& x, const Atom& y) { return x.location < y.location; });
  std::vector<Atom> merged;
  for (const auto& a : atoms_) {
    if (!merged.empty() && merged.back().location == a.location)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }
  atoms_ = std::move(merged);
  std::stable_sort(pieces_.begin(), pieces_.end(), [](const UniformPiece& x, const UniformPiece& y) {
    return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
  });
}

ReserveCdf ReserveCdf::never_sell() { return ReserveCdf({{kNeverSell, 1.0}}, {}); }

ReserveCdf ReserveCdf::step(Money t) { return ReserveCdf({{t, 1.0}}, {}); }

ReserveCdf ReserveCdf::uniform(Money lo, Money hi) { return ReserveCdf({}, {{lo, hi, 1.0}}); }

Probability ReserveCdf::never_sell_mass() const {
  return !atoms_.empty() && is_never_sell(atoms_.back().location) ? atoms_.back().mass : 0.0;
}

Money ReserveCdf::lowest_location() const {
  Money lowest = kNeverSell;
  if (!atoms_.empty()) lowest = atoms_.front().location;
  if (!pieces_.empty()) lowest = std::min(lowest, pieces_.front().lo);
  return lowest;
}

Probability eval(const ReserveCdf& g, Money r) {
  double acc = 0.0;
  for (const auto& a : g.atoms()) {
    if (a.location > r || is_never_sell(a.location)) break;
    acc += a.mass;
  }
  for (const auto& p : g.pieces()) acc += p.mass * clamp01((r - p.lo) / (p.hi - p.lo));
  return std::min(acc, 1.0);
}

Probability eval_left(const ReserveCdf& g, Money r) {
  double acc = 0.0;
  for (const auto& a : g.atoms()) {
    if (a.location >= r || is_never_sell(a.location)) break;
    acc += a.mass;
  }
  for (const auto& p : g.pieces()) acc += p.mass * clamp01((r - p.lo) / (p.hi - p.lo));
  return std::min(acc, 1.0);
}

Money integral(const ReserveCdf& g, Money v) {
  double acc = 0.0;
  for (const auto& a : g.atoms()) {
    if (is_never_sell(a.location) || a.location >= v) break;
    acc += a.mass * (v - a.location);
  }
  for (const auto& p : g.pieces()) acc += p.mass * piece_integral(p, v);
  return acc;
}

ReserveCdf make_gstar(const Prior& prior) { return ReserveCdf::step(mean(prior)); }

ReserveCdf make_gc(const Prior& prior, Money c_target, NeverSellPlacement placement) {
  if (!(c_target >= 0.0)) throw DomainError("target cost must be >= 0");
  const Money threshold = truthfulness_threshold(prior);
  if (c_target > threshold * (1.0 + 1e-12))
    throw ThresholdExceeded("target cost exceeds the truthfulness threshold");
  const Probability p = threshold > 0.0 ? std::min(1.0, c_target / threshold) : 0.0;
  const Money never = placement == NeverSellPlacement::kAtSupportMax ? prior.support_hi() : kNeverSell;
  return ReserveCdf({{mean(prior), p}, {never, 1.0 - p}}, {});
}

ReserveCdf make_g0(Money support_lo, Money support_hi, Probability delta, NeverSellPlacement placement) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0, 1]");
  const Money never = placement == NeverSellPlacement::kAtSupportMax ? support_hi : kNeverSell;
  return ReserveCdf({{support_lo, delta}, {never, 1.0 - delta}}, {});
}

ReserveCdf scale_by_sale_prob(const ReserveCdf& g, Probability p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sale probability must lie in [0, 1]");
  std::vector<Atom> atoms;
  std::vector<UniformPiece> pieces;
  for (const auto& a : g.atoms()) atoms.push_back({a.location, a.mass * p});
  for (const auto& q : g.pieces()) pieces.push_back({q.lo, q.hi, q.mass * p});
  atoms.push_back({kNeverSell, 1.0 - p});
  return ReserveCdf(std::move(atoms), std::move(pieces));
}

ReserveCdf convex_combine(std::span<const std::pair<ReserveCdf, double>> parts) {
  double total = 0.0;
  for (const auto& [g, w] : parts) {
    if (!(w >= 0.0)) throw WeightError("mixture weights must be >= 0");
    total += w;
  }
  if (parts.empty() || std::abs(total - 1.0) > kMassTolerance) throw WeightError("mixture weights must sum to 1");
  std::vector<Atom> atoms;
  std::vector<UniformPiece> pieces;
  for (const auto& [g, w] : parts) {
    for (const auto& a : g.atoms()) atoms.push_back({a.location, a.mass * w});
    for (const auto& q : g.pieces()) pieces.push_back({q.lo, q.hi, q.mass * w});
  }
  return ReserveCdf(std::move(atoms), std::move(pieces));
}

std::pair<ReserveCdf, ReserveCdf> extreme_split(const ReserveCdf& g) {
  const Money half = half_crossing(g);
  std::vector<Atom> lower_atoms;
  std::vector<Atom> upper_atoms;
  std::vector<UniformPiece> lower_pieces;
  std::vector<UniformPiece> upper_pieces;

  // Below the crossing G1 = 2G; above it G2 = 2G - 1. Each side carries twice
  // the mass g puts there, and the crossing itself gets whatever closes the gap.
  for (const auto& a : g.atoms()) {
    if (a.location < half) lower_atoms.push_back({a.location, 2.0 * a.mass});
    if (a.location > half) upper_atoms.push_back({a.location, 2.0 * a.mass});
  }
  for (const auto& p : g.pieces()) {
    const double w = p.hi - p.lo;
    if (p.hi <= half) {
      lower_pieces.push_back({p.lo, p.hi, 2.0 * p.mass});
    } else if (p.lo >= half) {
      upper_pieces.push_back({p.lo, p.hi, 2.0 * p.mass});
    } else {
      lower_pieces.push_back({p.lo, half, 2.0 * p.mass * (half - p.lo) / w});
      upper_pieces.push_back({half, p.hi, 2.0 * p.mass * (p.hi - half) / w});
    }
  }
  const double below = is_never_sell(half) ? 1.0 - g.never_sell_mass() : eval_left(g, half);
  const double through = is_never_sell(half) ? 1.0 : eval(g, half);
  lower_atoms.push_back({half, std::max(0.0, 1.0 - 2.0 * below)});
  upper_atoms.push_back({half, std::max(0.0, 2.0 * through - 1.0)});
  return {ReserveCdf(std::move(lower_atoms), std::move(lower_pieces)),
          ReserveCdf(std::move(upper_atoms), std::move(upper_pieces))};
}

Money sample_reserve(const ReserveCdf& g, Probability epsilon, Money support_lo, Money support_hi, Rng& rng) {
  if (uniform01(rng) < epsilon) return support_lo + (support_hi - support_lo) * uniform01(rng);
  double u = uniform01(rng);
  for (const auto& a : g.atoms()) {
    if (u < a.mass) return a.location;
    u -= a.mass;
  }
  for (const auto& p : g.pieces()) {
    if (u < p.mass) return p.lo + (p.hi - p.lo) * uniform01(rng);
    u -= p.mass;
  }
  // Rounding left u just past the total; fall back to the last component.
  if (!g.pieces().empty()) {
    const auto& p = g.pieces().back();
    return p.lo + (p.hi - p.lo) * uniform01(rng);
  }
  return g.atoms().back().location;
}

}  // namespace elicit
