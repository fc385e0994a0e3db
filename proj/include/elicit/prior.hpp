#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "elicit/core.hpp"

namespace elicit {

struct UniformFamily {
  Money lo;
  Money hi;
};

/// Symmetric triangular density on [lo, hi] with its mode at the midpoint.
struct TriangularFamily {
  Money lo;
  Money hi;
};

/// Exponential with the given mean. Moments use the untruncated law; the
/// support (and therefore sampling and cdf) is cut at the 1 - 1e-6 quantile.
struct ExponentialFamily {
  Money mean;
};

/// Value 0 with probability q, value `high` otherwise.
struct TwoPointFamily {
  Probability q;
  Money high;
};

/// Sample-based prior; the samples are kept sorted.
struct EmpiricalFamily {
  std::shared_ptr<const std::vector<Money>> sorted;
};

inline constexpr double kExponentialTailMass = 1e-6;

/// Probability distribution over the object's value. Immutable; cheap to copy.
class Prior {
 public:
  using Family =
      std::variant<UniformFamily, TriangularFamily, ExponentialFamily, TwoPointFamily, EmpiricalFamily>;

  static Prior uniform(Money lo, Money hi);
  static Prior triangular(Money lo, Money hi);
  static Prior exponential(Money mean);
  static Prior two_point(Probability q, Money high);
  static Prior empirical(std::vector<Money> samples);

  const Family& family() const { return family_; }
  Money support_lo() const { return lo_; }
  Money support_hi() const { return hi_; }

  /// Law of a·v for a > 0. Every family is closed under positive scaling.
  Prior scaled(double a) const;

  /// Short human-readable description, e.g. "uniform(0, 20)".
  std::string describe() const;

 private:
  Prior(Family family, Money lo, Money hi) : family_(std::move(family)), lo_(lo), hi_(hi) {}

  Family family_;
  Money lo_;
  Money hi_;
};

Money mean(const Prior& prior);

/// E[max(0, v - t)].
Money expected_excess(const Prior& prior, Money t);

/// E[max(0, v - t)^2]. Together with expected_excess this gives the exact
/// expectation of the integral of any piecewise-uniform reserve cdf.
double expected_excess_sq(const Prior& prior, Money t);

/// P(v <= x).
Probability cdf(const Prior& prior, Money x);

/// P(v < x). Differs from cdf only at atoms of TwoPoint/Empirical priors.
Probability cdf_left(const Prior& prior, Money x);

/// E[max(0, v - E[v])]: the supremum of computation costs for which truthful
/// elicitation is possible.
Money truthfulness_threshold(const Prior& prior);

Money sample(const Prior& prior, Rng& rng);

}  // namespace elicit
