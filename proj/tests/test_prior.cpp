#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "elicit/prior.hpp"
#include "oracles.hpp"

using namespace elicit;

namespace {

std::vector<Prior> closed_form_priors() {
  return {Prior::uniform(0, 20),         Prior::uniform(3, 11),       Prior::triangular(0, 12),
          Prior::triangular(2, 9),       Prior::exponential(1.0),     Prior::exponential(7.5),
          Prior::two_point(0.3, 10),     Prior::two_point(0.85, 4)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Prior, Means) {
  EXPECT_DOUBLE_EQ(mean(Prior::uniform(0, 20)), 10.0);
  EXPECT_DOUBLE_EQ(mean(Prior::two_point(0.5, 10)), 5.0);
  EXPECT_DOUBLE_EQ(mean(Prior::triangular(0, 12)), 6.0);
  EXPECT_DOUBLE_EQ(mean(Prior::exponential(3.0)), 3.0);
  EXPECT_DOUBLE_EQ(mean(Prior::empirical({2, 4, 9})), 5.0);
}

TEST(Prior, ExpectedExcessExamples) {
  EXPECT_NEAR(expected_excess(Prior::uniform(0, 20), 10), 2.5, 1e-12);
  EXPECT_NEAR(expected_excess(Prior::exponential(1.0), 1.0), std::exp(-1.0), 1e-12);
  for (const auto& p : closed_form_priors()) {
    if (std::holds_alternative<ExponentialFamily>(p.family())) continue;
    EXPECT_NEAR(expected_excess(p, p.support_hi()), 0.0, 1e-12) << p.describe();
  }
  EXPECT_NEAR(expected_excess(Prior::empirical({1, 2, 6}), 6), 0.0, 1e-15);
}

TEST(Prior, ThresholdExamples) {
  EXPECT_NEAR(truthfulness_threshold(Prior::uniform(0, 20)), 2.5, 1e-12);
  EXPECT_NEAR(truthfulness_threshold(Prior::uniform(0, 10)), 10.0 / 8.0, 1e-12);
  EXPECT_NEAR(truthfulness_threshold(Prior::triangular(0, 12)), 1.0, 1e-12);
  EXPECT_NEAR(truthfulness_threshold(Prior::two_point(0.3, 10)), 2.1, 1e-12);
  EXPECT_NEAR(truthfulness_threshold(Prior::exponential(2.0)), 2.0 / std::exp(1.0), 1e-12);
  EXPECT_EQ(truthfulness_threshold(Prior::empirical({4, 4, 4})), 0.0);
}

TEST(Prior, ExcessMatchesQuadrature) {
  for (const auto& p : closed_form_priors()) {
    const double lo = p.support_lo();
    const double hi = std::holds_alternative<ExponentialFamily>(p.family()) ? 5.0 * mean(p) : p.support_hi();
    for (int k = 0; k <= 10; ++k) {
      const double t = lo + (hi - lo) * k / 10.0;
      const double q = oracle::expect(p, [t](double v) { return std::max(0.0, v - t); });
      EXPECT_LT(rel(expected_excess(p, t), q), 1e-6) << p.describe() << " t=" << t;
      const double q2 = oracle::expect(p, [t](double v) { return std::pow(std::max(0.0, v - t), 2); });
      EXPECT_LT(rel(expected_excess_sq(p, t), q2), 1e-6) << p.describe() << " t=" << t;
    }
    EXPECT_LT(rel(mean(p), oracle::mean(p)), 1e-9) << p.describe();
    EXPECT_LT(rel(truthfulness_threshold(p), oracle::threshold(p)), 1e-6) << p.describe();
  }
}

TEST(Prior, ExcessBelowSupportIsMeanMinusT) {
  for (const auto& p : closed_form_priors()) {
    EXPECT_NEAR(expected_excess(p, p.support_lo() - 1.5), mean(p) - p.support_lo() + 1.5, 1e-9) << p.describe();
    if (p.support_lo() == 0.0) {
      EXPECT_NEAR(expected_excess(p, 0.0), mean(p), 1e-12) << p.describe();
    }
  }
}

TEST(Prior, ExcessNonincreasingAndConvex) {
  auto priors = closed_form_priors();
  priors.push_back(Prior::empirical({0.5, 1, 1, 3, 7.25, 8}));
  for (const auto& p : priors) {
    const double lo = p.support_lo() - 1.0;
    const double hi = p.support_hi() + 1.0;
    const int n = 400;
    std::vector<double> e(n + 1);
    for (int k = 0; k <= n; ++k) e[k] = expected_excess(p, lo + (hi - lo) * k / n);
    for (int k = 1; k <= n; ++k) EXPECT_LE(e[k], e[k - 1] + 1e-12) << p.describe();
    for (int k = 1; k < n; ++k) EXPECT_GE(e[k - 1] + e[k + 1] - 2 * e[k], -1e-9) << p.describe();
  }
}

TEST(Prior, ThresholdPositiveForNondegenerate) {
  for (const auto& p : closed_form_priors()) EXPECT_GT(truthfulness_threshold(p), 0.0) << p.describe();
  EXPECT_GT(truthfulness_threshold(Prior::empirical({1, 2})), 0.0);
}

TEST(Prior, CdfBoundaries) {
  for (const auto& p : closed_form_priors()) {
    EXPECT_EQ(cdf_left(p, p.support_lo()), 0.0) << p.describe();
    EXPECT_NEAR(cdf(p, p.support_hi()), 1.0, 1e-12) << p.describe();
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = p.support_lo() + (p.support_hi() - p.support_lo()) * k / 200.0;
      const double c = cdf(p, x);
      EXPECT_GE(c, prev - 1e-15);
      EXPECT_LE(cdf_left(p, x), c);
      prev = c;
    }
  }
  EXPECT_DOUBLE_EQ(cdf(Prior::two_point(0.3, 10), 0.0), 0.3);
  EXPECT_DOUBLE_EQ(cdf_left(Prior::two_point(0.3, 10), 10.0), 0.3);
}

TEST(Prior, SampleExamples) {
  Rng rng(7);
  const auto zero = Prior::two_point(1.0, 10);
  const auto box = Prior::uniform(5, 5.5);
  const auto point = Prior::empirical({3, 3, 3});
  for (int i = 0; i < 10000; ++i) {
    EXPECT_EQ(sample(zero, rng), 0.0);
    const double x = sample(box, rng);
    EXPECT_GE(x, 5.0);
    EXPECT_LE(x, 5.5);
    EXPECT_EQ(sample(point, rng), 3.0);
  }
}

TEST(Prior, SampleIsDeterministicGivenState) {
  const auto p = Prior::triangular(0, 4);
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample(p, a), sample(p, b));
}

TEST(Prior, SampleMatchesCdfKolmogorovSmirnov) {
  auto priors = closed_form_priors();
  priors.push_back(Prior::empirical({0.5, 1, 1, 3, 7.25, 8}));
  for (const auto& p : priors) {
    Rng rng(2024);
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) x = sample(p, rng);
    for (double x : {xs.front(), xs.back()}) {
      EXPECT_GE(x, p.support_lo());
      EXPECT_LE(x, p.support_hi());
    }
    EXPECT_LT(oracle::ks_distance(std::move(xs), [&](double x) { return cdf(p, x); }), 0.005) << p.describe();
  }
}

TEST(Prior, ExponentialTruncation) {
  const auto p = Prior::exponential(2.0);
  EXPECT_NEAR(p.support_hi(), 2.0 * std::log(1.0 / kExponentialTailMass), 1e-9);
  // Renormalized cdf versus the untruncated law: differ by at most the cut mass.
  for (double x : {0.5, 2.0, 8.0})
    EXPECT_NEAR(cdf(p, x), 1.0 - std::exp(-x / 2.0), 2 * kExponentialTailMass);
}

TEST(Prior, ScaledFamilies) {
  EXPECT_NEAR(mean(Prior::uniform(0, 20).scaled(0.5)), 5.0, 1e-12);
  EXPECT_NEAR(Prior::uniform(0, 20).scaled(0.5).support_hi(), 10.0, 1e-12);
  for (const auto& p : closed_form_priors()) {
    const auto s = p.scaled(2.5);
    EXPECT_NEAR(truthfulness_threshold(s), 2.5 * truthfulness_threshold(p), 1e-9) << p.describe();
    EXPECT_NEAR(expected_excess(s, 2.5), 2.5 * expected_excess(p, 1.0), 1e-9) << p.describe();
  }
}

TEST(Prior, RejectsInvalidParameters) {
  EXPECT_THROW(Prior::uniform(5, 5), DomainError);
  EXPECT_THROW(Prior::uniform(-1, 5), DomainError);
  EXPECT_THROW(Prior::triangular(3, 1), DomainError);
  EXPECT_THROW(Prior::exponential(0), DomainError);
  EXPECT_THROW(Prior::two_point(1.5, 10), DomainError);
  EXPECT_THROW(Prior::two_point(0.5, 0), DomainError);
  EXPECT_THROW(Prior::empirical({}), DomainError);
  EXPECT_THROW(Prior::empirical({1, -2}), DomainError);
  EXPECT_THROW(Prior::uniform(0, 1).scaled(0), DomainError);
}
