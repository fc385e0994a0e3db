#include <gtest/gtest.h>

#include <cmath>

#include "elicit/analysis.hpp"
#include "elicit/value_model.hpp"
#include "oracles.hpp"

using namespace elicit;

TEST(ValueModel, AgentPriorCommonAndScaled) {
  const auto base = Prior::uniform(0, 20);
  const auto common = ValueModel::common(base);
  EXPECT_TRUE(common.is_common());
  EXPECT_EQ(agent_prior(common).support_hi(), 20.0);
  EXPECT_DOUBLE_EQ(mean(agent_prior(common)), 10.0);

  const auto half = ValueModel::scaled(base, 0.5);
  EXPECT_FALSE(half.is_common());
  const auto& pa = agent_prior(half);
  ASSERT_TRUE(std::holds_alternative<UniformFamily>(pa.family()));
  EXPECT_DOUBLE_EQ(pa.support_lo(), 0.0);
  EXPECT_DOUBLE_EQ(pa.support_hi(), 10.0);
}

TEST(ValueModel, JointAgentPriorIsEmpiricalOfReference) {
  const auto base = Prior::uniform(0, 20);
  const auto model = ValueModel::joint(
      [base](Rng& rng) {
        const Money v = sample(base, rng);
        return ValuePair{v, 0.5 * v + 1.0};
      },
      1'000'000, 9);
  const auto& pa = agent_prior(model);
  ASSERT_TRUE(std::holds_alternative<EmpiricalFamily>(pa.family()));
  // E[v_a] = 6, sd(v_a) = 10 / sqrt(12).
  const double se = 10.0 / std::sqrt(12.0) / 1000.0;
  EXPECT_NEAR(mean(pa), 6.0, 3 * se);
  EXPECT_NEAR(mean_value_gap(model), 10.0 - 6.0, 6 * se);
}

TEST(ValueModel, SamplePairs) {
  Rng rng(1);
  const auto base = Prior::uniform(0, 20);
  const auto common = ValueModel::common(base);
  const auto twice = ValueModel::scaled(base, 2.0);
  const auto fixed = ValueModel::joint([](Rng&) { return ValuePair{3.0, 7.0}; }, 10, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto c = sample_pair(common, rng);
    EXPECT_EQ(c.principal, c.agent);
    const auto s = sample_pair(twice, rng);
    EXPECT_EQ(s.agent, 2.0 * s.principal);
    const auto f = sample_pair(fixed, rng);
    EXPECT_EQ(f.principal, 3.0);
    EXPECT_EQ(f.agent, 7.0);
  }
}

TEST(ValueModel, ValueGapAboveScaledMatchesQuadrature) {
  const auto base = Prior::triangular(0, 10);
  for (double a : {0.5, 1.0, 2.0}) {
    const auto model = ValueModel::scaled(base, a);
    for (double x : {0.0, 2.5, 5.0, 9.0, 14.0}) {
      // v_p - v_a = (1 - a) v_p, and v_a >= x iff v_p >= x / a.
      const double q = oracle::expect(base, [&](double vp) { return a * vp >= x ? (1 - a) * vp : 0.0; });
      EXPECT_NEAR(value_gap_above(model, x), q, 1e-7) << "a=" << a << " x=" << x;
    }
  }
  EXPECT_EQ(value_gap_above(ValueModel::common(base), 3.0), 0.0);
}

TEST(ValueModel, CommonCollapsesToCommonValueFormulas) {
  Rng rng(13);
  for (const auto& prior : {Prior::uniform(0, 20), Prior::two_point(0.3, 10), Prior::exponential(2.0)}) {
    const auto common = ValueModel::common(prior);
    const auto unit = ValueModel::scaled(prior, 1.0);
    for (int i = 0; i < 50; ++i) {
      const auto g = oracle::random_cdf(rng, prior.support_lo(), std::min(prior.support_hi(), 20.0));
      const double base = principal_loss_common(g, prior);
      EXPECT_NEAR(principal_loss_general(g, common).value, base, 1e-9);
      EXPECT_NEAR(principal_loss_general(g, unit).value, base, 1e-9);
      EXPECT_NEAR(u_net(g, agent_prior(common)), u_net(g, prior), 1e-12);
      EXPECT_NEAR(u_net(g, agent_prior(unit)), u_net(g, prior), 1e-9);
    }
  }
}
