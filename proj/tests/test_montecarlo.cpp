#include <gtest/gtest.h>

#include <cmath>

#include "elicit/montecarlo.hpp"

using namespace elicit;

namespace {

const Prior kU20 = Prior::uniform(0, 20);
const ValueModel kCommon = ValueModel::common(kU20);

MechanismSpec secret(ReserveCdf g, double eps = 0.0) { return {SecretReserve{eps, std::move(g)}, false, 0.0}; }

bool within_relative(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST(MonteCarlo, ReproducibleForFixedSeed) {
  const auto spec = secret(make_gc(kU20, 0.5), 0.01);
  const auto a = run_batch(spec, kCommon, {0.2, 0, 0}, 50'000, 17);
  const auto b = run_batch(spec, kCommon, {0.2, 0, 0}, 50'000, 17);
  EXPECT_EQ(a, b);
  const auto c = run_batch(spec, kCommon, {0.2, 0, 0}, 50'000, 18);
  EXPECT_NE(a.principal_loss.mean, c.principal_loss.mean);
}

TEST(MonteCarlo, WorkerCountDoesNotChangeEstimates) {
  const auto spec = secret(ReserveCdf({{10, 0.3}}, {{0, 20, 0.7}}), 0.01);
  const auto one = run_batch(spec, kCommon, {0.2, 0, 0}, 40'000, 5, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const auto many = run_batch(spec, kCommon, {0.2, 0, 0}, 40'000, 5, w);
    EXPECT_EQ(many.workers, w);
    for (auto field : {&BatchResult::agent_utility, &BatchResult::principal_loss, &BatchResult::sale_rate,
                       &BatchResult::info_elicited_rate}) {
      EXPECT_TRUE(within_relative((many.*field).mean, (one.*field).mean, 1e-9));
      EXPECT_TRUE(within_relative((many.*field).standard_error, (one.*field).standard_error, 1e-9));
    }
  }
}

TEST(MonteCarlo, MillionRunExampleMatchesAnalytics) {
  const auto spec = secret(make_gc(kU20, 0.1), 1e-4);
  const AgentConfig cfg{0.05, 0.0, 1e-4};
  const auto batch = run_batch(spec, kCommon, cfg, 1'000'000, 2024);
  const auto report = analyze(spec, kCommon, cfg);
  EXPECT_NEAR(report.principal_loss, 0.1, 1e-12);
  const auto budget = epsilon_budget(spec, kCommon);
  EXPECT_NEAR(batch.principal_loss.mean, 0.1, 3 * batch.principal_loss.standard_error + budget.money);
  EXPECT_NEAR(batch.agent_utility.mean, 0.05, 3 * batch.agent_utility.standard_error + budget.money);
  EXPECT_NEAR(batch.info_elicited_rate.mean, 1.0, 1e-12);
  EXPECT_TRUE(compare_to_analytic(batch, report, budget).pass());
}

TEST(MonteCarlo, NeverSellMeansNoSale) {
  const auto batch = run_batch(secret(ReserveCdf::never_sell()), kCommon, {0.0, 0, 0}, 100'000, 1);
  EXPECT_EQ(batch.sale_rate.mean, 0.0);
  EXPECT_EQ(batch.principal_loss.mean, 0.0);
}

TEST(MonteCarlo, ComparisonDetectsBiasedAnalytics) {
  const auto spec = secret(make_gc(kU20, 0.5));
  const AgentConfig cfg{0.2, 0, 0};
  const auto batch = run_batch(spec, kCommon, cfg, 200'000, 3);
  auto report = analyze(spec, kCommon, cfg);
  const auto budget = epsilon_budget(spec, kCommon);
  EXPECT_TRUE(compare_to_analytic(batch, report, budget).pass());
  report.expected_principal_loss += 10 * batch.principal_loss.standard_error;
  const auto verdict = compare_to_analytic(batch, report, budget);
  EXPECT_FALSE(verdict.pass());
  int failing = 0;
  for (const auto& f : verdict.fields) failing += f.pass ? 0 : 1;
  EXPECT_EQ(failing, 1);
}

TEST(MonteCarlo, SecretReserveAndDerivedPriceAgreeOnLoss) {
  const auto g = ReserveCdf({{6, 0.2}}, {{4, 16, 0.8}});
  const AgentConfig cfg{0.1, 0, 0};
  const auto m1 = run_batch(secret(g), kCommon, cfg, 400'000, 11);
  const auto m2 = run_batch({BidDerivedPrice{g, std::nullopt}, false, 0.0}, kCommon, cfg, 400'000, 12);
  const double se = std::hypot(m1.principal_loss.standard_error, m2.principal_loss.standard_error);
  EXPECT_NEAR(m1.principal_loss.mean, m2.principal_loss.mean, 4 * se);
  EXPECT_NEAR(m1.principal_loss.mean, u_coop(g, kU20), 4 * m1.principal_loss.standard_error);
}

TEST(MonteCarlo, FractionalSaleMatchesProbabilisticSale) {
  const auto g = make_gc(kU20, 0.5);
  MechanismSpec frac = secret(g);
  frac.fractional_sale = true;
  const AgentConfig cfg{0.2, 0, 0};
  const auto whole = run_batch(secret(g), kCommon, cfg, 400'000, 21);
  const auto part = run_batch(frac, kCommon, cfg, 400'000, 22);
  const double se = std::hypot(whole.principal_loss.standard_error, part.principal_loss.standard_error);
  EXPECT_NEAR(whole.principal_loss.mean, part.principal_loss.mean, 4 * se);
  EXPECT_NEAR(part.principal_loss.mean, 0.5, 4 * part.principal_loss.standard_error);
  EXPECT_NEAR(part.sale_rate.mean, 0.2 * 0.5, 4 * part.sale_rate.standard_error);
  // The fractional mechanism is far less noisy.
  EXPECT_LT(part.principal_loss.standard_error, whole.principal_loss.standard_error);
}

TEST(MonteCarlo, SinkSeesEveryTrialInOrder) {
  const auto spec = secret(make_gc(kU20, 0.5), 0.01);
  std::vector<std::uint64_t> seen;
  double loss_sum = 0.0;
  const auto batch = run_batch(spec, kCommon, {0.2, 0, 0}, 1000, 4, 4, [&](std::uint64_t i, const Outcome& o) {
    seen.push_back(i);
    loss_sum += o.principal_loss;
  });
  ASSERT_EQ(seen.size(), 1000u);
  for (std::uint64_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
  EXPECT_NEAR(loss_sum / 1000.0, batch.principal_loss.mean, 1e-12);
  EXPECT_EQ(batch, run_batch(spec, kCommon, {0.2, 0, 0}, 1000, 4, 1));
}

TEST(MonteCarlo, RejectsInvalidConfiguration) {
  EXPECT_THROW(run_batch(secret(make_gstar(kU20), 2.0), kCommon, {}, 10, 0), ConfigError);
  EXPECT_THROW(run_batch(secret(make_gstar(kU20)), kCommon, {}, 0, 0), ConfigError);
}
