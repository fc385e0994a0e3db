#include "elicit/value_model.hpp"

#include <cmath>

namespace elicit {

using detail::Overloaded;

namespace {

// P(v >= x) or P(v > x), untruncated for the exponential family to agree with
// expected_excess.
Probability upper_tail(const Prior& prior, Money x, bool inclusive) {
  if (const auto* e = std::get_if<ExponentialFamily>(&prior.family())) return x <= 0.0 ? 1.0 : std::exp(-x / e->mean);
  return inclusive ? 1.0 - cdf_left(prior, x) : 1.0 - cdf(prior, x);
}

}  // namespace

ValueModel ValueModel::common(Prior prior) {
  Prior agent = prior;
  return ValueModel(CommonValue{std::move(prior)}, std::move(agent));
}

ValueModel ValueModel::scaled(Prior principal_prior, double a) {
  Prior agent = principal_prior.scaled(a);
  return ValueModel(ScaledValue{std::move(principal_prior), a}, std::move(agent));
}

ValueModel ValueModel::joint(JointValue::Sampler sampler, std::size_t reference_size, std::uint64_t seed) {
  if (!sampler) throw DomainError("joint value model needs a sampler");
  if (reference_size == 0) throw DomainError("joint value model needs a non-empty reference sample");
  Rng rng(seed);
  std::vector<ValuePair> pairs;
  std::vector<Money> agent_values;
  pairs.reserve(reference_size);
  agent_values.reserve(reference_size);
  for (std::size_t i = 0; i < reference_size; ++i) {
    pairs.push_back(sampler(rng));
    agent_values.push_back(pairs.back().agent);
  }
  Prior agent = Prior::empirical(std::move(agent_values));
  return ValueModel(JointValue{std::move(sampler), std::make_shared<const std::vector<ValuePair>>(std::move(pairs))},
                    std::move(agent));
}

const Prior& agent_prior(const ValueModel& model) { return model.agent_prior_; }

ValuePair sample_pair(const ValueModel& model, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const CommonValue& m) {
                          const Money v = sample(m.prior, rng);
                          return ValuePair{v, v};
                        },
                        [&](const ScaledValue& m) {
                          const Money v = sample(m.principal_prior, rng);
                          return ValuePair{v, m.a * v};
                        },
                        [&](const JointValue& m) { return m.sampler(rng); },
                    },
                    model.kind());
}

Money mean_value_gap(const ValueModel& model) {
  return std::visit(Overloaded{
                        [](const CommonValue&) { return 0.0; },
                        [](const ScaledValue& m) { return (1.0 - m.a) * mean(m.principal_prior); },
                        [](const JointValue& m) {
                          double acc = 0.0;
                          for (const auto& p : *m.reference) acc += p.principal - p.agent;
                          return acc / static_cast<double>(m.reference->size());
                        },
                    },
                    model.kind());
}

Money value_gap_above(const ValueModel& model, Money x, bool inclusive) {
  return std::visit(
      Overloaded{
          [](const CommonValue&) { return 0.0; },
          [&](const ScaledValue& m) {
            // v_p - v_a = (1/a - 1) v_a, and E[v_a 1{v_a >= x}] = E[(v_a - x)+] + x P(v_a >= x).
            const Prior& pa = agent_prior(model);
            return (1.0 / m.a - 1.0) * (expected_excess(pa, x) + x * upper_tail(pa, x, inclusive));
          },
          [&](const JointValue& m) {
            double acc = 0.0;
            for (const auto& p : *m.reference)
              if (inclusive ? p.agent >= x : p.agent > x) acc += p.principal - p.agent;
            return acc / static_cast<double>(m.reference->size());
          },
      },
      model.kind());
}

}  // namespace elicit
