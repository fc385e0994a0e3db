#include "elicit/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace elicit {
namespace {

using detail::Overloaded;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Integral over [max(a, t), b] of (v - t)^k f(v) dv where f is the linear
// function with f(a) = fa and f(b) = fb.
double linear_density_moment(double a, double b, double fa, double fb, double t, int k) {
  if (b <= t) return 0.0;
  const double slope = (fb - fa) / (b - a);
  const double at_t = fa + slope * (t - a);
  const double u0 = std::max(a, t) - t;
  const double u1 = b - t;
  return at_t * (std::pow(u1, k + 1) - std::pow(u0, k + 1)) / (k + 1) +
         slope * (std::pow(u1, k + 2) - std::pow(u0, k + 2)) / (k + 2);
}

double partial_moment(const Prior& prior, Money t, int k) {
  return std::visit(
      Overloaded{
          [&](const UniformFamily& u) {
            const double w = u.hi - u.lo;
            return (std::pow(positive_part(u.hi - t), k + 1) - std::pow(positive_part(u.lo - t), k + 1)) /
                   ((k + 1) * w);
          },
          [&](const TriangularFamily& tri) {
            const double w = tri.hi - tri.lo;
            const double mid = 0.5 * (tri.lo + tri.hi);
            const double peak = 2.0 / w;
            return linear_density_moment(tri.lo, mid, 0.0, peak, t, k) +
                   linear_density_moment(mid, tri.hi, peak, 0.0, t, k);
          },
          [&](const ExponentialFamily& e) {
            const double lam = e.mean;
            if (t >= 0.0) {
              const double tail = std::exp(-t / lam);
              return k == 1 ? lam * tail : 2.0 * lam * lam * tail;
            }
            return k == 1 ? lam - t : lam * lam + (lam - t) * (lam - t);
          },
          [&](const TwoPointFamily& tp) {
            return tp.q * std::pow(positive_part(-t), k) + (1.0 - tp.q) * std::pow(positive_part(tp.high - t), k);
          },
          [&](const EmpiricalFamily& emp) {
            const auto& xs = *emp.sorted;
            auto first = std::upper_bound(xs.begin(), xs.end(), t);
            double acc = 0.0;
            for (auto it = first; it != xs.end(); ++it) {
              const double d = *it - t;
              acc += k == 1 ? d : d * d;
            }
            return acc / static_cast<double>(xs.size());
          },
      },
      prior.family());
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

Prior Prior::uniform(Money lo, Money hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && 0.0 <= lo && lo < hi, "uniform prior needs 0 <= lo < hi");
  return Prior(UniformFamily{lo, hi}, lo, hi);
}

Prior Prior::triangular(Money lo, Money hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && 0.0 <= lo && lo < hi, "triangular prior needs 0 <= lo < hi");
  return Prior(TriangularFamily{lo, hi}, lo, hi);
}

Prior Prior::exponential(Money mean) {
  require(std::isfinite(mean) && mean > 0.0, "exponential prior needs a positive mean");
  return Prior(ExponentialFamily{mean}, 0.0, -mean * std::log(kExponentialTailMass));
}

Prior Prior::two_point(Probability q, Money high) {
  require(q >= 0.0 && q <= 1.0, "two-point prior needs 0 <= q <= 1");
  require(std::isfinite(high) && high > 0.0, "two-point prior needs high > 0");
  return Prior(TwoPointFamily{q, high}, 0.0, high);
}

Prior Prior::empirical(std::vector<Money> samples) {
  require(!samples.empty(), "empirical prior needs at least one sample");
  for (Money x : samples) require(std::isfinite(x) && x >= 0.0, "empirical samples must be finite and >= 0");
  std::sort(samples.begin(), samples.end());
  const Money lo = samples.front();
  const Money hi = samples.back();
  return Prior(EmpiricalFamily{std::make_shared<const std::vector<Money>>(std::move(samples))}, lo, hi);
}

Prior Prior::scaled(double a) const {
  require(std::isfinite(a) && a > 0.0, "scale factor must be positive");
  return std::visit(Overloaded{
                        [&](const UniformFamily& u) { return uniform(a * u.lo, a * u.hi); },
                        [&](const TriangularFamily& t) { return triangular(a * t.lo, a * t.hi); },
                        [&](const ExponentialFamily& e) { return exponential(a * e.mean); },
                        [&](const TwoPointFamily& t) { return two_point(t.q, a * t.high); },
                        [&](const EmpiricalFamily& e) {
                          std::vector<Money> xs(*e.sorted);
                          for (auto& x : xs) x *= a;
                          return empirical(std::move(xs));
                        },
                    },
                    family_);
}

std::string Prior::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const UniformFamily& u) { os << "uniform(" << u.lo << ", " << u.hi << ")"; },
                 [&](const TriangularFamily& t) { os << "triangular(" << t.lo << ", " << t.hi << ")"; },
                 [&](const ExponentialFamily& e) { os << "exponential(mean " << e.mean << ")"; },
                 [&](const TwoPointFamily& t) { os << "two_point(q " << t.q << ", high " << t.high << ")"; },
                 [&](const EmpiricalFamily& e) { os << "empirical(n " << e.sorted->size() << ")"; },
             },
             family_);
  return os.str();
}

Money mean(const Prior& prior) {
  return std::visit(Overloaded{
                        [](const UniformFamily& u) { return 0.5 * (u.lo + u.hi); },
                        [](const TriangularFamily& t) { return 0.5 * (t.lo + t.hi); },
                        [](const ExponentialFamily& e) { return e.mean; },
                        [](const TwoPointFamily& t) { return (1.0 - t.q) * t.high; },
                        [](const EmpiricalFamily& e) {
                          const auto& xs = *e.sorted;
                          return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
                        },
                    },
                    prior.family());
}

Money expected_excess(const Prior& prior, Money t) { return partial_moment(prior, t, 1); }

double expected_excess_sq(const Prior& prior, Money t) { return partial_moment(prior, t, 2); }

Probability cdf(const Prior& prior, Money x) {
  return std::visit(Overloaded{
                        [&](const UniformFamily& u) { return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
                        [&](const TriangularFamily& t) {
                          const double w = t.hi - t.lo;
                          if (x <= t.lo) return 0.0;
                          if (x >= t.hi) return 1.0;
                          if (x <= 0.5 * (t.lo + t.hi)) return 2.0 * (x - t.lo) * (x - t.lo) / (w * w);
                          return 1.0 - 2.0 * (t.hi - x) * (t.hi - x) / (w * w);
                        },
                        [&](const ExponentialFamily& e) {
                          if (x <= 0.0) return 0.0;
                          return std::min(1.0, -std::expm1(-x / e.mean) / (1.0 - kExponentialTailMass));
                        },
                        [&](const TwoPointFamily& t) {
                          if (x < 0.0) return 0.0;
                          return x < t.high ? t.q : 1.0;
                        },
                        [&](const EmpiricalFamily& e) {
                          const auto& xs = *e.sorted;
                          auto n_le = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
                          return static_cast<double>(n_le) / static_cast<double>(xs.size());
                        },
                    },
                    prior.family());
}

Probability cdf_left(const Prior& prior, Money x) {
  return std::visit(Overloaded{
                        [&](const TwoPointFamily& t) {
                          if (x <= 0.0) return 0.0;
                          return x <= t.high ? t.q : 1.0;
                        },
                        [&](const EmpiricalFamily& e) {
                          const auto& xs = *e.sorted;
                          auto n_lt = std::lower_bound(xs.begin(), xs.end(), x) - xs.begin();
                          return static_cast<double>(n_lt) / static_cast<double>(xs.size());
                        },
                        [&](const auto&) { return cdf(prior, x); },
                    },
                    prior.family());
}

Money truthfulness_threshold(const Prior& prior) { return expected_excess(prior, mean(prior)); }

Money sample(const Prior& prior, Rng& rng) {
  const double u = uniform01(rng);
  return std::visit(Overloaded{
                        [&](const UniformFamily& f) { return f.lo + (f.hi - f.lo) * u; },
                        [&](const TriangularFamily& f) {
                          const double w = f.hi - f.lo;
                          return u < 0.5 ? f.lo + w * std::sqrt(0.5 * u) : f.hi - w * std::sqrt(0.5 * (1.0 - u));
                        },
                        [&](const ExponentialFamily& f) {
                          return -f.mean * std::log1p(-u * (1.0 - kExponentialTailMass));
                        },
                        [&](const TwoPointFamily& f) { return u < f.q ? 0.0 : f.high; },
                        [&](const EmpiricalFamily& f) {
                          const auto& xs = *f.sorted;
                          auto i = static_cast<std::size_t>(u * static_cast<double>(xs.size()));
                          return xs[std::min(i, xs.size() - 1)];
                        },
                    },
                    prior.family());
}

}  // namespace elicit
