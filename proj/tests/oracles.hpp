#pragma once

// Independent numeric references used by the tests. Nothing here calls the
// library's closed forms: densities, expectations and integrals are computed
// from first principles by quadrature or direct summation.

#include <functional>
#include <vector>

#include "elicit/prior.hpp"
#include "elicit/reserve_cdf.hpp"

namespace oracle {

using Fn = std::function<double(double)>;

/// Adaptive Simpson quadrature of f over [a, b].
double integrate(const Fn& f, double a, double b, double tol = 1e-12);

/// Composite Simpson rule with n (even) panels.
double simpson(const Fn& f, double a, double b, int n);

/// E[f(v)] under the prior: quadrature against the density for continuous
/// families (untruncated exponential), direct sums for the discrete ones.
double expect(const elicit::Prior& prior, const Fn& f);

double mean(const elicit::Prior& prior);
double threshold(const elicit::Prior& prior);

/// Ĝ(v) as the integral of eval(g, .) from below the lowest finite location,
/// split at every breakpoint of g.
double ghat(const elicit::ReserveCdf& g, double v);

/// E[Ĝ(v)] with Ĝ from `ghat`.
double u_coop(const elicit::ReserveCdf& g, const elicit::Prior& prior);

/// Kolmogorov-Smirnov distance of a sample from a cdf.
double ks_distance(std::vector<double> sample, const Fn& cdf);

/// Random cdf on [lo, hi]: up to 4 atoms, up to 3 uniform pieces and
/// possibly a never-sell atom.
elicit::ReserveCdf random_cdf(elicit::Rng& rng, double lo, double hi);

}  // namespace oracle
