#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace elicit {

/// Continuous money; no currency rounding anywhere in the library.
using Money = double;
using Probability = double;

/// Reserve location above every finite value: a reserve drawn here never sells.
inline constexpr Money kNeverSell = std::numeric_limits<double>::infinity();

inline bool is_never_sell(Money r) { return r == kNeverSell; }

using Rng = std::mt19937_64;

namespace detail {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace detail

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) {
  // libstdc++ can round generate_canonical up to exactly 1.
  const double u = std::generate_canonical<double, 53>(rng);
  return u < 1.0 ? u : 0x1.fffffffffffffp-1;
}

/// Seed for the independent stream of trial `index` under a batch seed.
/// SplitMix64 finalizer over the pair, so neighbouring trials decorrelate.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  z += index * 0xD1B54A32D192ED03ULL;
  z = (z ^ (z >> 29)) * 0xBF58476D1CE4E5B9ULL;
  return z ^ (z >> 32);
}

// Error hierarchy. Every library failure derives from Error so callers can
// catch broadly; the CLI maps the concrete types to exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A design target exceeds the truthfulness threshold (p would exceed 1).
class ThresholdExceeded : public Error {
 public:
  using Error::Error;
};

class WeightError : public Error {
 public:
  using Error::Error;
};

/// A search space exceeds its configured budget.
class SizeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Virtual cost is not strictly increasing on the cost support.
class RegularityError : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace elicit
