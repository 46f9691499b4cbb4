#pragma once

// Seeded draws with a fully specified algorithm. std::mt19937_64's output is
// fixed by the standard; the distributions in <random> are not, so the few
// we need are written out here.

#include <cstdint>
#include <random>

#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"

namespace jlab {

using Rng = std::mt19937_64;

inline constexpr const char* kRngIdentity = "mt19937_64/bernoulli-exact-v1";

/// Uniform integer in [0, bound) by rejection from the top of the 64-bit range.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw PreconditionViolation("uniform_below needs a positive bound");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// True with probability exactly p (0 <= p <= 1), up to the 2^-64 grid:
/// one draw x, success iff x * den < num * 2^64.
inline bool bernoulli(Rng& rng, const BigRational& p) {
  const BigInt num = boost::multiprecision::numerator(p);
  const BigInt den = boost::multiprecision::denominator(p);
  const BigInt x(rng());
  return x * den < (num << 64);
}

}  // namespace jlab
