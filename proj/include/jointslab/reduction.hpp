#pragma once

// Randomized degree reduction for three line families in F^3: each multijoint
// picks one line of the second family, the popular picks are kept, a random
// subfamily of the first family is covered by a low-degree polynomial, and the
// polynomial is checked to vanish on the popular lines it happens to contain.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jointslab/configuration.hpp"
#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/incidence.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/polynomial.hpp"
#include "jointslab/rng.hpp"
#include "jointslab/vanishing.hpp"

namespace jlab {

/// Coverage below this fraction of the multijoints triggers a retry.
inline const BigRational kCoverageThreshold(1, 8);

struct ReductionParams {
  BigRational C{2};
  std::uint64_t popularity_divisor = 100;
  std::uint64_t seed = 0;
  std::uint64_t max_retries = 8;

  void validate() const {
    if (C <= 1) throw PreconditionViolation("reduction constant C must exceed 1");
    if (popularity_divisor < 1) throw PreconditionViolation("popularity divisor must be at least 1");
    if (max_retries < 1) throw PreconditionViolation("max_retries must be at least 1");
  }
};

struct ReductionAttempt {
  std::uint64_t seed = 0;
  std::size_t sampled = 0;
  std::size_t covered = 0;
  BigRational coverage;
};

template <FieldScalar S>
struct ReductionCertificate {
  ReductionParams params;
  std::array<std::size_t, 3> permutation{0, 1, 2};  // role r (first, second, third family) -> family index
  std::array<std::size_t, 3> family_sizes{};        // by role
  std::vector<Vec<S>> multijoints;                  // detection order
  std::vector<std::size_t> choice;                  // chosen second-family line per multijoint
  std::vector<std::size_t> popular;
  std::uint64_t seed_used = 0;
  std::vector<std::size_t> sampled;
  MultiPoly<S> poly = MultiPoly<S>(FieldSpec::rational(), 0);
  int degree_bound = 0;
  std::vector<std::size_t> vanishing_popular;  // popular lines on which poly vanishes identically
  std::vector<std::size_t> covered;            // indices into multijoints
  BigRational d_target;
  BigRational probability;
  BigRational coverage;
  bool low_coverage = false;
  std::vector<ReductionAttempt> attempts;
  std::string rng = kRngIdentity;

  bool clamped() const { return probability == 1; }
};

/// Role permutation: identity when the first two families are no larger than
/// the third, otherwise the largest family swapped into the third slot.
template <FieldScalar S>
std::array<std::size_t, 3> reduction_permutation(const Configuration<S>& c) {
  std::array<std::size_t, 3> perm{0, 1, 2};
  const auto size = [&](std::size_t f) { return c.families()[f].line_ids.size(); };
  if (size(0) <= size(2) && size(1) <= size(2)) return perm;
  const std::size_t largest = size(0) >= size(1) ? 0 : 1;
  std::swap(perm[largest], perm[2]);
  return perm;
}

/// For each multijoint, the smallest-id line of family `second` through it
/// that completes a spanning triple with lines of `first` and `third`.
template <FieldScalar S>
std::vector<std::size_t> choose_l2(const std::vector<JointRecord<S>>& multijoints, const Configuration<S>& c,
                                   const std::array<std::size_t, 3>& perm) {
  std::vector<std::size_t> out;
  out.reserve(multijoints.size());
  for (const auto& j : multijoints) {
    std::array<std::vector<std::size_t>, 3> by_role;
    for (auto id : j.incident) {
      for (std::size_t r = 0; r < 3; ++r) {
        if (c.family_of(id) == perm[r]) by_role[r].push_back(id);
      }
    }
    std::optional<std::size_t> pick;
    for (auto l2 : by_role[1]) {
      for (auto l1 : by_role[0]) {
        for (auto l3 : by_role[2]) {
          if (rank_of(c.field(), std::vector<Vec<S>>{c.line(l1).direction(), c.line(l2).direction(),
                                                     c.line(l3).direction()}) == 3) {
            pick = l2;
            break;
          }
        }
        if (pick) break;
      }
      if (pick) break;
    }
    if (!pick) throw PreconditionViolation("point " + vec_str<S>(j.point) + " is not a multijoint");
    out.push_back(*pick);
  }
  return out;
}

/// Lines chosen by at least j_count / (divisor * second_family_size) points, ascending.
inline std::vector<std::size_t> popular_lines(const std::vector<std::size_t>& choice, std::size_t second_family_size,
                                              std::size_t j_count, std::uint64_t divisor) {
  std::map<std::size_t, std::uint64_t> votes;
  for (auto id : choice) ++votes[id];
  std::vector<std::size_t> out;
  for (const auto& [id, n] : votes) {
    if (BigInt(n) * divisor * second_family_size >= BigInt(j_count)) out.push_back(id);
  }
  return out;
}

/// min(1, d^2 / L1), L1 = number of ids.
inline BigRational sampling_probability(const BigRational& d, std::size_t l1) {
  if (l1 == 0) return BigRational(1);
  BigRational p = d * d / BigRational(l1);
  return p > 1 ? BigRational(1) : p;
}

/// Keeps each id independently with probability min(1, d^2 / |ids|). One
/// 64-bit draw per id, in the given order.
inline std::vector<std::size_t> sample_l1(const std::vector<std::size_t>& ids, const BigRational& d, std::uint64_t seed) {
  if (d <= 0) throw PreconditionViolation("sampling needs d > 0");
  const BigRational p = sampling_probability(d, ids.size());
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (auto id : ids) {
    if (bernoulli(rng, p)) out.push_back(id);
  }
  return out;
}

namespace detail {

template <FieldScalar S>
struct ReductionContext {
  const Configuration<S>& c;
  std::array<std::size_t, 3> perm;
  std::vector<JointRecord<S>> J;
  std::vector<std::size_t> choice;
  std::vector<std::size_t> popular;
  BigRational d_target;
  BigRational probability;
};

template <FieldScalar S>
ReductionContext<S> reduction_context(const Configuration<S>& c, const ReductionParams& params) {
  if (c.dim() != 3 || c.families().size() != 3) {
    throw PreconditionViolation("degree reduction needs three families in dimension 3");
  }
  ReductionContext<S> ctx{c, reduction_permutation(c), detect_multijoints(c), {}, {}, {}, {}};
  if (ctx.J.empty()) throw PreconditionViolation("degree reduction needs at least one multijoint");
  const auto size = [&](std::size_t r) { return c.families()[ctx.perm[r]].line_ids.size(); };
  ctx.d_target = params.C * BigRational(size(0)) * BigRational(size(1)) / BigRational(ctx.J.size());
  ctx.probability = sampling_probability(ctx.d_target, size(0));
  ctx.choice = choose_l2(ctx.J, c, ctx.perm);
  ctx.popular = popular_lines(ctx.choice, size(1), ctx.J.size(), params.popularity_divisor);
  return ctx;
}

template <FieldScalar S>
ReductionCertificate<S> reduction_attempt(const ReductionContext<S>& ctx, const ReductionParams& params,
                                          std::uint64_t seed) {
  const auto& c = ctx.c;
  ReductionCertificate<S> cert;
  cert.params = params;
  cert.permutation = ctx.perm;
  for (std::size_t r = 0; r < 3; ++r) cert.family_sizes[r] = c.families()[ctx.perm[r]].line_ids.size();
  for (const auto& j : ctx.J) cert.multijoints.push_back(j.point);
  cert.choice = ctx.choice;
  cert.popular = ctx.popular;
  cert.d_target = ctx.d_target;
  cert.probability = ctx.probability;
  cert.seed_used = seed;
  cert.sampled = sample_l1(c.families()[ctx.perm[0]].line_ids, ctx.d_target, seed);

  std::vector<Line<S>> lines;
  for (auto id : cert.sampled) lines.push_back(c.line(id));
  auto fit = vanishing_poly_on_lines(c.field(), 3, lines);
  cert.poly = std::move(fit.poly);
  cert.degree_bound = fit.degree_bound;

  for (auto id : cert.popular) {
    const auto& l = c.line(id);
    if (cert.poly.restrict_to_line(l.anchor(), l.direction()).is_zero()) cert.vanishing_popular.push_back(id);
  }
  for (std::size_t i = 0; i < cert.choice.size(); ++i) {
    if (std::binary_search(cert.vanishing_popular.begin(), cert.vanishing_popular.end(), cert.choice[i])) {
      cert.covered.push_back(i);
    }
  }
  cert.coverage = BigRational(cert.covered.size()) / BigRational(cert.multijoints.size());
  cert.low_coverage = cert.coverage < kCoverageThreshold;
  return cert;
}

}  // namespace detail

/// Tries seeds seed, seed+1, ..., seed+max_retries and returns the first
/// attempt reaching the coverage threshold, else the best one (earliest on
/// ties) flagged low_coverage. Every attempt is recorded.
template <FieldScalar S>
ReductionCertificate<S> reduce_degree(const Configuration<S>& c, const ReductionParams& params) {
  params.validate();
  const auto ctx = detail::reduction_context(c, params);
  std::optional<ReductionCertificate<S>> best;
  std::vector<ReductionAttempt> attempts;
  for (std::uint64_t i = 0; i <= params.max_retries; ++i) {
    auto cert = detail::reduction_attempt(ctx, params, params.seed + i);
    attempts.push_back({cert.seed_used, cert.sampled.size(), cert.covered.size(), cert.coverage});
    const bool good = !cert.low_coverage;
    if (!best || cert.coverage > best->coverage) best = std::move(cert);
    if (good) break;
  }
  best->attempts = std::move(attempts);
  return std::move(*best);
}

/// Re-derives every list of the certificate from the configuration and checks
/// the vanishing claims directly.
template <FieldScalar S>
CheckResult verify_reduction(const ReductionCertificate<S>& cert, const Configuration<S>& c) {
  try {
    cert.params.validate();
    if (cert.rng != kRngIdentity) return CheckResult::fail("unknown random source " + cert.rng);
    const auto ctx = detail::reduction_context(c, cert.params);
    if (cert.permutation != ctx.perm) return CheckResult::fail("family permutation differs");
    if (cert.multijoints.size() != ctx.J.size()) return CheckResult::fail("multijoint count differs from re-detection");
    for (std::size_t i = 0; i < ctx.J.size(); ++i) {
      if (!(cert.multijoints[i] == ctx.J[i].point)) return CheckResult::fail("multijoint list differs from re-detection");
    }
    if (cert.d_target != ctx.d_target) return CheckResult::fail("d_target differs");
    if (cert.probability != ctx.probability) return CheckResult::fail("sampling probability differs");
    if (cert.choice != ctx.choice) return CheckResult::fail("second-family choices differ");
    if (cert.popular != ctx.popular) return CheckResult::fail("popular lines differ");
    if (cert.sampled != sample_l1(c.families()[ctx.perm[0]].line_ids, ctx.d_target, cert.seed_used)) {
      return CheckResult::fail("sample differs from the seeded draw");
    }

    if (cert.poly.is_zero()) return CheckResult::fail("polynomial is zero");
    if (cert.poly.nvars() != 3 || !(cert.poly.field() == c.field())) return CheckResult::fail("polynomial ring mismatch");
    if (cert.degree_bound != static_cast<int>(min_line_cover_degree(cert.sampled.size(), 3)) ||
        cert.poly.degree() > Degree(cert.degree_bound)) {
      return CheckResult::fail("polynomial degree exceeds the covering bound");
    }
    auto vanishes_on = [&](std::size_t id) {
      const auto& l = c.line(id);
      return cert.poly.restrict_to_line(l.anchor(), l.direction()).is_zero();
    };
    for (auto id : cert.sampled) {
      if (!vanishes_on(id)) return CheckResult::fail("polynomial does not vanish on sampled line " + std::to_string(id));
    }
    std::vector<std::size_t> expected;
    for (auto id : cert.vanishing_popular) {
      if (!std::binary_search(cert.popular.begin(), cert.popular.end(), id)) {
        return CheckResult::fail("line " + std::to_string(id) + " is not popular");
      }
    }
    for (auto id : cert.popular) {
      if (vanishes_on(id)) expected.push_back(id);
    }
    if (expected != cert.vanishing_popular) return CheckResult::fail("vanishing popular lines differ");

    std::vector<std::size_t> covered;
    for (std::size_t i = 0; i < cert.choice.size(); ++i) {
      if (std::binary_search(expected.begin(), expected.end(), cert.choice[i])) covered.push_back(i);
    }
    if (covered != cert.covered) return CheckResult::fail("covered set differs");
    for (auto i : covered) {
      if (!cert.poly.eval(cert.multijoints[i]).is_zero()) return CheckResult::fail("polynomial nonzero at a covered point");
    }
    const BigRational coverage = BigRational(covered.size()) / BigRational(cert.multijoints.size());
    if (coverage != cert.coverage || cert.low_coverage != (coverage < kCoverageThreshold)) {
      return CheckResult::fail("coverage fields differ");
    }
  } catch (const Error& e) {
    return CheckResult::fail(std::string("re-derivation failed: ") + e.what());
  }
  return {};
}

}  // namespace jlab
