#pragma once

// Iterative line removal certifying |J| <= |L| d (joints, multijoints) and
// |J| k <= n |L| d (generic joints in J^k), where d is the degree of a
// polynomial vanishing on J. Each step removes the line carrying the fewest
// remaining points of J (ties: smallest id); a polynomial of degree d forces
// that count to be at most d, otherwise LemmaViolation is raised.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "jointslab/configuration.hpp"
#include "jointslab/errors.hpp"
#include "jointslab/incidence.hpp"
#include "jointslab/vanishing.hpp"

namespace jlab {

enum class PeelMode { joints, multijoints, generic };

inline std::string to_string(PeelMode m) {
  switch (m) {
    case PeelMode::joints:
      return "joints";
    case PeelMode::multijoints:
      return "multijoints";
    case PeelMode::generic:
      return "generic";
  }
  return "?";
}

template <FieldScalar S>
struct PeelStep {
  std::size_t removed_line = 0;
  std::size_t touched = 0;                // |J_{i-1} ∩ l_i|
  std::vector<Vec<S>> removed_points;     // points leaving J at this step
  std::size_t remaining = 0;              // |J_i|
};

template <FieldScalar S>
struct PointRemoval {
  Vec<S> point;
  std::size_t multiplicity = 0;
  std::size_t removed_lines = 0;  // lines through the point removed while it was in J
};

template <FieldScalar S>
struct PeelingTrace {
  PeelMode mode = PeelMode::joints;
  std::size_t k = 0;  // generic mode only
  std::size_t n = 0;
  std::size_t line_count = 0;  // |L| (distinct geometric lines)
  std::vector<std::size_t> line_ids;
  std::vector<Vec<S>> joints;  // initial J, sorted
  unsigned degree_used = 0;
  VanishingCertificate<S> certificate;
  std::vector<PeelStep<S>> steps;
  std::vector<PointRemoval<S>> removals;  // generic mode only
  BigInt lhs = 0;
  BigInt rhs = 0;

  bool inequality_holds() const { return lhs <= rhs; }
};

namespace detail {

/// Maps every line id to the smallest id of the same geometric line.
template <FieldScalar S>
std::vector<std::size_t> representative_ids(const Configuration<S>& c) {
  std::unordered_map<LineKey<S>, std::size_t, LineKeyHash<S>> first;
  std::vector<std::size_t> rep(c.size());
  for (const auto& l : c.lines()) rep[l.id()] = first.try_emplace(key_of(l), l.id()).first->second;
  return rep;
}

struct PeelPoint {
  std::vector<std::size_t> lines;  // representative ids through the point
  std::size_t remaining_lines = 0;
  std::size_t removed_lines = 0;
  bool in_set = true;
};

/// Canonical poor line: minimal count over active lines, ties by smallest id.
inline std::size_t poorest(const std::vector<std::size_t>& line_ids, const std::vector<bool>& active,
                           const std::vector<std::size_t>& count) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t best_count = std::numeric_limits<std::size_t>::max();
  for (auto id : line_ids) {
    if (!active[id]) continue;
    if (count[id] < best_count) {
      best_count = count[id];
      best = id;
    }
  }
  return best;
}

template <FieldScalar S>
PeelingTrace<S> run_peel(const Configuration<S>& c, PeelMode mode, std::size_t k, const std::vector<JointRecord<S>>& J) {
  PeelingTrace<S> trace;
  trace.mode = mode;
  trace.k = k;
  trace.n = c.dim();
  trace.line_ids = c.distinct_line_ids();
  trace.line_count = trace.line_ids.size();
  for (const auto& r : J) trace.joints.push_back(r.point);
  trace.degree_used = min_interpolation_degree(J.size(), c.dim());
  trace.certificate = vanishing_poly_on_points(c.field(), c.dim(), trace.joints);
  if (!verify_vanishing(trace.certificate)) throw LemmaViolation("vanishing certificate on J failed verification");

  const auto rep = representative_ids(c);
  std::vector<PeelPoint> pts(J.size());
  std::vector<std::size_t> count(c.size(), 0);
  std::vector<std::vector<std::size_t>> on_line(c.size());
  for (std::size_t p = 0; p < J.size(); ++p) {
    for (auto id : J[p].incident) pts[p].lines.push_back(rep[id]);
    std::sort(pts[p].lines.begin(), pts[p].lines.end());
    pts[p].lines.erase(std::unique(pts[p].lines.begin(), pts[p].lines.end()), pts[p].lines.end());
    pts[p].remaining_lines = pts[p].lines.size();
    for (auto id : pts[p].lines) {
      ++count[id];
      on_line[id].push_back(p);
    }
  }

  std::vector<bool> active(c.size(), false);
  for (auto id : trace.line_ids) active[id] = true;
  std::size_t remaining = J.size();
  const std::size_t n = c.dim();
  const auto d = trace.degree_used;

  while (remaining > 0) {
    const std::size_t line = poorest(trace.line_ids, active, count);
    if (line == std::numeric_limits<std::size_t>::max()) throw LemmaViolation("ran out of lines with joints remaining");
    if (count[line] > d) {
      throw LemmaViolation("every remaining line carries more than d = " + std::to_string(d) + " points of J (min " +
                           std::to_string(count[line]) + ")");
    }
    PeelStep<S> step;
    step.removed_line = line;
    step.touched = count[line];
    active[line] = false;
    for (auto p : on_line[line]) {
      auto& pt = pts[p];
      if (!pt.in_set) continue;
      ++pt.removed_lines;
      --pt.remaining_lines;
      // generic points stay joints while n lines remain; other modes drop every touched point
      const bool leaves = mode != PeelMode::generic || pt.remaining_lines < n;
      if (!leaves) continue;
      pt.in_set = false;
      --remaining;
      step.removed_points.push_back(J[p].point);
      for (auto other : pt.lines) {
        if (active[other]) --count[other];
      }
    }
    count[line] = 0;
    step.remaining = remaining;
    trace.steps.push_back(std::move(step));
  }

  if (mode == PeelMode::generic) {
    for (std::size_t p = 0; p < J.size(); ++p) {
      trace.removals.push_back({J[p].point, pts[p].lines.size(), pts[p].removed_lines});
      if (pts[p].removed_lines + n < k + 1) {
        throw LemmaViolation("point " + vec_str<S>(J[p].point) + " left J after only " +
                             std::to_string(pts[p].removed_lines) + " removals");
      }
    }
    trace.lhs = BigInt(J.size()) * k;
    trace.rhs = BigInt(n) * trace.line_count * d;
  } else {
    trace.lhs = J.size();
    trace.rhs = BigInt(trace.line_count) * d;
  }
  if (!trace.inequality_holds()) throw LemmaViolation("certified inequality fails: " + trace.lhs.str() + " > " + trace.rhs.str());
  return trace;
}

}  // namespace detail

/// Line of minimal J-count among the distinct lines of c (ties by smallest id).
/// If a certificate is given it must verify, vanish on J, and have degree <= d.
template <FieldScalar S>
std::size_t find_poor_line(const Configuration<S>& c, const std::vector<Vec<S>>& J, unsigned d,
                           const VanishingCertificate<S>* cert = nullptr) {
  if (cert) {
    if (!verify_vanishing(*cert) || cert->poly.degree() > Degree(static_cast<int>(d))) {
      throw PreconditionViolation("find_poor_line: certificate does not verify at degree " + std::to_string(d));
    }
    for (const auto& x : J) {
      if (!cert->poly.eval(x).is_zero()) throw PreconditionViolation("find_poor_line: certificate misses a point of J");
    }
  }
  const auto ids = c.distinct_line_ids();
  if (ids.empty()) throw PreconditionViolation("find_poor_line: configuration has no lines");
  std::size_t best = ids.front();
  std::size_t best_count = std::numeric_limits<std::size_t>::max();
  for (auto id : ids) {
    std::size_t cnt = 0;
    for (const auto& x : J) cnt += c.line(id).contains(x) ? 1 : 0;
    if (cnt < best_count) {
      best_count = cnt;
      best = id;
    }
  }
  if (best_count > d) {
    throw LemmaViolation("no line carries at most d = " + std::to_string(d) + " points of J (min " +
                         std::to_string(best_count) + ")");
  }
  return best;
}

template <FieldScalar S>
PeelingTrace<S> peel_joints(const Configuration<S>& c) {
  return detail::run_peel(c, PeelMode::joints, 0, detect_joints(c));
}

template <FieldScalar S>
PeelingTrace<S> peel_multijoints(const Configuration<S>& c) {
  return detail::run_peel(c, PeelMode::multijoints, 0, detect_multijoints(c));
}

/// Peels a caller-supplied subset of J^k; every point must be a generic joint with multiplicity in [k, 2k).
template <FieldScalar S>
PeelingTrace<S> peel_generic(const Configuration<S>& c, std::size_t k, const std::vector<Vec<S>>& points) {
  if (k < c.dim()) throw PreconditionViolation("generic peeling needs k >= n");
  const LineIndex<S> index(c);
  std::vector<JointRecord<S>> J;
  for (const auto& x : points) {
    auto ip = incidence_at(c, index, x);
    const auto m = ip.multiplicity();
    if (m < k || m >= 2 * k || !every_subset_spans(c.field(), ip.directions, c.dim())) {
      throw GenericityViolation("point " + vec_str<S>(x) + " is not in J^" + std::to_string(k));
    }
    JointRecord<S> r;
    r.point = x;
    r.is_joint = r.is_generic = true;
    r.multiplicity = m;
    r.bucket_k = k;
    r.incident = ip.all_lines();
    J.push_back(std::move(r));
  }
  return detail::run_peel(c, PeelMode::generic, k, J);
}

template <FieldScalar S>
PeelingTrace<S> peel_generic(const Configuration<S>& c, std::size_t k) {
  return detail::run_peel(c, PeelMode::generic, k, detect_generic_joints(c, k));
}

/// True iff the Hasse gradient of p vanishes at x. Requires p to vanish
/// identically on every given line, the lines to pass through x, and their
/// directions to span.
template <FieldScalar S>
bool singularity_witness(const MultiPoly<S>& p, const Vec<S>& x, const std::vector<Line<S>>& lines) {
  IncrementalBasis<S> basis(p.field());
  for (const auto& l : lines) {
    if (!l.contains(x)) throw PreconditionViolation("line " + l.str() + " does not pass through " + vec_str<S>(x));
    if (!p.restrict_to_line(l.anchor(), l.direction()).is_zero()) {
      throw PreconditionViolation("polynomial does not vanish identically on line " + l.str());
    }
    basis.add(l.direction());
  }
  if (basis.rank() != x.size()) throw PreconditionViolation("line directions do not span");
  for (const auto& g : p.hasse_gradient()) {
    if (!g.eval(x).is_zero()) return false;
  }
  return true;
}

/// Replays a trace against its configuration: re-detects J, re-checks the
/// certificate, repeats every removal with the canonical rule and compares
/// each intermediate count.
template <FieldScalar S>
CheckResult verify_trace(const PeelingTrace<S>& t, const Configuration<S>& c) {
  std::vector<JointRecord<S>> J;
  try {
    switch (t.mode) {
      case PeelMode::joints:
        J = detect_joints(c);
        break;
      case PeelMode::multijoints:
        J = detect_multijoints(c);
        break;
      case PeelMode::generic:
        J = detect_generic_joints(c, t.k);
        break;
    }
  } catch (const Error& e) {
    return CheckResult::fail(std::string("re-detection failed: ") + e.what());
  }
  if (J.size() != t.joints.size()) return CheckResult::fail("joint count differs from re-detection");
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (!(J[i].point == t.joints[i])) return CheckResult::fail("joint list differs from re-detection");
  }
  if (t.degree_used != min_interpolation_degree(J.size(), c.dim())) return CheckResult::fail("degree is not the dimension-count degree");
  if (t.certificate.target != VanishingCertificate<S>::Target::points || !verify_vanishing(t.certificate) ||
      t.certificate.degree_bound != static_cast<int>(t.degree_used) || t.certificate.points.size() != J.size()) {
    return CheckResult::fail("vanishing certificate does not verify");
  }
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (!(t.certificate.points[i] == J[i].point)) {
      return CheckResult::fail("certificate targets differ from J");
    }
  }
  PeelingTrace<S> replay;
  try {
    replay = detail::run_peel(c, t.mode, t.k, J);
  } catch (const Error& e) {
    return CheckResult::fail(std::string("replay failed: ") + e.what());
  }
  if (replay.steps.size() != t.steps.size()) return CheckResult::fail("step count differs on replay");
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& a = replay.steps[i];
    const auto& b = t.steps[i];
    if (a.removed_line != b.removed_line || a.touched != b.touched || a.remaining != b.remaining ||
        a.removed_points != b.removed_points) {
      return CheckResult::fail("step " + std::to_string(i) + " differs on replay");
    }
    if (t.mode != PeelMode::generic && b.touched > t.degree_used) return CheckResult::fail("step removes more than d joints");
  }
  if (!t.steps.empty() && t.steps.back().remaining != 0) return CheckResult::fail("trace does not end with J empty");
  if (replay.lhs != t.lhs || replay.rhs != t.rhs || !(t.lhs <= t.rhs)) return CheckResult::fail("certified inequality mismatch");
  if (t.mode == PeelMode::generic) {
    if (t.removals.size() != replay.removals.size()) return CheckResult::fail("per-point removal list differs");
    for (std::size_t i = 0; i < t.removals.size(); ++i) {
      if (t.removals[i].removed_lines != replay.removals[i].removed_lines ||
          t.removals[i].removed_lines + c.dim() < t.k + 1) {
        return CheckResult::fail("per-point removal count below k - n + 1");
      }
    }
  }
  return {};
}

}  // namespace jlab
