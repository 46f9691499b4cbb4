#pragma once

// Incidence enumeration and joint / multijoint / generic-joint detection.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "jointslab/configuration.hpp"
#include "jointslab/errors.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/line.hpp"

namespace jlab {

inline constexpr std::size_t kMaxGenericLines = 64;

template <FieldScalar S>
struct IncidencePoint {
  Vec<S> point;
  std::vector<std::vector<std::size_t>> incident;  // per family, ascending ids
  std::vector<Vec<S>> directions;                  // distinct canonical directions

  std::vector<std::size_t> all_lines() const {
    std::vector<std::size_t> out;
    for (const auto& f : incident) out.insert(out.end(), f.begin(), f.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  /// Number of distinct geometric lines through the point.
  std::size_t multiplicity() const noexcept { return directions.size(); }
};

template <FieldScalar S>
struct JointRecord {
  Vec<S> point;
  bool is_joint = false;
  bool is_multijoint = false;
  bool is_generic = false;  // only evaluated by detect_generic_joints
  std::size_t multiplicity = 0;
  std::vector<std::size_t> witness;  // n line ids with spanning directions
  std::optional<std::size_t> bucket_k;
  std::vector<std::size_t> incident;  // every line id through the point
};

template <FieldScalar S>
IncidencePoint<S> incidence_at(const Configuration<S>& c, const LineIndex<S>& index, const Vec<S>& x) {
  IncidencePoint<S> ip{x, std::vector<std::vector<std::size_t>>(c.families().size()), {}};
  std::unordered_set<Vec<S>, VecHash<S>> dirs;
  for (auto id : index.lines_through(x)) {
    ip.incident[c.family_of(id)].push_back(id);
    if (dirs.insert(c.line(id).direction()).second) ip.directions.push_back(c.line(id).direction());
  }
  return ip;
}

template <FieldScalar S>
void sort_points(std::vector<Vec<S>>& pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec<S>& a, const Vec<S>& b) { return point_less(a, b); });
}

/// Every point on at least two lines, from all pairwise intersections. Quadratic in |lines|.
template <FieldScalar S>
std::vector<IncidencePoint<S>> incidence_points(const Configuration<S>& c) {
  const auto ids = c.distinct_line_ids();
  std::unordered_set<Vec<S>, VecHash<S>> seen;
  std::vector<Vec<S>> pts;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      auto x = intersect(c.line(ids[i]), c.line(ids[j]));
      if (x && seen.insert(*x).second) pts.push_back(std::move(*x));
    }
  }
  sort_points(pts);
  const LineIndex<S> index(c);
  std::vector<IncidencePoint<S>> out;
  out.reserve(pts.size());
  for (const auto& x : pts) out.push_back(incidence_at(c, index, x));
  return out;
}

/// A superset of all joints of the given lines, deduplicated and sorted.
///
/// Let H be the coordinate hyperplane {x_i = c} containing the most lines.
/// A joint off H lies only on lines not contained in H; a joint on H needs a
/// line not contained in H, which crosses H exactly there. So it suffices to
/// intersect the lines outside H pairwise and with H.
template <FieldScalar S>
std::vector<Vec<S>> joint_candidates(const std::vector<const Line<S>*>& lines) {
  std::vector<Vec<S>> out;
  if (lines.empty()) return out;
  const std::size_t n = lines.front()->dim();

  std::optional<std::size_t> best_axis;
  std::optional<S> best_value;
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::unordered_map<std::size_t, std::vector<std::pair<S, std::size_t>>> buckets;  // hash -> (value, count)
    for (const auto* l : lines) {
      if (!l->direction()[i].is_zero()) continue;
      const S& v = l->anchor()[i];
      auto& bucket = buckets[v.hash()];
      auto it = std::find_if(bucket.begin(), bucket.end(), [&](const auto& e) { return e.first == v; });
      if (it == bucket.end()) {
        bucket.emplace_back(v, 1);
        it = std::prev(bucket.end());
      } else {
        ++it->second;
      }
      if (it->second > best_count) {
        best_count = it->second;
        best_axis = i;
        best_value = it->first;
      }
    }
  }

  std::vector<const Line<S>*> outside;
  for (const auto* l : lines) {
    const bool inside = best_axis && l->direction()[*best_axis].is_zero() && l->anchor()[*best_axis] == *best_value;
    if (!inside) outside.push_back(l);
  }

  std::unordered_set<Vec<S>, VecHash<S>> seen;
  auto emit = [&](Vec<S> x) {
    if (seen.insert(x).second) out.push_back(std::move(x));
  };
  // parallel lines never meet, so only pairs across direction classes are tried
  std::unordered_map<Vec<S>, std::size_t, VecHash<S>> class_of;
  std::vector<std::vector<const Line<S>*>> classes;
  for (const auto* l : outside) {
    auto [it, fresh] = class_of.emplace(l->direction(), classes.size());
    if (fresh) classes.emplace_back();
    classes[it->second].push_back(l);
  }
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      for (const auto* la : classes[a]) {
        for (const auto* lb : classes[b]) {
          if (auto x = intersect(*la, *lb)) emit(std::move(*x));
        }
      }
    }
  }
  if (best_axis) {
    const std::size_t i = *best_axis;
    for (const auto* l : outside) {
      if (l->direction()[i].is_zero()) continue;
      emit(l->point_at((*best_value - l->anchor()[i]) / l->direction()[i]));
    }
  }
  sort_points(out);
  return out;
}

template <FieldScalar S>
std::vector<Vec<S>> joint_candidates(const Configuration<S>& c) {
  std::vector<const Line<S>*> ptrs;
  for (auto id : c.distinct_line_ids()) ptrs.push_back(&c.line(id));
  return joint_candidates(ptrs);
}

/// Greedy spanning witness among the given lines (a linear matroid, so greedy is exact).
template <FieldScalar S>
std::optional<std::vector<std::size_t>> spanning_witness(const Configuration<S>& c, const std::vector<std::size_t>& ids) {
  IncrementalBasis<S> basis(c.field());
  std::vector<std::size_t> witness;
  for (auto id : ids) {
    if (basis.add(c.line(id).direction())) witness.push_back(id);
    if (basis.rank() == c.dim()) return witness;
  }
  return std::nullopt;
}

/// Joints of the union of all families.
template <FieldScalar S>
std::vector<JointRecord<S>> detect_joints(const Configuration<S>& c) {
  const LineIndex<S> index(c);
  std::vector<JointRecord<S>> out;
  for (const auto& x : joint_candidates(c)) {
    auto ip = incidence_at(c, index, x);
    if (ip.multiplicity() < c.dim()) continue;
    auto witness = spanning_witness(c, ip.all_lines());
    if (!witness) continue;
    JointRecord<S> r;
    r.point = x;
    r.is_joint = true;
    r.multiplicity = ip.multiplicity();
    r.witness = std::move(*witness);
    r.incident = ip.all_lines();
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

template <FieldScalar S>
bool choose_transversal(const Configuration<S>& c, const std::vector<std::vector<std::size_t>>& options,
                        const std::vector<std::size_t>& order, std::size_t depth, const IncrementalBasis<S>& basis,
                        std::vector<std::size_t>& chosen) {
  if (depth == order.size()) return true;
  const std::size_t fam = order[depth];
  for (auto id : options[fam]) {
    const auto& dir = c.line(id).direction();
    if (!basis.is_independent(dir)) continue;
    IncrementalBasis<S> next = basis;
    next.add(dir);
    chosen[fam] = id;
    if (choose_transversal(c, options, order, depth + 1, next, chosen)) return true;
  }
  return false;
}

}  // namespace detail

/// One line per family with jointly spanning directions, searched exhaustively
/// (families with the fewest options first). Witness is ordered by family.
template <FieldScalar S>
std::optional<std::vector<std::size_t>> multijoint_witness(const Configuration<S>& c, const IncidencePoint<S>& ip) {
  const std::size_t n = c.dim();
  if (ip.incident.size() != n) return std::nullopt;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ip.incident[a].size() < ip.incident[b].size(); });
  std::vector<std::size_t> chosen(n);
  IncrementalBasis<S> basis(c.field());
  if (!detail::choose_transversal(c, ip.incident, order, 0, basis, chosen)) return std::nullopt;
  return chosen;
}

template <FieldScalar S>
std::vector<JointRecord<S>> detect_multijoints(const Configuration<S>& c) {
  if (c.families().size() != c.dim()) {
    throw PreconditionViolation("multijoint detection needs exactly " + std::to_string(c.dim()) + " families");
  }
  const LineIndex<S> index(c);
  std::vector<JointRecord<S>> out;
  for (const auto& x : joint_candidates(c)) {
    auto ip = incidence_at(c, index, x);
    bool every_family = true;
    for (const auto& f : ip.incident) every_family = every_family && !f.empty();
    if (!every_family) continue;
    auto witness = multijoint_witness(c, ip);
    if (!witness) continue;
    JointRecord<S> r;
    r.point = x;
    r.is_joint = true;
    r.is_multijoint = true;
    r.multiplicity = ip.multiplicity();
    r.witness = std::move(*witness);
    r.incident = ip.all_lines();
    out.push_back(std::move(r));
  }
  return out;
}

/// True iff every n-subset of `dirs` spans F^n. Vacuously true below n vectors.
template <FieldScalar S>
bool every_subset_spans(const FieldSpec& f, const std::vector<Vec<S>>& dirs, std::size_t n) {
  if (dirs.size() > kMaxGenericLines) {
    throw TooLarge("genericity check over " + std::to_string(dirs.size()) + " lines exceeds the cap of 64");
  }
  if (dirs.size() < n) return true;
  // A dependent prefix extends to a dependent n-subset, so any dependency found early decides.
  auto rec = [&](auto&& self, std::size_t start, const IncrementalBasis<S>& basis) -> bool {
    if (basis.rank() == n) return true;
    for (std::size_t i = start; i + (n - basis.rank()) <= dirs.size(); ++i) {
      IncrementalBasis<S> next = basis;
      if (!next.add(dirs[i])) return false;
      if (!self(self, i + 1, next)) return false;
    }
    return true;
  };
  return rec(rec, 0, IncrementalBasis<S>(f));
}

/// Dyadic bucket k = n * 2^j with multiplicity in [k, 2k), or nullopt below n.
inline std::optional<std::size_t> dyadic_bucket(std::size_t multiplicity, std::size_t n) {
  if (multiplicity < n) return std::nullopt;
  std::size_t k = n;
  while (multiplicity >= 2 * k) k *= 2;
  return k;
}

/// Generic joints with multiplicity in [k, 2k), i.e. J^k.
template <FieldScalar S>
std::vector<JointRecord<S>> detect_generic_joints(const Configuration<S>& c, std::size_t k) {
  if (k < c.dim()) throw PreconditionViolation("generic joints need k >= n");
  const LineIndex<S> index(c);
  std::vector<JointRecord<S>> out;
  for (const auto& x : joint_candidates(c)) {
    auto ip = incidence_at(c, index, x);
    const std::size_t m = ip.multiplicity();
    if (m > kMaxGenericLines) {
      throw TooLarge("point " + vec_str<S>(x) + " lies on " + std::to_string(m) + " lines (cap is 64)");
    }
    if (m < k || m >= 2 * k) continue;
    if (!every_subset_spans(c.field(), ip.directions, c.dim())) continue;
    auto witness = spanning_witness(c, ip.all_lines());
    if (!witness) continue;  // cannot happen: m >= n and every n-subset spans
    JointRecord<S> r;
    r.point = x;
    r.is_joint = true;
    r.is_generic = true;
    r.multiplicity = m;
    r.witness = std::move(*witness);
    r.bucket_k = k;
    r.incident = ip.all_lines();
    out.push_back(std::move(r));
  }
  return out;
}

/// All generic joints partitioned into the dyadic buckets k = n, 2n, 4n, ...
template <FieldScalar S>
std::map<std::size_t, std::vector<JointRecord<S>>> generic_buckets(const Configuration<S>& c) {
  const LineIndex<S> index(c);
  std::map<std::size_t, std::vector<JointRecord<S>>> out;
  for (const auto& x : joint_candidates(c)) {
    auto ip = incidence_at(c, index, x);
    const std::size_t m = ip.multiplicity();
    if (m > kMaxGenericLines) {
      throw TooLarge("point " + vec_str<S>(x) + " lies on " + std::to_string(m) + " lines (cap is 64)");
    }
    if (m < c.dim() || !every_subset_spans(c.field(), ip.directions, c.dim())) continue;
    auto witness = spanning_witness(c, ip.all_lines());
    if (!witness) continue;
    JointRecord<S> r;
    r.point = x;
    r.is_joint = true;
    r.is_generic = true;
    r.multiplicity = m;
    r.witness = std::move(*witness);
    r.bucket_k = dyadic_bucket(m, c.dim());
    r.incident = ip.all_lines();
    out[*r.bucket_k].push_back(std::move(r));
  }
  return out;
}

}  // namespace jlab
