#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/linalg.hpp"

namespace jlab {

/// Affine line {anchor + t * direction} in canonical form: the first nonzero
/// coordinate of the direction (the pivot) is 1 and the anchor's pivot
/// coordinate is 0. Two lines are equal iff their canonical pairs are equal.
template <FieldScalar S>
class Line {
 public:
  Line(Vec<S> anchor, Vec<S> direction, std::size_t id = 0) : anchor_(std::move(anchor)), dir_(std::move(direction)), id_(id) {
    if (anchor_.size() != dir_.size() || anchor_.empty()) throw PreconditionViolation("line anchor/direction size mismatch");
    canonicalize();
  }

  static Line through(const Vec<S>& p, const Vec<S>& q, std::size_t id = 0) {
    Vec<S> d = q;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= p[i];
    return Line(p, std::move(d), id);
  }

  const Vec<S>& anchor() const noexcept { return anchor_; }
  const Vec<S>& direction() const noexcept { return dir_; }
  std::size_t dim() const noexcept { return dir_.size(); }
  std::size_t pivot() const noexcept { return pivot_; }
  std::size_t id() const noexcept { return id_; }
  void set_id(std::size_t id) noexcept { id_ = id; }
  FieldSpec field() const { return dir_.front().field(); }

  Vec<S> point_at(const S& t) const { return axpy(anchor_, t, dir_); }

  /// Parameter t with point_at(t) == x, if x lies on the line.
  std::optional<S> parameter_of(const Vec<S>& x) const {
    const S t = x[pivot_] - anchor_[pivot_];
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!(anchor_[i] + t * dir_[i] == x[i])) return std::nullopt;
    }
    return t;
  }
  bool contains(const Vec<S>& x) const { return parameter_of(x).has_value(); }

  /// Same geometric line (ids ignored).
  bool same_as(const Line& o) const { return anchor_ == o.anchor_ && dir_ == o.dir_; }

  std::string str() const { return vec_str<S>(anchor_) + " + t" + vec_str<S>(dir_); }

 private:
  void canonicalize() {
    pivot_ = 0;
    while (pivot_ < dir_.size() && dir_[pivot_].is_zero()) ++pivot_;
    if (pivot_ == dir_.size()) throw PreconditionViolation("line direction is zero");
    const S inv = dir_[pivot_].inverse();
    for (auto& x : dir_) x *= inv;
    const S shift = anchor_[pivot_];
    if (!shift.is_zero()) {
      for (std::size_t i = 0; i < dir_.size(); ++i) anchor_[i] -= shift * dir_[i];
    }
  }

  Vec<S> anchor_;
  Vec<S> dir_;
  std::size_t pivot_ = 0;
  std::size_t id_;
};

/// Geometric identity of a line (canonical anchor and direction).
template <FieldScalar S>
struct LineKey {
  Vec<S> anchor;
  Vec<S> dir;
  friend bool operator==(const LineKey&, const LineKey&) = default;
};

template <FieldScalar S>
LineKey<S> key_of(const Line<S>& l) {
  return {l.anchor(), l.direction()};
}

template <FieldScalar S>
struct LineKeyHash {
  std::size_t operator()(const LineKey<S>& k) const {
    std::size_t h = VecHash<S>{}(k.anchor);
    detail::hash_combine(h, VecHash<S>{}(k.dir));
    return h;
  }
};

/// Canonical key of the line through x with a direction already in canonical form.
template <FieldScalar S>
LineKey<S> key_through(const Vec<S>& x, const Vec<S>& canonical_dir, std::size_t pivot) {
  LineKey<S> k{x, canonical_dir};
  const S shift = x[pivot];
  if (!shift.is_zero()) {
    for (std::size_t i = 0; i < x.size(); ++i) k.anchor[i] -= shift * canonical_dir[i];
  }
  return k;
}

/// Unique common point of two distinct lines, or nullopt if they are parallel or skew.
template <FieldScalar S>
std::optional<Vec<S>> intersect(const Line<S>& a, const Line<S>& b) {
  if (a.dim() != b.dim()) throw PreconditionViolation("lines live in different dimensions");
  if (a.same_as(b)) throw PreconditionViolation("intersect called on identical lines " + a.str());
  if (a.direction() == b.direction()) return std::nullopt;
  // a0 + t u = b0 + s v  =>  t u - s v = b0 - a0; find two rows with a nonzero 2x2 minor.
  const auto& u = a.direction();
  const auto& v = b.direction();
  const std::size_t n = a.dim();
  Vec<S> rhs = b.anchor();
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= a.anchor()[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // | u_i  -v_i |
      // | u_j  -v_j |
      const S det = u[j] * v[i] - u[i] * v[j];
      if (det.is_zero()) continue;
      const S t = (rhs[j] * v[i] - rhs[i] * v[j]) / det;
      Vec<S> x = a.point_at(t);
      if (b.contains(x)) return x;
      return std::nullopt;
    }
  }
  return std::nullopt;  // unreachable for non-parallel directions
}

}  // namespace jlab
