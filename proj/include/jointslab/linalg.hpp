#pragma once

// Dense exact linear algebra: vectors, matrices, reduced row echelon form,
// rank and a deterministic kernel vector.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"

namespace jlab {

template <FieldScalar S>
using Vec = std::vector<S>;

template <FieldScalar S>
Vec<S> zero_vec(const FieldSpec& f, std::size_t n) {
  return Vec<S>(n, S::from_int(f, 0));
}

template <FieldScalar S>
Vec<S> unit_vec(const FieldSpec& f, std::size_t n, std::size_t i) {
  auto v = zero_vec<S>(f, n);
  v.at(i) = S::from_int(f, 1);
  return v;
}

template <FieldScalar S>
Vec<S> make_vec(const FieldSpec& f, std::initializer_list<std::int64_t> values) {
  Vec<S> v;
  v.reserve(values.size());
  for (auto x : values) v.push_back(S::from_int(f, x));
  return v;
}

template <FieldScalar S>
bool is_zero_vec(std::span<const S> v) {
  for (const auto& x : v) {
    if (!x.is_zero()) return false;
  }
  return true;
}

template <FieldScalar S>
Vec<S> axpy(const Vec<S>& base, const S& t, const Vec<S>& dir) {
  Vec<S> out = base;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * dir[i];
  return out;
}

template <FieldScalar S>
std::string vec_str(std::span<const S> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].str();
  }
  return s + ")";
}

template <FieldScalar S>
struct VecHash {
  std::size_t operator()(const Vec<S>& v) const {
    std::size_t seed = v.size();
    for (const auto& x : v) detail::hash_combine(seed, x.hash());
    return seed;
  }
};

/// Graded order on points: sum of canonical representatives first, then
/// lexicographic on representatives. Used only to make outputs deterministic.
template <FieldScalar S>
bool point_less(const Vec<S>& a, const Vec<S>& b) {
  BigRational ga = 0;
  BigRational gb = 0;
  for (const auto& x : a) ga += x.lift();
  for (const auto& x : b) gb += x.lift();
  if (ga != gb) return ga < gb;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    const auto c = a[i].compare(b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

template <FieldScalar S>
class Matrix {
 public:
  Matrix(FieldSpec field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), data_(rows * cols, S::from_int(field, 0)) {}

  static Matrix from_rows(FieldSpec field, const std::vector<Vec<S>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(field, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw PreconditionViolation("ragged matrix rows");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  const FieldSpec& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  S& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const S& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<S> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const S> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

  Vec<S> operator*(const Vec<S>& v) const {
    if (v.size() != cols_) throw PreconditionViolation("matrix-vector dimension mismatch");
    Vec<S> out = zero_vec<S>(field_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!(*this)(r, c).is_zero() && !v[c].is_zero()) out[r] += (*this)(r, c) * v[c];
      }
    }
    return out;
  }

 private:
  FieldSpec field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<S> data_;
};

template <FieldScalar S>
struct RowEchelon {
  Matrix<S> reduced;
  std::vector<std::size_t> pivot_cols;  // pivot column of row i, i < rank
  std::size_t rank() const noexcept { return pivot_cols.size(); }
};

/// Gauss-Jordan elimination. The reduced row echelon form is unique, so the
/// pivot choice (first nonzero row) only affects speed.
template <FieldScalar S>
RowEchelon<S> rref(Matrix<S> m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pick = row;
    while (pick < m.rows() && m(pick, col).is_zero()) ++pick;
    if (pick == m.rows()) continue;
    m.swap_rows(row, pick);
    const S inv = S::from_int(m.field(), 1) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) {
      if (!m(row, c).is_zero()) m(row, c) *= inv;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      const S factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (!m(row, c).is_zero()) m(r, c) -= factor * m(row, c);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

template <FieldScalar S>
std::size_t mat_rank(const Matrix<S>& m) {
  return rref(m).rank();
}

template <FieldScalar S>
std::size_t rank_of(const FieldSpec& f, const std::vector<Vec<S>>& rows) {
  if (rows.empty()) return 0;
  return mat_rank(Matrix<S>::from_rows(f, rows));
}

/// Nonzero kernel vector, or nullopt when the kernel is trivial. Selection:
/// in the reduced echelon form the first free column is set to 1 and every
/// other free column to 0, so the result is unique for a given matrix.
template <FieldScalar S>
std::optional<Vec<S>> mat_nullspace_vector(const Matrix<S>& m) {
  const auto ech = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : ech.pivot_cols) is_pivot[c] = true;
  std::size_t free_col = m.cols();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  }
  if (free_col == m.cols()) return std::nullopt;
  Vec<S> v = zero_vec<S>(m.field(), m.cols());
  v[free_col] = S::from_int(m.field(), 1);
  for (std::size_t r = 0; r < ech.rank(); ++r) v[ech.pivot_cols[r]] = -ech.reduced(r, free_col);
  return v;
}

/// Echelon basis that grows one vector at a time; answers "is v independent
/// of what has been added so far" without re-running elimination.
template <FieldScalar S>
class IncrementalBasis {
 public:
  explicit IncrementalBasis(FieldSpec field) : field_(field) {}

  std::size_t rank() const noexcept { return basis_.size(); }

  bool is_independent(const Vec<S>& v) const { return !is_zero_vec<S>(reduce(v)); }

  /// Adds v if independent; returns whether the rank grew.
  bool add(const Vec<S>& v) {
    Vec<S> r = reduce(v);
    std::size_t lead = 0;
    while (lead < r.size() && r[lead].is_zero()) ++lead;
    if (lead == r.size()) return false;
    const S inv = S::from_int(field_, 1) / r[lead];
    for (auto& x : r) x *= inv;
    basis_.push_back(std::move(r));
    leads_.push_back(lead);
    return true;
  }

 private:
  Vec<S> reduce(Vec<S> v) const {
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const S coef = v[leads_[i]];
      if (coef.is_zero()) continue;
      for (std::size_t c = 0; c < v.size(); ++c) {
        if (!basis_[i][c].is_zero()) v[c] -= coef * basis_[i][c];
      }
    }
    return v;
  }

  FieldSpec field_;
  std::vector<Vec<S>> basis_;
  std::vector<std::size_t> leads_;
};

}  // namespace jlab
