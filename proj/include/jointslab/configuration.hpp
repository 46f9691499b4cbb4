#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/line.hpp"

namespace jlab {

struct Family {
  std::string name;
  std::vector<std::size_t> line_ids;
};

/// Labeled families of distinct lines. Line ids are flat indices into lines().
/// A geometric line may appear in several families (with different ids) but
/// at most once per family.
template <FieldScalar S>
class Configuration {
 public:
  using Scalar = S;

  Configuration(FieldSpec field, std::size_t dim) : field_(field), dim_(dim) {
    if (dim < 2 || dim > kMaxDim) throw ValidationError("dimension must be between 2 and 8");
  }

  static constexpr std::size_t kMaxDim = 8;

  const FieldSpec& field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Family>& families() const noexcept { return families_; }
  const std::vector<Line<S>>& lines() const noexcept { return lines_; }
  const Line<S>& line(std::size_t id) const { return lines_.at(id); }
  std::size_t family_of(std::size_t id) const { return family_of_.at(id); }
  std::size_t size() const noexcept { return lines_.size(); }

  std::size_t add_family(std::string name) {
    families_.push_back({std::move(name), {}});
    keys_.emplace_back();
    return families_.size() - 1;
  }

  /// Adds a line to a family; returns its id, or nullopt if the family already holds it.
  std::optional<std::size_t> add_line(std::size_t family, Line<S> l) {
    if (family >= families_.size()) throw PreconditionViolation("no such family");
    if (l.dim() != dim_) throw ValidationError("line dimension does not match configuration");
    if (!(l.field() == field_)) throw ValidationError("line field does not match configuration");
    if (!keys_[family].insert(key_of(l)).second) return std::nullopt;
    const std::size_t id = lines_.size();
    l.set_id(id);
    lines_.push_back(std::move(l));
    family_of_.push_back(family);
    families_[family].line_ids.push_back(id);
    return id;
  }

  /// Throws unless the family count is 1 or exactly dim().
  void validate() const {
    if (families_.size() != 1 && families_.size() != dim_) {
      throw ValidationError("configuration must have 1 or " + std::to_string(dim_) + " families, has " +
                            std::to_string(families_.size()));
    }
  }

  /// One id per geometric line (the smallest id carrying it), ascending.
  std::vector<std::size_t> distinct_line_ids() const {
    std::unordered_set<LineKey<S>, LineKeyHash<S>> seen;
    std::vector<std::size_t> out;
    for (const auto& l : lines_) {
      if (seen.insert(key_of(l)).second) out.push_back(l.id());
    }
    return out;
  }

  /// Single-family configuration holding every distinct geometric line.
  Configuration merged(std::string name = "L") const {
    Configuration out(field_, dim_);
    const auto fam = out.add_family(std::move(name));
    for (auto id : distinct_line_ids()) out.add_line(fam, lines_[id]);
    return out;
  }

 private:
  FieldSpec field_;
  std::size_t dim_;
  std::vector<Family> families_;
  std::vector<Line<S>> lines_;
  std::vector<std::size_t> family_of_;
  std::vector<std::unordered_set<LineKey<S>, LineKeyHash<S>>> keys_;
};

/// Point-to-lines lookup: for a point x, every line through x is found by
/// walking the distinct directions and hashing the canonical line through x.
template <FieldScalar S>
class LineIndex {
 public:
  explicit LineIndex(const Configuration<S>& c) : LineIndex(c.lines()) {}

  explicit LineIndex(const std::vector<Line<S>>& lines) {
    std::unordered_set<Vec<S>, VecHash<S>> seen_dirs;
    for (const auto& l : lines) {
      by_key_[key_of(l)].push_back(l.id());
      if (seen_dirs.insert(l.direction()).second) dirs_.push_back({l.direction(), l.pivot()});
    }
  }

  /// Ids of all lines through x, ascending.
  std::vector<std::size_t> lines_through(const Vec<S>& x) const {
    std::vector<std::size_t> out;
    for (const auto& d : dirs_) {
      auto it = by_key_.find(key_through(x, d.dir, d.pivot));
      if (it != by_key_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t direction_count() const noexcept { return dirs_.size(); }

 private:
  struct DirClass {
    Vec<S> dir;
    std::size_t pivot;
  };
  std::unordered_map<LineKey<S>, std::vector<std::size_t>, LineKeyHash<S>> by_key_;
  std::vector<DirClass> dirs_;
};

}  // namespace jlab
