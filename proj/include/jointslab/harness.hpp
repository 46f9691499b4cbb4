#pragma once

// Bound evaluation, rich-point counting, brute-force oracles and experiment
// reports driven by JSON descriptors.

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jointslab/constructions.hpp"
#include "jointslab/incidence.hpp"
#include "jointslab/io.hpp"
#include "jointslab/numeric.hpp"
#include "jointslab/peeling.hpp"
#include "jointslab/reduction.hpp"

namespace jlab {

inline constexpr const char* kReportSchema = "jointslab/report/v1";
inline constexpr const char* kDescriptorSchema = "jointslab/descriptor/v1";

// ---------------------------------------------------------------- bounds

enum class BoundId { joints_basic, multijoints_3d, multijoints_nd, generic_nd, generic_probabilistic, st_rich };

inline const std::vector<BoundId>& all_bounds() {
  static const std::vector<BoundId> ids{BoundId::joints_basic, BoundId::multijoints_3d,        BoundId::multijoints_nd,
                                        BoundId::generic_nd,   BoundId::generic_probabilistic, BoundId::st_rich};
  return ids;
}

inline std::string to_string(BoundId id) {
  switch (id) {
    case BoundId::joints_basic: return "joints_basic";
    case BoundId::multijoints_3d: return "multijoints_3d";
    case BoundId::multijoints_nd: return "multijoints_nd";
    case BoundId::generic_nd: return "generic_nd";
    case BoundId::generic_probabilistic: return "generic_probabilistic";
    case BoundId::st_rich: return "st_rich";
  }
  return "?";
}

inline std::optional<BoundId> bound_from_string(const std::string& s) {
  for (auto id : all_bounds()) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

/// Only the parameters relevant to `id` are read.
struct BoundSpec {
  BoundId id = BoundId::joints_basic;
  std::size_t n = 3;
  BigInt lines = 0;                   // L
  std::vector<BigInt> family_sizes;   // L_1..L_n
  BigInt k = 0;

  void validate() const {
    const auto name = to_string(id);
    switch (id) {
      case BoundId::joints_basic:
        if (n < 2) throw PreconditionViolation(name + ": n must be at least 2");
        if (lines < 0) throw PreconditionViolation(name + ": L must be non-negative");
        break;
      case BoundId::multijoints_3d:
      case BoundId::multijoints_nd: {
        const std::size_t want = id == BoundId::multijoints_3d ? 3 : n;
        if (want < 2) throw PreconditionViolation(name + ": n must be at least 2");
        if (family_sizes.size() != want) {
          throw PreconditionViolation(name + ": needs " + std::to_string(want) + " family sizes");
        }
        for (const auto& s : family_sizes) {
          if (s < 0) throw PreconditionViolation(name + ": family sizes must be non-negative");
        }
        break;
      }
      case BoundId::generic_nd:
      case BoundId::generic_probabilistic:
        if (n < 2) throw PreconditionViolation(name + ": n must be at least 2");
        if (lines < 0 || k < 1) throw PreconditionViolation(name + ": needs L >= 0 and k >= 1");
        break;
      case BoundId::st_rich:
        if (lines < 0 || k < 1) throw PreconditionViolation(name + ": needs L >= 0 and k >= 1");
        break;
    }
  }
};

/// Right-hand side with every implicit constant set to 1.
inline Number bound_rhs(const BoundSpec& b) {
  b.validate();
  const BigRational L(b.lines);
  const BigRational k(b.k);
  const auto n = static_cast<unsigned>(b.n);
  switch (b.id) {
    case BoundId::joints_basic:
      return Number::power(L, n, n - 1);
    case BoundId::multijoints_3d:
    case BoundId::multijoints_nd: {
      BigRational prod = 1;
      for (const auto& s : b.family_sizes) prod *= BigRational(s);
      const auto root = static_cast<unsigned>(b.family_sizes.size() - 1);
      return Number::power(prod, 1, root);
    }
    case BoundId::generic_nd:
      return Number::power(L, n, n - 1) / Number::power(k, n + 1, n - 1) + Number::of(L / k);
    case BoundId::generic_probabilistic:
      return Number::power(L / k, n, n - 1);
    case BoundId::st_rich:
      return Number::of(L * L / (k * k * k) + L / k);
  }
  throw PreconditionViolation("unknown bound");
}

/// count / rhs; 0/0 is reported as 0.
inline Number ratio_of(const BigInt& count, const Number& rhs) {
  if (rhs.exact ? rhs.exact->is_zero() : rhs.approx == 0) {
    if (count != 0) throw PreconditionViolation("positive count against a zero bound");
    return Number::of(0);
  }
  return Number::of(BigRational(count)) / rhs;
}

/// a > b, exactly when both are exact.
inline bool number_greater(const Number& a, const Number& b) {
  if (a.exact && b.exact) return *a.exact > *b.exact;
  return a.approx > b.approx;
}

// ---------------------------------------------------------------- rich points

struct RichCount {
  std::size_t k = 0;
  std::uint64_t rich = 0;         // points on at least k and fewer than 2k lines
  std::uint64_t incidences = 0;   // over every supplied point
  std::uint64_t line_count = 0;   // distinct lines
  Number rhs;
  Number ratio;
};

template <FieldScalar S>
RichCount st_rich_points(const std::vector<Vec<S>>& points, const Configuration<S>& c, std::size_t k) {
  if (c.dim() != 2) throw PreconditionViolation("rich-point counting is planar");
  if (k < 2) throw PreconditionViolation("rich-point counting needs k >= 2");
  const auto lines = c.merged();
  const LineIndex<S> index(lines);
  RichCount out;
  out.k = k;
  out.line_count = lines.size();
  std::unordered_set<Vec<S>, VecHash<S>> seen;
  for (const auto& x : points) {
    if (!seen.insert(x).second) continue;
    const auto m = index.lines_through(x).size();
    out.incidences += m;
    if (m >= k && m < 2 * k) ++out.rich;
  }
  BoundSpec b;
  b.id = BoundId::st_rich;
  b.n = 2;
  b.lines = out.line_count;
  b.k = k;
  out.rhs = bound_rhs(b);
  out.ratio = ratio_of(out.rich, out.rhs);
  return out;
}

// ---------------------------------------------------------------- oracle

inline constexpr std::uint64_t kBruteForceLimit = 1000000;

/// Joints found by testing every point of F_p^n against every line directly.
inline std::vector<JointRecord<ModP>> brute_force_joints(const Configuration<ModP>& c) {
  const auto& f = c.field();
  const std::size_t n = c.dim();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= f.modulus();
    if (total > kBruteForceLimit) throw TooLarge("brute force needs p^n <= 10^6");
  }
  std::vector<JointRecord<ModP>> out;
  detail::for_each_lattice_point(std::vector<std::uint64_t>(n, f.modulus()), [&](const std::vector<std::int64_t>& y) {
    Vec<ModP> x;
    for (auto v : y) x.push_back(ModP::from_int(f, v));
    std::vector<std::size_t> ids;
    std::vector<const Line<ModP>*> distinct;
    for (const auto& l : c.lines()) {
      if (!l.contains(x)) continue;
      ids.push_back(l.id());
      bool fresh = true;
      for (const auto* d : distinct) fresh = fresh && !d->same_as(l);
      if (fresh) distinct.push_back(&l);
    }
    if (distinct.size() < n) return;
    std::vector<Vec<ModP>> dirs;
    for (const auto* d : distinct) dirs.push_back(d->direction());
    if (rank_of(f, dirs) < n) return;
    JointRecord<ModP> r;
    r.point = std::move(x);
    r.is_joint = true;
    r.multiplicity = distinct.size();
    r.incident = std::move(ids);
    out.push_back(std::move(r));
  });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return point_less<ModP>(a.point, b.point); });
  return out;
}

// ---------------------------------------------------------------- reports

struct BoundEntry {
  BoundSpec spec;
  std::optional<std::size_t> bucket_k;
  BigInt count = 0;
  Number rhs;
  Number ratio;
};

struct SkippedItem {
  std::string what;
  std::string reason;
};

struct PeelSummary {
  PeelMode mode = PeelMode::joints;
  std::size_t k = 0;
  std::size_t joints = 0;
  unsigned degree = 0;
  BigInt lhs = 0;
  BigInt rhs = 0;
  bool holds = false;
  bool verified = false;
  std::optional<Number> certified_constant;  // |L| d / |L|^{n/(n-1)}, joints and multijoints
};

struct WeightedTally {
  std::string q;
  Number sum;
};

struct Report {
  std::string name;
  std::uint64_t seed = 0;
  Json generator;
  Json generator_stats;
  std::string digest;
  FieldSpec field = FieldSpec::rational();
  std::size_t n = 0;
  std::size_t line_count = 0;
  std::vector<std::size_t> family_sizes;
  std::optional<std::size_t> joints;
  std::optional<std::size_t> multijoints;
  std::optional<std::map<std::size_t, std::size_t>> generic;
  std::vector<BoundEntry> bounds;
  std::vector<PeelSummary> peels;
  std::optional<Json> reduction;
  std::optional<std::vector<WeightedTally>> tallies;
  std::optional<std::size_t> tally_points;
  std::vector<SkippedItem> skipped;
  Json certificates = Json::object();
  std::optional<Json> timings_ms;
};

struct EmpiricalConstant {
  Number ratio = Number::of(0);
  std::string digest;
  std::optional<std::size_t> bucket_k;
};

/// Largest ratio for `id` over the suite; the first witness wins ties.
inline EmpiricalConstant empirical_constant(const std::vector<Report>& suite, BoundId id) {
  if (suite.empty()) throw PreconditionViolation("empirical constant of an empty suite");
  std::optional<EmpiricalConstant> best;
  for (const auto& r : suite) {
    for (const auto& e : r.bounds) {
      if (e.spec.id != id) continue;
      if (!best || number_greater(e.ratio, best->ratio)) best = EmpiricalConstant{e.ratio, r.digest, e.bucket_k};
    }
  }
  if (!best) throw PreconditionViolation("no report in the suite evaluates " + to_string(id));
  return *best;
}

inline Json number_json(const Number& x) {
  Json j{{"value", real_str(x.approx)}};
  if (x.exact) j["exact"] = x.exact->str();
  return j;
}

inline Json report_to_json(const Report& r) {
  Json j{{"kind", "report"}, {"schema", kReportSchema}, {"name", r.name}, {"seed", r.seed}};
  j["generator"] = r.generator;
  if (!r.generator_stats.is_null()) j["generator_stats"] = r.generator_stats;
  j["configuration"] = Json{{"digest", r.digest},
                            {"field", field_to_json(r.field)},
                            {"n", r.n},
                            {"lines", r.line_count},
                            {"family_sizes", r.family_sizes}};
  Json det = Json::object();
  if (r.joints) det["joints"] = *r.joints;
  if (r.multijoints) det["multijoints"] = *r.multijoints;
  if (r.generic) {
    Json g = Json::array();
    for (const auto& [k, count] : *r.generic) g.push_back(Json{{"k", k}, {"count", count}});
    det["generic"] = std::move(g);
  }
  j["detected"] = std::move(det);
  Json bounds = Json::array();
  for (const auto& e : r.bounds) {
    Json b{{"bound", to_string(e.spec.id)}, {"n", e.spec.n}};
    switch (e.spec.id) {
      case BoundId::multijoints_3d:
      case BoundId::multijoints_nd: {
        Json sizes = Json::array();
        for (const auto& s : e.spec.family_sizes) sizes.push_back(s.str());
        b["family_sizes"] = std::move(sizes);
        break;
      }
      default:
        b["L"] = e.spec.lines.str();
        if (e.spec.id != BoundId::joints_basic) b["k"] = e.spec.k.str();
    }
    b["count"] = e.count.str();
    b["rhs"] = number_json(e.rhs);
    b["ratio"] = number_json(e.ratio);
    bounds.push_back(std::move(b));
  }
  j["bounds"] = std::move(bounds);
  Json peels = Json::array();
  for (const auto& p : r.peels) {
    Json e{{"mode", to_string(p.mode)}};
    if (p.mode == PeelMode::generic) e["k"] = p.k;
    e["joints"] = p.joints;
    e["degree"] = p.degree;
    e["statement"] = inequality_statement(p.mode);
    e["lhs"] = p.lhs.str();
    e["rhs"] = p.rhs.str();
    e["holds"] = p.holds;
    e["verified"] = p.verified;
    if (p.certified_constant) e["certified_constant"] = number_json(*p.certified_constant);
    peels.push_back(std::move(e));
  }
  j["peeling"] = std::move(peels);
  if (r.reduction) j["reduction"] = *r.reduction;
  if (r.tallies) {
    Json t{{"threshold", "multiplicity^2 <= L"}, {"points", *r.tally_points}};
    Json sums = Json::array();
    for (const auto& w : *r.tallies) sums.push_back(Json{{"q", w.q}, {"sum", number_json(w.sum)}});
    t["sums"] = std::move(sums);
    j["weighted_tallies"] = std::move(t);
  }
  Json skipped = Json::array();
  for (const auto& s : r.skipped) skipped.push_back(Json{{"what", s.what}, {"reason", s.reason}});
  j["skipped"] = std::move(skipped);
  if (!r.certificates.empty()) j["certificates"] = r.certificates;
  if (r.timings_ms) j["timings_ms"] = *r.timings_ms;
  return j;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// One row per evaluated bound.
inline std::string report_csv(const std::vector<Report>& reports) {
  std::string out = "name,digest,bound,k,count,rhs,ratio,ratio_exact\n";
  for (const auto& r : reports) {
    for (const auto& e : r.bounds) {
      const bool has_k = e.spec.id == BoundId::generic_nd || e.spec.id == BoundId::generic_probabilistic ||
                         e.spec.id == BoundId::st_rich;
      out += csv_field(r.name) + "," + r.digest + "," + to_string(e.spec.id) + "," + (has_k ? e.spec.k.str() : "") + "," +
             e.count.str() + "," + real_str(e.rhs.approx) + "," + real_str(e.ratio.approx) + "," +
             (e.ratio.exact ? e.ratio.exact->str() : "") + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------- descriptors

namespace detail {

inline void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ValidationError(path + "." + key + ": unknown key");
  }
}

inline std::uint64_t uint_or(const Json& j, const char* key, std::uint64_t fallback, const std::string& path) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_uint(*it, path + "." + key);
}

inline bool bool_or(const Json& j, const char* key, bool fallback, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ValidationError(path + "." + key + ": expected a boolean");
  return it->get<bool>();
}

inline std::vector<std::string> strings_or(const Json& j, const char* key, std::vector<std::string> fallback,
                                           const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array()) throw ValidationError(path + "." + key + ": expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    out.push_back(as_string((*it)[i], path + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline void check_choices(const std::vector<std::string>& xs, std::initializer_list<const char*> allowed,
                          const std::string& path) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || xs[i] == a;
    if (!ok) throw ValidationError(path + "[" + std::to_string(i) + "]: unknown value '" + xs[i] + "'");
  }
}

inline std::size_t dim_of(const Json& g, const std::string& path, std::size_t fallback = 3) {
  const auto n = uint_or(g, "n", fallback, path);
  if (n < 2 || n > 8) throw ValidationError(path + ".n: must be between 2 and 8");
  return n;
}

template <class Fn>
double timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct ExperimentPlan {
  std::string name;
  std::uint64_t seed = 0;
  Json generator;
  std::vector<std::string> detectors;
  std::vector<std::string> bounds;
  std::vector<std::string> peel;
  std::vector<std::size_t> st_k;
  std::optional<ReductionParams> reduce;
  bool tallies = false;
  bool timings = false;
  bool attach = true;
};

inline ExperimentPlan parse_descriptor(const Json& d) {
  const std::string root = "descriptor";
  allow_keys(d, {"schema", "name", "seed", "generator", "detectors", "bounds", "peel", "st_k", "reduce", "weighted_tallies",
                 "timings", "attach_certificates"},
             root);
  if (auto it = d.find("schema"); it != d.end() && as_string(*it, root + ".schema") != kDescriptorSchema) {
    throw ValidationError(root + ".schema: expected '" + std::string(kDescriptorSchema) + "'");
  }
  ExperimentPlan p;
  if (auto it = d.find("name"); it != d.end()) p.name = as_string(*it, root + ".name");
  p.seed = uint_or(d, "seed", 0, root);
  p.generator = member(d, "generator", root);
  const std::string gp = root + ".generator";
  const auto kind = as_string(member(p.generator, "kind", gp), gp + ".kind");
  if (kind == "grid") {
    allow_keys(p.generator, {"kind", "N", "n", "field", "split"}, gp);
    if (as_uint(member(p.generator, "N", gp), gp + ".N") < 1) throw ValidationError(gp + ".N: must be at least 1");
    dim_of(p.generator, gp);
  } else if (kind == "box") {
    allow_keys(p.generator, {"kind", "sides", "field"}, gp);
    const auto sides = as_ids(member(p.generator, "sides", gp), gp + ".sides");
    if (sides.size() < 2 || sides.size() > 8) throw ValidationError(gp + ".sides: needs between 2 and 8 entries");
  } else if (kind == "bush") {
    allow_keys(p.generator, {"kind", "N", "alpha", "n"}, gp);
    as_uint(member(p.generator, "N", gp), gp + ".N");
    as_rational(member(p.generator, "alpha", gp), gp + ".alpha");
    dim_of(p.generator, gp);
  } else if (kind == "random") {
    allow_keys(p.generator, {"kind", "field", "n", "lines", "families"}, gp);
    field_from_json(member(p.generator, "field", gp), gp + ".field");
    dim_of(p.generator, gp);
    as_uint(member(p.generator, "lines", gp), gp + ".lines");
  } else if (kind == "file") {
    allow_keys(p.generator, {"kind", "path"}, gp);
    as_string(member(p.generator, "path", gp), gp + ".path");
  } else {
    throw ValidationError(gp + ".kind: unknown generator '" + kind + "'");
  }
  p.detectors = strings_or(d, "detectors", {"joints", "multijoints", "generic"}, root);
  check_choices(p.detectors, {"joints", "multijoints", "generic"}, root + ".detectors");
  p.bounds = strings_or(d, "bounds", {}, root);
  for (std::size_t i = 0; i < p.bounds.size(); ++i) {
    if (!bound_from_string(p.bounds[i])) {
      throw ValidationError(root + ".bounds[" + std::to_string(i) + "]: unknown bound '" + p.bounds[i] + "'");
    }
  }
  p.peel = strings_or(d, "peel", {}, root);
  check_choices(p.peel, {"joints", "multijoints", "generic"}, root + ".peel");
  if (auto it = d.find("st_k"); it != d.end()) {
    for (auto k : as_ids(*it, root + ".st_k")) {
      if (k < 2) throw ValidationError(root + ".st_k: every k must be at least 2");
      p.st_k.push_back(k);
    }
  } else {
    p.st_k = {2};
  }
  if (auto it = d.find("reduce"); it != d.end()) {
    const std::string rp = root + ".reduce";
    allow_keys(*it, {"C", "divisor", "max_retries"}, rp);
    ReductionParams params;
    if (auto c = it->find("C"); c != it->end()) params.C = as_rational(*c, rp + ".C");
    params.popularity_divisor = uint_or(*it, "divisor", params.popularity_divisor, rp);
    params.max_retries = uint_or(*it, "max_retries", params.max_retries, rp);
    params.seed = p.seed;
    try {
      params.validate();
    } catch (const PreconditionViolation& e) {
      throw ValidationError(rp + ": " + e.what());
    }
    p.reduce = params;
  }
  p.tallies = bool_or(d, "weighted_tallies", false, root);
  p.timings = bool_or(d, "timings", false, root);
  p.attach = bool_or(d, "attach_certificates", true, root);
  return p;
}

template <FieldScalar S>
void run_plan(const ExperimentPlan& p, const Configuration<S>& c, Report& r) {
  Json timings = Json::object();
  const std::size_t n = c.dim();
  const auto distinct = c.distinct_line_ids();
  r.digest = config_digest(c);
  r.field = c.field();
  r.n = n;
  r.line_count = distinct.size();
  for (const auto& fam : c.families()) r.family_sizes.push_back(fam.line_ids.size());
  const bool split = c.families().size() == n;

  auto wants = [](const std::vector<std::string>& xs, const char* x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
  };
  std::vector<BoundId> bounds;
  for (const auto& b : p.bounds) bounds.push_back(*bound_from_string(b));

  std::optional<std::vector<JointRecord<S>>> joints;
  std::optional<std::vector<JointRecord<S>>> multi;
  std::optional<std::map<std::size_t, std::vector<JointRecord<S>>>> generic;
  auto need_joints = [&] {
    if (!joints) timings["joints"] = timed([&] { joints = detect_joints(c); });
  };
  auto need_multi = [&] {
    if (!multi) timings["multijoints"] = timed([&] { multi = detect_multijoints(c); });
  };
  auto need_generic = [&] {
    if (!generic) timings["generic"] = timed([&] { generic = generic_buckets(c); });
  };

  if (wants(p.detectors, "joints")) {
    need_joints();
    r.joints = joints->size();
  }
  if (wants(p.detectors, "multijoints")) {
    if (split) {
      need_multi();
      r.multijoints = multi->size();
    } else {
      r.skipped.push_back({"detector multijoints", "needs " + std::to_string(n) + " families"});
    }
  }
  if (wants(p.detectors, "generic")) {
    need_generic();
    std::map<std::size_t, std::size_t> counts;
    for (const auto& [k, recs] : *generic) counts[k] = recs.size();
    r.generic = std::move(counts);
  }

  for (auto id : bounds) {
    BoundEntry e;
    e.spec.id = id;
    e.spec.n = n;
    e.spec.lines = distinct.size();
    switch (id) {
      case BoundId::joints_basic:
        need_joints();
        e.count = joints->size();
        e.rhs = bound_rhs(e.spec);
        e.ratio = ratio_of(e.count, e.rhs);
        r.bounds.push_back(e);
        break;
      case BoundId::multijoints_3d:
      case BoundId::multijoints_nd:
        if (!split) {
          r.skipped.push_back({"bound " + to_string(id), "needs " + std::to_string(n) + " families"});
          break;
        }
        if (id == BoundId::multijoints_3d && n != 3) {
          r.skipped.push_back({"bound " + to_string(id), "needs n = 3"});
          break;
        }
        need_multi();
        for (auto s : r.family_sizes) e.spec.family_sizes.push_back(s);
        e.count = multi->size();
        e.rhs = bound_rhs(e.spec);
        e.ratio = ratio_of(e.count, e.rhs);
        r.bounds.push_back(e);
        break;
      case BoundId::generic_nd:
      case BoundId::generic_probabilistic:
        need_generic();
        if (generic->empty()) r.skipped.push_back({"bound " + to_string(id), "no generic joints"});
        for (const auto& [k, recs] : *generic) {
          BoundEntry b = e;
          b.spec.k = k;
          b.bucket_k = k;
          b.count = recs.size();
          b.rhs = bound_rhs(b.spec);
          b.ratio = ratio_of(b.count, b.rhs);
          r.bounds.push_back(b);
        }
        break;
      case BoundId::st_rich: {
        if (n != 2) {
          r.skipped.push_back({"bound st_rich", "needs n = 2"});
          break;
        }
        std::vector<Vec<S>> pts;
        for (const auto& ip : incidence_points(c)) pts.push_back(ip.point);
        for (auto k : p.st_k) {
          const auto rich = st_rich_points(pts, c, k);
          BoundEntry b = e;
          b.spec.k = k;
          b.bucket_k = k;
          b.count = rich.rich;
          b.rhs = rich.rhs;
          b.ratio = rich.ratio;
          r.bounds.push_back(b);
        }
        break;
      }
    }
  }

  auto summarize = [&](const PeelingTrace<S>& t, const std::string& key) {
    PeelSummary s;
    s.mode = t.mode;
    s.k = t.k;
    s.joints = t.joints.size();
    s.degree = t.degree_used;
    s.lhs = t.lhs;
    s.rhs = t.rhs;
    s.holds = t.inequality_holds();
    s.verified = verify_trace(t, c).ok;
    if (t.mode != PeelMode::generic && t.line_count > 0) {
      s.certified_constant = Number::of(BigRational(t.rhs)) /
                             Number::power(BigRational(t.line_count), static_cast<unsigned>(n), static_cast<unsigned>(n - 1));
    }
    r.peels.push_back(s);
    if (p.attach) r.certificates[key] = trace_to_json(t);
  };
  for (const auto& mode : p.peel) {
    if (mode == "joints") {
      timings["peel_joints"] = timed([&] { summarize(peel_joints(c), "peel_joints"); });
    } else if (mode == "multijoints") {
      if (!split) {
        r.skipped.push_back({"peel multijoints", "needs " + std::to_string(n) + " families"});
        continue;
      }
      timings["peel_multijoints"] = timed([&] { summarize(peel_multijoints(c), "peel_multijoints"); });
    } else {
      need_generic();
      if (generic->empty()) r.skipped.push_back({"peel generic", "no generic joints"});
      for (const auto& [k, recs] : *generic) {
        const auto key = "peel_generic_k" + std::to_string(k);
        timings[key] = timed([&] { summarize(peel_generic(c, k), key); });
      }
    }
  }

  if (p.reduce) {
    if (n != 3 || !split) {
      r.skipped.push_back({"reduce", "needs n = 3 and three families"});
    } else {
      std::optional<ReductionCertificate<S>> cert;
      try {
        timings["reduce"] = timed([&] { cert = reduce_degree(c, *p.reduce); });
      } catch (const PreconditionViolation& e) {
        r.skipped.push_back({"reduce", e.what()});
      }
      if (cert) {
        const auto check = verify_reduction(*cert, c);
        r.reduction = Json{{"multijoints", cert->multijoints.size()},
                           {"seed_used", cert->seed_used},
                           {"sampling_probability", cert->probability.str()},
                           {"clamped", cert->clamped()},
                           {"sampled", cert->sampled.size()},
                           {"degree", cert->poly.is_zero() ? Json(nullptr) : Json(cert->poly.degree().value())},
                           {"degree_bound", cert->degree_bound},
                           {"popular", cert->popular.size()},
                           {"vanishing_popular", cert->vanishing_popular.size()},
                           {"covered", cert->covered.size()},
                           {"coverage", cert->coverage.str()},
                           {"low_coverage", cert->low_coverage},
                           {"attempts", cert->attempts.size()},
                           {"verified", check.ok}};
        if (p.attach) r.certificates["reduction"] = reduction_to_json(*cert);
      }
    }
  }

  if (p.tallies) {
    need_generic();
    const BigInt L = distinct.size();
    Number s1 = Number::of(0), s32 = Number::of(0), s2 = Number::of(0);
    std::size_t count = 0;
    for (const auto& [k, recs] : *generic) {
      for (const auto& rec : recs) {
        const BigInt m = rec.multiplicity;
        if (m * m > L) continue;
        ++count;
        s1 = s1 + Number::of(BigRational(m));
        s32 = s32 + Number::power(BigRational(m), 3, 2);
        s2 = s2 + Number::of(BigRational(m * m));
      }
    }
    r.tallies = std::vector<WeightedTally>{{"1", s1}, {"3/2", s32}, {"2", s2}};
    r.tally_points = count;
  }
  if (p.timings) r.timings_ms = std::move(timings);
}

inline Json bush_stats_json(const BushStats& s) {
  Json counts = Json::array();
  for (const auto& [lines, points] : s.per_point_line_counts) counts.push_back(Json{{"lines", lines}, {"points", points}});
  return Json{{"N", s.N},
              {"alpha", s.alpha.str()},
              {"n", s.n},
              {"radius", s.radius},
              {"lambda_size", s.lambda_size},
              {"directions", s.directions},
              {"lines_planar", s.lines_planar},
              {"lines_vertical", s.lines_vertical},
              {"k_nominal", s.k_nominal},
              {"k_median", s.k_median},
              {"per_point_line_counts", std::move(counts)},
              {"per_line_points_min", s.per_line_points_min},
              {"per_line_points_median", s.per_line_points_median}};
}

}  // namespace detail

/// Runs a parsed descriptor; relative file paths resolve against `base_dir`.
inline Report run_experiment_json(const Json& descriptor, const std::filesystem::path& base_dir = ".") {
  const auto plan = detail::parse_descriptor(descriptor);
  Report r;
  r.name = plan.name;
  r.seed = plan.seed;
  r.generator = plan.generator;
  const auto& g = plan.generator;
  const std::string gp = "descriptor.generator";
  const auto kind = g["kind"].get<std::string>();
  auto field_of = [&](const char* fallback) {
    auto it = g.find("field");
    return it == g.end() ? field_from_json(Json(fallback), gp + ".field") : field_from_json(*it, gp + ".field");
  };
  auto run = [&](const auto& c) { detail::run_plan(plan, c, r); };
  auto wrap_generation = [&](auto&& fn) {
    try {
      fn();
    } catch (const PreconditionViolation& e) {
      throw ValidationError(gp + ": " + e.what());
    }
  };
  if (kind == "grid" || kind == "box") {
    const FieldSpec f = field_of("rational");
    std::vector<std::uint64_t> sides;
    if (kind == "grid") {
      sides.assign(detail::dim_of(g, gp), detail::as_uint(g["N"], gp + ".N"));
    } else {
      for (auto s : detail::as_ids(g["sides"], gp + ".sides")) sides.push_back(s);
    }
    const bool split = kind == "box" || detail::bool_or(g, "split", true, gp);
    dispatch_field(f, [&](auto tag) {
      using S = typename decltype(tag)::type;
      auto c = box_grid<S>(sides, f);
      if (split) {
        run(c);
      } else {
        run(c.merged());
      }
    });
  } else if (kind == "bush") {
    std::optional<std::pair<Configuration<Rational>, BushStats>> out;
    wrap_generation([&] {
      out.emplace(bush_counterexample(detail::as_uint(g["N"], gp + ".N"), detail::as_rational(g["alpha"], gp + ".alpha"),
                                      detail::dim_of(g, gp)));
    });
    r.generator_stats = detail::bush_stats_json(out->second);
    run(out->first);
  } else if (kind == "random") {
    const FieldSpec f = field_from_json(g["field"], gp + ".field");
    if (!f.is_prime()) throw ValidationError(gp + ".field: random configurations need a prime field");
    std::optional<Configuration<ModP>> c;
    wrap_generation([&] {
      c.emplace(random_config<ModP>(f, detail::dim_of(g, gp), detail::as_uint(g["lines"], gp + ".lines"), plan.seed,
                                    detail::uint_or(g, "families", 1, gp)));
    });
    run(*c);
  } else {
    const std::filesystem::path rel = g["path"].get<std::string>();
    const auto path = rel.is_absolute() ? rel : base_dir / rel;
    if (!std::filesystem::exists(path)) throw ValidationError(gp + ".path: file not found: " + path.string());
    auto loaded = load_configuration(path.string());
    std::visit(
        [&](auto& l) {
          if (!l.dropped.empty()) {
            r.skipped.push_back({"input lines", std::to_string(l.dropped.size()) + " duplicate lines dropped on load"});
          }
          run(l.config);
        },
        loaded);
  }
  return r;
}

inline Report run_experiment(const std::string& descriptor_path) {
  const auto d = parse_json(read_file(descriptor_path), descriptor_path);
  return run_experiment_json(d, std::filesystem::path(descriptor_path).parent_path());
}

}  // namespace jlab
