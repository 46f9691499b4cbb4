#pragma once

// JSON encoding of configurations, vanishing certificates, peeling traces and
// reduction certificates. Scalars are strings ("3", "-1/2"); counts and ids
// are JSON integers; big integers are strings. Every document carries "kind".

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "jointslab/configuration.hpp"
#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/peeling.hpp"
#include "jointslab/reduction.hpp"
#include "jointslab/vanishing.hpp"

namespace jlab {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("error writing " + path);
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
}

/// Pretty-printed with a trailing newline; byte-stable for equal documents.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- typed access

namespace detail {

inline const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path + "." + key + ": missing");
  return *it;
}

inline std::uint64_t as_uint(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ValidationError(path + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path + ": expected a string");
  return j.get<std::string>();
}

inline BigRational as_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return BigRational(j.get<std::int64_t>());
  try {
    return parse_rational(as_string(j, path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline BigInt as_bigint(const Json& j, const std::string& path) {
  const auto q = as_rational(j, path);
  if (boost::multiprecision::denominator(q) != 1) throw ValidationError(path + ": expected an integer");
  return boost::multiprecision::numerator(q);
}

inline std::vector<std::size_t> as_ids(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path + ": expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_uint(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::string rational_str(const BigRational& q) { return q.str(); }

}  // namespace detail

// ---------------------------------------------------------------- scalars, fields

inline Json field_to_json(const FieldSpec& f) {
  if (f.is_rational()) return "rational";
  return Json{{"prime", f.modulus()}};
}

inline FieldSpec field_from_json(const Json& j, const std::string& path = "field") {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "rational" || s == "q" || s == "Q") return FieldSpec::rational();
    throw ValidationError(path + ": unknown field '" + s + "'");
  }
  std::uint64_t p = 0;
  if (j.is_number()) {
    p = detail::as_uint(j, path);
  } else {
    p = detail::as_uint(detail::member(j, "prime", path), path + ".prime");
  }
  try {
    return FieldSpec::prime(p);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

/// "q" / "rational" or a prime, as given on the command line.
inline FieldSpec parse_field_arg(const std::string& s) {
  if (s == "q" || s == "Q" || s == "rational") return FieldSpec::rational();
  std::uint64_t p = 0;
  try {
    std::size_t used = 0;
    p = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ValidationError("--field: expected 'q' or a prime, got '" + s + "'");
  }
  return FieldSpec::prime(p);
}

inline BigRational parse_rational_arg(const std::string& s, const std::string& flag) {
  try {
    return detail::parse_rational(s);
  } catch (const ValidationError& e) {
    throw ValidationError(flag + ": " + e.what());
  }
}

template <FieldScalar S>
Json vec_to_json(const Vec<S>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

template <FieldScalar S>
Vec<S> vec_from_json(const FieldSpec& f, const Json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n) throw ValidationError(path + ": expected an array of " + std::to_string(n) + " scalars");
  Vec<S> v;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    try {
      if (j[i].is_number_integer()) {
        v.push_back(S::from_int(f, j[i].get<std::int64_t>()));
      } else {
        v.push_back(S::parse(f, detail::as_string(j[i], p)));
      }
    } catch (const ValidationError& e) {
      throw ValidationError(p + ": " + e.what());
    }
  }
  return v;
}

template <FieldScalar S>
Json points_to_json(const std::vector<Vec<S>>& pts) {
  Json a = Json::array();
  for (const auto& x : pts) a.push_back(vec_to_json(x));
  return a;
}

template <FieldScalar S>
std::vector<Vec<S>> points_from_json(const FieldSpec& f, const Json& j, std::size_t n, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path + ": expected an array");
  std::vector<Vec<S>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec_from_json<S>(f, j[i], n, path + "[" + std::to_string(i) + "]"));
  return out;
}

template <FieldScalar S>
Json line_to_json(const Line<S>& l) {
  return Json{{"id", l.id()}, {"anchor", vec_to_json(l.anchor())}, {"dir", vec_to_json(l.direction())}};
}

template <FieldScalar S>
Line<S> line_from_json(const FieldSpec& f, const Json& j, std::size_t n, const std::string& path) {
  auto anchor = vec_from_json<S>(f, detail::member(j, "anchor", path), n, path + ".anchor");
  auto dir = vec_from_json<S>(f, detail::member(j, "dir", path), n, path + ".dir");
  if (is_zero_vec<S>(dir)) throw ValidationError(path + ".dir: direction is zero");
  return Line<S>(std::move(anchor), std::move(dir));
}

// ---------------------------------------------------------------- configurations

template <FieldScalar S>
Json config_to_json(const Configuration<S>& c) {
  Json fams = Json::array();
  for (const auto& fam : c.families()) {
    Json lines = Json::array();
    for (auto id : fam.line_ids) lines.push_back(line_to_json(c.line(id)));
    fams.push_back(Json{{"name", fam.name}, {"lines", std::move(lines)}});
  }
  return Json{{"kind", "configuration"}, {"field", field_to_json(c.field())}, {"n", c.dim()}, {"families", std::move(fams)}};
}

struct DroppedLine {
  std::string family;
  std::size_t index = 0;  // position in the family's input list
};

template <FieldScalar S>
struct LoadedConfiguration {
  Configuration<S> config;
  std::vector<DroppedLine> dropped;
};

using AnyConfiguration = std::variant<LoadedConfiguration<ModP>, LoadedConfiguration<Rational>>;

template <FieldScalar S>
LoadedConfiguration<S> config_from_json_as(const Json& j, const FieldSpec& f) {
  const std::size_t n = detail::as_uint(detail::member(j, "n", "configuration"), "configuration.n");
  if (n < 2 || n > Configuration<S>::kMaxDim) throw ValidationError("configuration.n: must be between 2 and 8");
  LoadedConfiguration<S> out{Configuration<S>(f, n), {}};
  const auto& fams = detail::member(j, "families", "configuration");
  if (!fams.is_array()) throw ValidationError("configuration.families: expected an array");
  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    const std::string fpath = "configuration.families[" + std::to_string(fi) + "]";
    const auto name = detail::as_string(detail::member(fams[fi], "name", fpath), fpath + ".name");
    const auto fam = out.config.add_family(name);
    const auto& lines = detail::member(fams[fi], "lines", fpath);
    if (!lines.is_array()) throw ValidationError(fpath + ".lines: expected an array");
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const std::string lpath = fpath + ".lines[" + std::to_string(li) + "]";
      if (!out.config.add_line(fam, line_from_json<S>(f, lines[li], n, lpath))) out.dropped.push_back({name, li});
    }
  }
  try {
    out.config.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("configuration.families: ") + e.what());
  }
  return out;
}

inline AnyConfiguration config_from_json(const Json& j) {
  const FieldSpec f = field_from_json(detail::member(j, "field", "configuration"), "configuration.field");
  if (f.is_prime()) return config_from_json_as<ModP>(j, f);
  return config_from_json_as<Rational>(j, f);
}

inline AnyConfiguration load_configuration(const std::string& path) {
  return config_from_json(parse_json(read_file(path), path));
}

/// FNV-1a over the canonical JSON text of a configuration.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 15U];
    h >>= 4U;
  }
  return out;
}

template <FieldScalar S>
std::string config_digest(const Configuration<S>& c) {
  return fnv1a_hex(config_to_json(c).dump());
}

// ---------------------------------------------------------------- vanishing certificates

template <FieldScalar S>
Json vanishing_to_json(const VanishingCertificate<S>& cert) {
  Json j{{"kind", "vanishing_certificate"},
         {"field", field_to_json(cert.poly.field())},
         {"n", cert.poly.nvars()},
         {"poly", cert.poly.str()},
         {"degree", cert.poly.is_zero() ? Json(nullptr) : Json(cert.poly.degree().value())},
         {"degree_bound", cert.degree_bound},
         {"equations", cert.equations},
         {"unknowns", cert.unknowns}};
  if (cert.target == VanishingCertificate<S>::Target::points) {
    j["target"] = "points";
    j["points"] = points_to_json(cert.points);
  } else {
    j["target"] = "lines";
    Json lines = Json::array();
    for (const auto& l : cert.lines) lines.push_back(line_to_json(l));
    j["lines"] = std::move(lines);
  }
  return j;
}

template <FieldScalar S>
VanishingCertificate<S> vanishing_from_json(const Json& j, const FieldSpec& f, const std::string& path = "certificate") {
  const std::size_t n = detail::as_uint(detail::member(j, "n", path), path + ".n");
  VanishingCertificate<S> cert;
  cert.poly = MultiPoly<S>::parse(f, n, detail::as_string(detail::member(j, "poly", path), path + ".poly"));
  cert.degree_bound = static_cast<int>(detail::as_uint(detail::member(j, "degree_bound", path), path + ".degree_bound"));
  cert.equations = detail::as_uint(detail::member(j, "equations", path), path + ".equations");
  cert.unknowns = detail::as_uint(detail::member(j, "unknowns", path), path + ".unknowns");
  const auto target = detail::as_string(detail::member(j, "target", path), path + ".target");
  if (target == "points") {
    cert.target = VanishingCertificate<S>::Target::points;
    cert.points = points_from_json<S>(f, detail::member(j, "points", path), n, path + ".points");
  } else if (target == "lines") {
    cert.target = VanishingCertificate<S>::Target::lines;
    const auto& lines = detail::member(j, "lines", path);
    if (!lines.is_array()) throw ValidationError(path + ".lines: expected an array");
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string lp = path + ".lines[" + std::to_string(i) + "]";
      auto l = line_from_json<S>(f, lines[i], n, lp);
      l.set_id(detail::as_uint(detail::member(lines[i], "id", lp), lp + ".id"));
      cert.lines.push_back(std::move(l));
    }
  } else {
    throw ValidationError(path + ".target: expected 'points' or 'lines'");
  }
  return cert;
}

// ---------------------------------------------------------------- peeling traces

inline std::string inequality_statement(PeelMode m) {
  return m == PeelMode::generic ? "|J| * k <= n * |L| * d" : "|J| <= |L| * d";
}

template <FieldScalar S>
Json trace_to_json(const PeelingTrace<S>& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back(Json{{"removed_line", s.removed_line},
                         {"touched", s.touched},
                         {"removed_points", points_to_json(s.removed_points)},
                         {"remaining", s.remaining}});
  }
  Json j{{"kind", "peeling_trace"},
         {"mode", to_string(t.mode)},
         {"k", t.k},
         {"n", t.n},
         {"field", field_to_json(t.certificate.poly.field())},
         {"line_count", t.line_count},
         {"line_ids", t.line_ids},
         {"joint_count", t.joints.size()},
         {"joints", points_to_json(t.joints)},
         {"degree_used", t.degree_used},
         {"certificate", vanishing_to_json(t.certificate)},
         {"steps", std::move(steps)}};
  if (t.mode == PeelMode::generic) {
    Json rem = Json::array();
    for (const auto& r : t.removals) {
      rem.push_back(Json{{"point", vec_to_json(r.point)}, {"multiplicity", r.multiplicity}, {"removed_lines", r.removed_lines}});
    }
    j["removals"] = std::move(rem);
  }
  j["inequality"] = Json{{"statement", inequality_statement(t.mode)},
                         {"lhs", t.lhs.str()},
                         {"rhs", t.rhs.str()},
                         {"holds", t.inequality_holds()}};
  return j;
}

inline PeelMode peel_mode_from_string(const std::string& s, const std::string& path) {
  if (s == "joints") return PeelMode::joints;
  if (s == "multijoints") return PeelMode::multijoints;
  if (s == "generic") return PeelMode::generic;
  throw ValidationError(path + ": unknown peeling mode '" + s + "'");
}

template <FieldScalar S>
PeelingTrace<S> trace_from_json(const Json& j, const FieldSpec& f) {
  const std::string path = "trace";
  PeelingTrace<S> t;
  t.mode = peel_mode_from_string(detail::as_string(detail::member(j, "mode", path), path + ".mode"), path + ".mode");
  t.k = detail::as_uint(detail::member(j, "k", path), path + ".k");
  t.n = detail::as_uint(detail::member(j, "n", path), path + ".n");
  t.line_count = detail::as_uint(detail::member(j, "line_count", path), path + ".line_count");
  t.line_ids = detail::as_ids(detail::member(j, "line_ids", path), path + ".line_ids");
  t.joints = points_from_json<S>(f, detail::member(j, "joints", path), t.n, path + ".joints");
  t.degree_used = static_cast<unsigned>(detail::as_uint(detail::member(j, "degree_used", path), path + ".degree_used"));
  t.certificate = vanishing_from_json<S>(detail::member(j, "certificate", path), f, path + ".certificate");
  const auto& steps = detail::member(j, "steps", path);
  if (!steps.is_array()) throw ValidationError(path + ".steps: expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string sp = path + ".steps[" + std::to_string(i) + "]";
    PeelStep<S> s;
    s.removed_line = detail::as_uint(detail::member(steps[i], "removed_line", sp), sp + ".removed_line");
    s.touched = detail::as_uint(detail::member(steps[i], "touched", sp), sp + ".touched");
    s.removed_points = points_from_json<S>(f, detail::member(steps[i], "removed_points", sp), t.n, sp + ".removed_points");
    s.remaining = detail::as_uint(detail::member(steps[i], "remaining", sp), sp + ".remaining");
    t.steps.push_back(std::move(s));
  }
  if (t.mode == PeelMode::generic) {
    const auto& rem = detail::member(j, "removals", path);
    if (!rem.is_array()) throw ValidationError(path + ".removals: expected an array");
    for (std::size_t i = 0; i < rem.size(); ++i) {
      const std::string rp = path + ".removals[" + std::to_string(i) + "]";
      PointRemoval<S> r;
      r.point = vec_from_json<S>(f, detail::member(rem[i], "point", rp), t.n, rp + ".point");
      r.multiplicity = detail::as_uint(detail::member(rem[i], "multiplicity", rp), rp + ".multiplicity");
      r.removed_lines = detail::as_uint(detail::member(rem[i], "removed_lines", rp), rp + ".removed_lines");
      t.removals.push_back(std::move(r));
    }
  }
  const auto& ineq = detail::member(j, "inequality", path);
  t.lhs = detail::as_bigint(detail::member(ineq, "lhs", path + ".inequality"), path + ".inequality.lhs");
  t.rhs = detail::as_bigint(detail::member(ineq, "rhs", path + ".inequality"), path + ".inequality.rhs");
  return t;
}

// ---------------------------------------------------------------- reduction certificates

template <FieldScalar S>
Json reduction_to_json(const ReductionCertificate<S>& r) {
  Json attempts = Json::array();
  for (const auto& a : r.attempts) {
    attempts.push_back(Json{{"seed", a.seed}, {"sampled", a.sampled}, {"covered", a.covered}, {"coverage", a.coverage.str()}});
  }
  Json choice = Json::array();
  for (std::size_t i = 0; i < r.choice.size(); ++i) {
    choice.push_back(Json{{"point", vec_to_json(r.multijoints[i])}, {"line", r.choice[i]}});
  }
  return Json{{"kind", "reduction_certificate"},
              {"field", field_to_json(r.poly.field())},
              {"n", 3},
              {"rng", r.rng},
              {"params",
               Json{{"C", r.params.C.str()},
                    {"popularity_divisor", r.params.popularity_divisor},
                    {"seed", r.params.seed},
                    {"max_retries", r.params.max_retries}}},
              {"permutation", r.permutation},
              {"family_sizes", r.family_sizes},
              {"multijoint_count", r.multijoints.size()},
              {"choice", std::move(choice)},
              {"popular", r.popular},
              {"seed_used", r.seed_used},
              {"sampling_probability", r.probability.str()},
              {"clamped", r.clamped()},
              {"d_target", r.d_target.str()},
              {"sampled", r.sampled},
              {"poly", r.poly.str()},
              {"degree", r.poly.is_zero() ? Json(nullptr) : Json(r.poly.degree().value())},
              {"degree_bound", r.degree_bound},
              {"vanishing_popular", r.vanishing_popular},
              {"covered", r.covered},
              {"coverage", r.coverage.str()},
              {"coverage_threshold", kCoverageThreshold.str()},
              {"low_coverage", r.low_coverage},
              {"attempts", std::move(attempts)}};
}

template <FieldScalar S>
ReductionCertificate<S> reduction_from_json(const Json& j, const FieldSpec& f) {
  const std::string path = "reduction";
  using detail::as_ids;
  using detail::as_rational;
  using detail::as_uint;
  using detail::member;
  ReductionCertificate<S> r;
  r.rng = detail::as_string(member(j, "rng", path), path + ".rng");
  const auto& p = member(j, "params", path);
  r.params.C = as_rational(member(p, "C", path + ".params"), path + ".params.C");
  r.params.popularity_divisor = as_uint(member(p, "popularity_divisor", path + ".params"), path + ".params.popularity_divisor");
  r.params.seed = as_uint(member(p, "seed", path + ".params"), path + ".params.seed");
  r.params.max_retries = as_uint(member(p, "max_retries", path + ".params"), path + ".params.max_retries");
  const auto perm = as_ids(member(j, "permutation", path), path + ".permutation");
  const auto sizes = as_ids(member(j, "family_sizes", path), path + ".family_sizes");
  if (perm.size() != 3 || sizes.size() != 3) throw ValidationError(path + ": permutation and family_sizes need 3 entries");
  for (std::size_t i = 0; i < 3; ++i) {
    r.permutation[i] = perm[i];
    r.family_sizes[i] = sizes[i];
  }
  const auto& choice = member(j, "choice", path);
  if (!choice.is_array()) throw ValidationError(path + ".choice: expected an array");
  for (std::size_t i = 0; i < choice.size(); ++i) {
    const std::string cp = path + ".choice[" + std::to_string(i) + "]";
    r.multijoints.push_back(vec_from_json<S>(f, member(choice[i], "point", cp), 3, cp + ".point"));
    r.choice.push_back(as_uint(member(choice[i], "line", cp), cp + ".line"));
  }
  r.popular = as_ids(member(j, "popular", path), path + ".popular");
  r.seed_used = as_uint(member(j, "seed_used", path), path + ".seed_used");
  r.probability = as_rational(member(j, "sampling_probability", path), path + ".sampling_probability");
  r.d_target = as_rational(member(j, "d_target", path), path + ".d_target");
  r.sampled = as_ids(member(j, "sampled", path), path + ".sampled");
  r.poly = MultiPoly<S>::parse(f, 3, detail::as_string(member(j, "poly", path), path + ".poly"));
  r.degree_bound = static_cast<int>(as_uint(member(j, "degree_bound", path), path + ".degree_bound"));
  r.vanishing_popular = as_ids(member(j, "vanishing_popular", path), path + ".vanishing_popular");
  r.covered = as_ids(member(j, "covered", path), path + ".covered");
  r.coverage = as_rational(member(j, "coverage", path), path + ".coverage");
  const auto& low = member(j, "low_coverage", path);
  if (!low.is_boolean()) throw ValidationError(path + ".low_coverage: expected a boolean");
  r.low_coverage = low.get<bool>();
  const auto& attempts = member(j, "attempts", path);
  if (!attempts.is_array()) throw ValidationError(path + ".attempts: expected an array");
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    const std::string ap = path + ".attempts[" + std::to_string(i) + "]";
    ReductionAttempt a;
    a.seed = as_uint(member(attempts[i], "seed", ap), ap + ".seed");
    a.sampled = as_uint(member(attempts[i], "sampled", ap), ap + ".sampled");
    a.covered = as_uint(member(attempts[i], "covered", ap), ap + ".covered");
    a.coverage = as_rational(member(attempts[i], "coverage", ap), ap + ".coverage");
    r.attempts.push_back(a);
  }
  return r;
}

}  // namespace jlab
