// Command-line front end: generators, detectors, peeling, reduction,
// certificate verification and descriptor-driven experiments.
//
// Exit codes: 0 success, 1 domain or validation error, 2 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "jointslab/constructions.hpp"
#include "jointslab/harness.hpp"
#include "jointslab/incidence.hpp"
#include "jointslab/io.hpp"
#include "jointslab/peeling.hpp"
#include "jointslab/reduction.hpp"
#include "jointslab/vanishing.hpp"

using namespace jlab;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("error writing to standard output");
  } else {
    write_file(path, text);
  }
}

struct Options {
  // shared
  std::string field = "q";
  std::size_t n = 3;
  std::uint64_t seed = 0;
  std::string out;
  std::string in;
  std::string stats;
  // generators
  std::uint64_t N = 3;
  std::string alpha = "1/2";
  std::size_t lines = 20;
  std::size_t families = 1;
  bool merged = false;
  // detection / peeling
  std::string kind = "joints";
  std::size_t k = 0;
  std::string trace;
  // reduction
  std::string C = "2";
  std::uint64_t divisor = 100;
  std::uint64_t max_retries = 8;
  // visible
  std::uint64_t terms = 1000000;
  // verify / run
  std::string cert;
  std::string descriptor;
  std::string csv;
};

Json records_json(const auto& recs) {
  Json a = Json::array();
  for (const auto& r : recs) {
    Json e{{"point", vec_to_json(r.point)}, {"multiplicity", r.multiplicity}, {"witness", r.witness}, {"incident", r.incident}};
    if (r.bucket_k) e["k"] = *r.bucket_k;
    a.push_back(std::move(e));
  }
  return a;
}

template <class Fn>
void with_config(const std::string& path, Fn&& fn) {
  if (path.empty()) throw ValidationError("--in is required");
  auto loaded = load_configuration(path);
  std::visit(
      [&](auto& l) {
        if (!l.dropped.empty()) {
          std::cerr << "note: " << l.dropped.size() << " duplicate line(s) dropped while loading " << path << "\n";
        }
        fn(l.config);
      },
      loaded);
}

void generate_grid(const Options& o) {
  const FieldSpec f = parse_field_arg(o.field);
  dispatch_field(f, [&](auto tag) {
    using S = typename decltype(tag)::type;
    auto c = grid_config<S>(o.N, o.n, f);
    if (o.merged) c = c.merged();
    emit(o.out, dump(config_to_json(c)));
    if (!o.stats.empty()) {
      emit(o.stats, dump(Json{{"kind", "generator_stats"},
                              {"generator", "grid"},
                              {"N", o.N},
                              {"n", o.n},
                              {"lines", c.size()},
                              {"expected_joints", BigInt(boost::multiprecision::pow(BigInt(o.N), static_cast<unsigned>(o.n))).str()}}));
    }
  });
}

void generate_bush(const Options& o) {
  const auto [c, st] = bush_counterexample(o.N, parse_rational_arg(o.alpha, "--alpha"), o.n);
  emit(o.out, dump(config_to_json(c)));
  if (!o.stats.empty()) {
    Json s = detail::bush_stats_json(st);
    s["kind"] = "generator_stats";
    s["generator"] = "bush";
    s["lines"] = c.size();
    emit(o.stats, dump(s));
  }
}

/// Pencil of lines from the origin through the visible points of {0..N}^n.
void generate_visible(const Options& o) {
  const FieldSpec f = FieldSpec::rational();
  const auto vis = visible_points(o.N, o.n);
  Configuration<Rational> c(f, o.n);
  const auto fam = c.add_family("L");
  for (const auto& y : vis.points) c.add_line(fam, Line<Rational>(zero_vec<Rational>(f, o.n), detail::lattice_vec<Rational>(f, y)));
  emit(o.out, dump(config_to_json(c)));
  if (!o.stats.empty()) {
    emit(o.stats, dump(Json{{"kind", "generator_stats"}, {"generator", "visible"}, {"N", o.N}, {"n", o.n}, {"visible", vis.count}}));
  }
}

void generate_random(const Options& o) {
  const FieldSpec f = parse_field_arg(o.field);
  if (!f.is_prime()) throw ValidationError("--field: random configurations need a prime");
  const auto c = random_config<ModP>(f, o.n, o.lines, o.seed, o.families);
  emit(o.out, dump(config_to_json(c)));
  if (!o.stats.empty()) {
    emit(o.stats, dump(Json{{"kind", "generator_stats"},
                            {"generator", "random"},
                            {"rng", kRngIdentity},
                            {"seed", o.seed},
                            {"lines", c.size()},
                            {"families", o.families}}));
  }
}

void detect(const Options& o) {
  with_config(o.in, [&](const auto& c) {
    Json j{{"kind", "joint_records"}, {"detector", o.kind}, {"field", field_to_json(c.field())}, {"n", c.dim()}};
    if (o.kind == "joints") {
      const auto recs = detect_joints(c);
      j["count"] = recs.size();
      j["records"] = records_json(recs);
    } else if (o.kind == "multijoints") {
      const auto recs = detect_multijoints(c);
      j["count"] = recs.size();
      j["records"] = records_json(recs);
    } else if (o.k != 0) {
      const auto recs = detect_generic_joints(c, o.k);
      j["k"] = o.k;
      j["count"] = recs.size();
      j["records"] = records_json(recs);
    } else {
      Json buckets = Json::array();
      for (const auto& [k, recs] : generic_buckets(c)) {
        buckets.push_back(Json{{"k", k}, {"count", recs.size()}, {"records", records_json(recs)}});
      }
      j["buckets"] = std::move(buckets);
    }
    emit(o.out, dump(j));
  });
}

int peel(const Options& o) {
  int code = 0;
  with_config(o.in, [&](const auto& c) {
    using S = typename std::decay_t<decltype(c)>::Scalar;
    PeelingTrace<S> t;
    if (o.kind == "joints") {
      t = peel_joints(c);
    } else if (o.kind == "multijoints") {
      t = peel_multijoints(c);
    } else {
      if (o.k == 0) throw ValidationError("--k is required for generic peeling");
      t = peel_generic(c, o.k);
    }
    if (!o.trace.empty()) write_file(o.trace, dump(trace_to_json(t)));
    const auto check = verify_trace(t, c);
    std::printf("%s: %s  (%s <= %s, d = %u)  %s\n", to_string(t.mode).c_str(), inequality_statement(t.mode).c_str(),
                t.lhs.str().c_str(), t.rhs.str().c_str(), t.degree_used,
                check.ok ? "certified" : ("NOT certified: " + check.reason).c_str());
    if (!check.ok || !t.inequality_holds()) code = kExitDomain;
  });
  return code;
}

int reduce(const Options& o) {
  int code = 0;
  with_config(o.in, [&](const auto& c) {
    ReductionParams params;
    params.C = parse_rational_arg(o.C, "--C");
    params.popularity_divisor = o.divisor;
    params.seed = o.seed;
    params.max_retries = o.max_retries;
    const auto cert = reduce_degree(c, params);
    emit(o.out, dump(reduction_to_json(cert)));
    const auto check = verify_reduction(cert, c);
    std::fprintf(stderr, "reduction: degree %d (bound %d), coverage %s%s, seed %llu, %s\n",
                 cert.poly.is_zero() ? -1 : cert.poly.degree().value(), cert.degree_bound, cert.coverage.str().c_str(),
                 cert.low_coverage ? " (low)" : "", static_cast<unsigned long long>(cert.seed_used),
                 check.ok ? "verified" : ("NOT verified: " + check.reason).c_str());
    if (!check.ok) code = kExitDomain;
  });
  return code;
}

void visible(const Options& o) {
  const auto vis = visible_points(o.N, o.n, false);
  Json j{{"kind", "visible_points"}, {"N", o.N}, {"d", o.n}, {"count", vis.count}};
  const BigRational density(BigInt(vis.count), boost::multiprecision::pow(BigInt(o.N), static_cast<unsigned>(o.n)));
  j["density"] = Json{{"exact", density.str()}, {"value", real_str(to_real(density))}};
  if (o.n >= 2) {
    const auto z = zeta_inverse(static_cast<unsigned>(o.n), o.terms);
    j["zeta_inverse"] = Json{{"terms", o.terms}, {"value", real_str(z.value)}, {"lower", real_str(z.lower)},
                             {"error_bound", real_str(z.error_bound)}};
    j["difference"] = real_str(to_real(density) - z.value);
  }
  emit(o.out, dump(j));
}

int verify(const Options& o) {
  if (o.cert.empty()) throw ValidationError("--cert is required");
  const auto doc = parse_json(read_file(o.cert), o.cert);
  const auto kind = detail::as_string(detail::member(doc, "kind", "certificate"), "certificate.kind");
  const FieldSpec f = field_from_json(detail::member(doc, "field", "certificate"), "certificate.field");
  CheckResult result;
  dispatch_field(f, [&](auto tag) {
    using S = typename decltype(tag)::type;
    if (kind == "vanishing_certificate") {
      const auto cert = vanishing_from_json<S>(doc, f);
      result = verify_vanishing(cert) ? CheckResult{} : CheckResult::fail("polynomial does not vanish within its degree bound");
      return;
    }
    if (o.in.empty()) throw ValidationError("--in is required for " + kind);
    auto loaded = load_configuration(o.in);
    auto* l = std::get_if<LoadedConfiguration<S>>(&loaded);
    if (!l) throw ValidationError("certificate and configuration are over different fields");
    if (kind == "peeling_trace") {
      result = verify_trace(trace_from_json<S>(doc, f), l->config);
    } else if (kind == "reduction_certificate") {
      result = verify_reduction(reduction_from_json<S>(doc, f), l->config);
    } else {
      throw ValidationError("certificate.kind: cannot verify '" + kind + "'");
    }
  });
  if (result.ok) {
    std::printf("verified: %s\n", kind.c_str());
    return 0;
  }
  std::fprintf(stderr, "rejected: %s: %s\n", kind.c_str(), result.reason.c_str());
  return kExitDomain;
}

void run(const Options& o) {
  if (o.descriptor.empty()) throw ValidationError("--descriptor is required");
  const auto report = run_experiment(o.descriptor);
  emit(o.out, dump(report_to_json(report)));
  if (!o.csv.empty()) write_file(o.csv, report_csv({report}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joints and multijoints of line configurations: detection, certificates and experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_field = [&](CLI::App* s) { s->add_option("--field", o.field, "q or a prime")->capture_default_str(); };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", o.out, "output file (default: standard output)"); };
  auto add_in = [&](CLI::App* s) { s->add_option("--in", o.in, "configuration JSON")->required(); };

  auto* gen = app.add_subcommand("generate", "write a configuration");
  gen->require_subcommand(1);
  auto* g_grid = gen->add_subcommand("grid", "axis-parallel grid, one family per axis");
  g_grid->add_option("--N", o.N)->required();
  g_grid->add_option("--n", o.n)->capture_default_str();
  g_grid->add_flag("--merged", o.merged, "single family");
  add_field(g_grid);
  auto* g_bush = gen->add_subcommand("bush", "rich-bush construction over Q");
  g_bush->add_option("--N", o.N)->required();
  g_bush->add_option("--alpha", o.alpha, "a/b in (0,1)")->capture_default_str();
  g_bush->add_option("--n", o.n)->capture_default_str();
  auto* g_vis = gen->add_subcommand("visible", "lines from the origin through visible lattice points");
  g_vis->add_option("--N", o.N)->required();
  g_vis->add_option("--n", o.n)->capture_default_str();
  auto* g_rand = gen->add_subcommand("random", "uniform random lines over a prime field");
  add_field(g_rand);
  g_rand->add_option("--n", o.n)->capture_default_str();
  g_rand->add_option("--lines", o.lines)->capture_default_str();
  g_rand->add_option("--families", o.families, "1 or n")->capture_default_str();
  g_rand->add_option("--seed", o.seed)->capture_default_str();
  for (auto* s : {g_grid, g_bush, g_vis, g_rand}) {
    add_out(s);
    s->add_option("--stats", o.stats, "stats sidecar file");
  }

  auto* det = app.add_subcommand("detect", "list joints, multijoints or generic joints");
  add_in(det);
  add_out(det);
  det->add_option("--kind", o.kind)->check(CLI::IsMember({"joints", "multijoints", "generic"}))->capture_default_str();
  det->add_option("--k", o.k, "generic bucket (default: all buckets)");

  auto* pl = app.add_subcommand("peel", "peel and certify the counting inequality");
  pl->add_option("mode", o.kind, "joints | multijoints | generic")
      ->check(CLI::IsMember({"joints", "multijoints", "generic"}))
      ->required();
  add_in(pl);
  pl->add_option("--trace", o.trace, "write the peeling trace here");
  pl->add_option("--k", o.k, "bucket for generic peeling");

  auto* red = app.add_subcommand("reduce", "randomized degree reduction over three families");
  add_in(red);
  add_out(red);
  red->add_option("--seed", o.seed)->capture_default_str();
  red->add_option("--C", o.C, "a/b > 1")->capture_default_str();
  red->add_option("--divisor", o.divisor, "popularity divisor")->capture_default_str();
  red->add_option("--max-retries", o.max_retries)->capture_default_str();

  auto* vis = app.add_subcommand("visible", "count visible lattice points against 1/zeta(d)");
  vis->add_option("--N", o.N)->required();
  vis->add_option("--n,--d", o.n, "dimension")->capture_default_str();
  vis->add_option("--terms", o.terms)->capture_default_str();
  add_out(vis);

  auto* ver = app.add_subcommand("verify", "re-check a certificate or trace");
  ver->add_option("--cert", o.cert)->required();
  ver->add_option("--in", o.in, "configuration the certificate refers to");

  auto* rn = app.add_subcommand("run", "run an experiment descriptor");
  rn->add_option("--descriptor", o.descriptor)->required();
  add_out(rn);
  rn->add_option("--csv", o.csv, "ratio table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitDomain;
  }

  try {
    if (g_grid->parsed()) generate_grid(o);
    else if (g_bush->parsed()) generate_bush(o);
    else if (g_vis->parsed()) generate_visible(o);
    else if (g_rand->parsed()) generate_random(o);
    else if (det->parsed()) detect(o);
    else if (pl->parsed()) return peel(o);
    else if (red->parsed()) return reduce(o);
    else if (vis->parsed()) visible(o);
    else if (ver->parsed()) return verify(o);
    else if (rn->parsed()) run(o);
    return 0;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
