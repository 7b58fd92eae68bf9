// hsl: deterministic experiment runner for the hidden-structure simulators.
//
// Subcommands: field, sums, sphere, oracle, hrp, hfc, hpp, verify. Every run
// echoes its configuration into a stable JSON envelope; identical seeds give
// byte-identical payloads at any thread count.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hsl/char_sums.hpp"
#include "hsl/errors.hpp"
#include "hsl/field.hpp"
#include "hsl/geometry.hpp"
#include "hsl/hidden_flat.hpp"
#include "hsl/hidden_polynomial.hpp"
#include "hsl/hidden_radius.hpp"
#include "hsl/oracle.hpp"
#include "hsl/parallel.hpp"
#include "hsl/result_io.hpp"
#include "hsl/rng.hpp"
#include "hsl/verify.hpp"

using nlohmann::json;
using namespace hsl;

namespace {

struct Options {
  std::string q;  // "q" or "p^m"
  std::uint32_t p = 0, m = 1;
  int d = 3;
  std::string r = "0", r2, a = "0", b = "0", k;
  std::string op, eta = "trivial", method = "closed";
  int bins = 20, reps = 20, shots = 200, deg = 2, pairs = 20, flat_dim = 0, time_scan = 0;
  std::uint64_t seed = 1, sample_limit = 1u << 20;
  double copies_n = 100.0, copies_eps = 0.01;
  int threads = 0;
  std::string out, format = "json", level = "full";
  int shift_flat_dim = -1;

  json echo(const std::string& subcommand) const {
    return json{{"subcommand", subcommand}, {"q", q},       {"d", d},
                {"r", r},                   {"r2", r2},     {"a", a},
                {"b", b},                   {"k", k},       {"op", op},
                {"eta", eta},               {"method", method},
                {"bins", bins},             {"reps", reps}, {"shots", shots},
                {"deg", deg},               {"pairs", pairs},
                {"flat_dim", flat_dim},     {"time_scan", time_scan},
                {"seed", seed},             {"threads", threads},
                {"format", format},         {"level", level}};
  }

  FieldCtxPtr ctx() const {
    if (!q.empty()) return FieldCtx::parse(q);
    if (p != 0) return FieldCtx::make(p, m);
    throw ValidationError("specify the field via --q or --p/--m");
  }
};

json sum_record(const FieldCtx& ctx, const std::string& kind, felem a, felem b,
                const SumValue& v) {
  return json{{"q", ctx.q()},
              {"kind", kind},
              {"a", ctx.format(a)},
              {"b", ctx.format(b)},
              {"re", v.value.real()},
              {"im", v.value.imag()},
              {"method", v.method == SumMethod::closed_form ? "closed-form" : "brute-force"}};
}

json flat_json(const Flat& f) {
  json basis = json::array();
  for (PointIndex b : f.basis()) basis.push_back(f.grid().format(b));
  return json{{"basepoint", f.grid().format(f.base())}, {"basis", basis}, {"dim", f.dim()}};
}

// Random flat of the given dimension, deterministic in rng.
Flat random_flat(const Grid& grid, int dim, Rng& rng) {
  while (true) {
    std::vector<PointIndex> pts{rng.below(grid.size())};
    for (int i = 0; i < dim; ++i) pts.push_back(rng.below(grid.size()));
    Flat f = Flat::affine_span(grid, pts);
    if (f.dim() == dim) return f;
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Flattens an array-of-objects payload into CSV (the lossy projection).
std::string payload_to_csv(const json& rows) {
  if (!rows.is_array() || rows.empty()) return "";
  std::vector<std::string> cols;
  for (auto& [key, val] : rows[0].items()) cols.push_back(key);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& v = row.at(cols[i]);
      out += (i ? "," : "");
      out += v.is_string() ? csv_escape(v.get<std::string>()) : v.dump();
    }
    out += "\n";
  }
  return out;
}

struct Emitter {
  const Options& opt;
  std::string command;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  int emit(const json& payload, std::optional<bool> pass = std::nullopt,
           const json* csv_rows = nullptr) const {
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string text;
    if (opt.format == "csv") {
      if (!csv_rows) throw ValidationError("csv output is not defined for this subcommand");
      text = payload_to_csv(*csv_rows);
    } else if (opt.format == "json") {
      text = make_envelope(command, opt.echo(command), payload, wall, pass).dump(2) + "\n";
    } else {
      throw ValidationError("unknown format '" + opt.format + "'");
    }
    if (opt.out.empty())
      std::cout << text;
    else
      write_text_atomic(opt.out, text);
    return pass && !*pass ? 1 : 0;
  }
};

int cmd_field(const Options& opt, const std::string& action) {
  auto ctx = opt.ctx();
  Emitter em{opt, "field " + action};
  if (action == "info") {
    json mod = json::array();
    for (auto c : ctx->modulus()) mod.push_back(c);
    return em.emit(json{{"p", ctx->p()}, {"m", ctx->m()}, {"q", ctx->q()}, {"modulus", mod},
                        {"name", ctx->name()}});
  }
  felem a = ctx->parse_element(opt.a);
  felem b = ctx->parse_element(opt.b);
  json out{{"a", ctx->format(a)}};
  if (opt.op == "add")
    out["result"] = ctx->format(ctx->add(a, b));
  else if (opt.op == "sub")
    out["result"] = ctx->format(ctx->sub(a, b));
  else if (opt.op == "mul")
    out["result"] = ctx->format(ctx->mul(a, b));
  else if (opt.op == "inv")
    out["result"] = ctx->format(ctx->inv(a));
  else if (opt.op == "trace")
    out["result"] = ctx->trace(a);
  else if (opt.op == "chi")
    out["result"] = ctx->quad_char(a);
  else if (opt.op == "sqrt") {
    auto r = ctx->sqrt_of(a);
    if (r)
      out["result"] = ctx->format(*r);
    else
      out["result"] = nullptr;
  } else {
    throw ValidationError("unknown field op '" + opt.op + "'");
  }
  if (opt.op == "add" || opt.op == "sub" || opt.op == "mul") out["b"] = ctx->format(b);
  return em.emit(out);
}

int cmd_sums(const Options& opt, const std::string& action) {
  auto ctx = opt.ctx();
  Emitter em{opt, "sums " + action};
  if (action == "gauss") {
    auto v = gauss_sum(*ctx, opt.method == "brute" ? SumMethod::brute_force
                                                   : SumMethod::closed_form);
    return em.emit(sum_record(*ctx, "gauss", 0, 0, v));
  }
  felem a = ctx->parse_element(opt.a);
  felem b = ctx->parse_element(opt.b);
  if (action == "salie") {
    SumValue v = opt.method == "brute"
                     ? kloosterman(*ctx, a, b, CharSpec{CharKind::quadratic, ctx})
                     : salie(*ctx, a, b);
    return em.emit(sum_record(*ctx, "salie", a, b, v));
  }
  if (action == "kloosterman") {
    CharSpec eta{opt.eta == "quadratic" ? CharKind::quadratic : CharKind::trivial, ctx};
    auto v = kloosterman(*ctx, a, b, eta);
    return em.emit(sum_record(*ctx, "kloosterman-" + opt.eta, a, b, v));
  }
  if (action == "sato-tate") {
    auto h = sato_tate_histogram(*ctx, opt.bins);
    json bins = json::array();
    for (auto c : h.bins) bins.push_back(c);
    return em.emit(json{{"q", ctx->q()},
                        {"bins", bins},
                        {"samples", h.samples},
                        {"l1_to_semicircle", h.l1_to_semicircle},
                        {"max_abs_cos", h.max_abs_cos}});
  }
  throw ValidationError("unknown sums action '" + action + "'");
}

int cmd_sphere(const Options& opt, const std::string& action) {
  auto ctx = opt.ctx();
  Emitter em{opt, "sphere " + action};
  felem r = ctx->parse_element(opt.r);
  if (action == "size") {
    return em.emit(json{{"q", ctx->q()}, {"d", opt.d}, {"r", ctx->format(r)},
                        {"size", sphere_size_formula(*ctx, r, opt.d)}});
  }
  Grid grid(ctx, opt.d);
  if (action == "points") {
    auto pts = sphere_points(grid, r);
    json arr = json::array();
    for (PointIndex x : pts) arr.push_back(grid.format(x));
    return em.emit(json{{"q", ctx->q()}, {"d", opt.d}, {"r", ctx->format(r)},
                        {"count", pts.size()}, {"points", arr}});
  }
  if (action == "fourier") {
    if (opt.k.empty()) throw ValidationError("sphere fourier needs --k");
    PointIndex k = grid.parse_point(opt.k);
    json out{{"q", ctx->q()}, {"d", opt.d}, {"r", ctx->format(r)}, {"k", grid.format(k)},
             {"norm_k", ctx->format(grid.norm(k))}};
    auto brute = sphere_fourier_brute(grid, r, k);
    out["brute"] = {{"re", brute.real()}, {"im", brute.imag()}};
    if (k != 0) {
      auto closed = sphere_fourier_closed(*ctx, r, grid.norm(k), opt.d);
      out["closed"] = {{"re", closed.real()}, {"im", closed.imag()}};
    }
    return em.emit(out);
  }
  throw ValidationError("unknown sphere action '" + action + "'");
}

int cmd_oracle(const Options& opt) {
  auto ctx = opt.ctx();
  Grid grid(ctx, opt.d);
  felem r = ctx->parse_element(opt.r);
  int tdim = opt.shift_flat_dim < 0 ? opt.d : opt.shift_flat_dim;
  std::vector<PointIndex> shifts;
  if (tdim >= opt.d) {
    shifts.resize(grid.size());
    for (PointIndex t = 0; t < grid.size(); ++t) shifts[t] = t;
  } else {
    // Axis-aligned flat through the origin.
    std::vector<PointIndex> gen{0};
    for (int j = 0; j < tdim; ++j) {
      std::vector<felem> e(opt.d, 0);
      e[j] = ctx->one();
      gen.push_back(grid.index_of(e));
    }
    shifts = Flat::affine_span(grid, gen).points();
  }
  ShiftedSubsetInstance inst(grid, sphere_points(grid, r), shifts, opt.seed);
  HiddenRadiusOracle hrp(grid, r, opt.seed);
  Rng rng(opt.seed, 0xdead);
  run_oracle_session(inst, &hrp, rng, std::cin, std::cout);
  return 0;
}

int cmd_hrp(const Options& opt, const std::string& action) {
  auto ctx = opt.ctx();
  Emitter em{opt, "hrp " + action};
  felem r = ctx->parse_element(opt.r);
  if (action == "dist") {
    auto dist = (opt.method == "brute" || opt.d % 2 == 0)
                    ? radius_distribution_brute(ctx, r, opt.d)
                    : radius_distribution(ctx, r, opt.d);
    json classes = json::array();
    for (felem w = 0; w < ctx->q(); ++w)
      classes.push_back({{"w", ctx->format(w)},
                         {"per_k_prob", dist.class_prob[w]},
                         {"class_size", dist.class_size[w]}});
    return em.emit(json{{"r", ctx->format(r)}, {"d", opt.d}, {"atom_k0", dist.atom0},
                        {"classes", classes}, {"total", dist.total()}});
  }
  if (action == "classify") {
    Grid grid(ctx, opt.d);
    RadiusSampler sampler(grid, radius_distribution(ctx, r, opt.d));
    Rng rng(opt.seed, 1);
    auto rep = classify_chi_r(grid, [&](Rng& g) { return sampler.draw(g); }, rng, opt.reps);
    const char* verdicts[] = {"chi=+1", "chi=-1", "r=0", "inconclusive"};
    int truth_chi = ctx->quad_char(r);
    std::string truth = r == 0 ? "r=0" : (truth_chi == 1 ? "chi=+1" : "chi=-1");
    std::string verdict = verdicts[static_cast<int>(rep.verdict)];
    return em.emit(json{{"r", ctx->format(r)}, {"reps", opt.reps},
                        {"verdict", verdict}, {"kept", rep.kept},
                        {"discarded", rep.discarded}, {"truth", truth},
                        {"correct", verdict == truth}});
  }
  if (action == "tv") {
    if (!opt.r2.empty()) {
      felem r2 = ctx->parse_element(opt.r2);
      double tv = total_variation(radius_distribution(ctx, r, opt.d),
                                  radius_distribution(ctx, r2, opt.d));
      return em.emit(json{{"r", ctx->format(r)}, {"r2", ctx->format(r2)}, {"tv", tv}});
    }
    auto table = min_pairwise_tv(ctx, opt.d);
    json rows = json::array();
    for (felem i = 0; i < ctx->q(); ++i) {
      json row = json::array();
      for (felem j = 0; j < ctx->q(); ++j) row.push_back(table.at(i, j));
      rows.push_back(row);
    }
    json out{{"d", opt.d}, {"table", rows}, {"min_distinct", table.min_distinct}};
    if (ctx->m() == 1) out["rescaled_chain_min"] = rescaled_cosine_chain_min(*ctx);
    return em.emit(out);
  }
  if (action == "evidence") {
    auto ev = kloosterman_distribution_evidence(ctx, opt.d);
    return em.emit(json{{"d", opt.d},
                        {"min_distinct_tv", ev.table.min_distinct},
                        {"min_distinct_nonzero_tv", ev.min_distinct_nonzero},
                        {"totals", ev.totals}});
  }
  throw ValidationError("unknown hrp action '" + action + "'");
}

int cmd_hfc(const Options& opt) {
  auto ctx = opt.ctx();
  Emitter em{opt, "hfc run"};
  Grid grid(ctx, opt.d);
  auto spec = build_walk(ctx, opt.d);
  Rng rng(opt.seed, 2);
  Flat secret = random_flat(grid, opt.flat_dim, rng);

  HfcConfig cfg;
  cfg.shots = opt.shots;
  auto rep = hfc_end_to_end(secret, spec, cfg, rng);

  double t0 = default_walk_time(*ctx, opt.d);
  Rng mrng(opt.seed, 3);
  auto stats = measure_walked_state(secret, spec, t0, mrng, opt.shots);
  json empirical = json::array();
  for (PointIndex y = 0; y < grid.size(); ++y)
    if (stats.hist[y] > 0)
      empirical.push_back({{"point", grid.format(y)},
                           {"prob", static_cast<double>(stats.hist[y]) / opt.shots}});

  json payload{{"secret", flat_json(secret)},
               {"success", rep.success},
               {"wrong_flat", rep.wrong_flat},
               {"dim_found", rep.dim_found},
               {"support", rep.support},
               {"accept_threshold", rep.accept_threshold},
               {"walk_time", t0},
               {"on_flat_mass", stats.on_flat_mass},
               {"max_off_flat", stats.max_off_flat},
               {"empirical", empirical}};
  if (rep.recovered) payload["recovered"] = flat_json(*rep.recovered);

  if (opt.time_scan > 1) {
    json scan = json::array();
    double best_mass = -1.0, best_t = t0;
    for (int i = 0; i < opt.time_scan; ++i) {
      double t = t0 * (0.5 + 1.0 * i / (opt.time_scan - 1));
      Rng srng(opt.seed, 100 + i);
      auto s = measure_walked_state(secret, spec, t, srng, 0);
      scan.push_back({{"time", t}, {"on_flat_mass", s.on_flat_mass}});
      if (s.on_flat_mass > best_mass) {
        best_mass = s.on_flat_mass;
        best_t = t;
      }
    }
    payload["time_scan"] = scan;
    payload["best_time"] = best_t;
    payload["best_on_flat_mass"] = best_mass;
  }
  return em.emit(payload, rep.success);
}

int cmd_hpp(const Options& opt, const std::string& action) {
  auto ctx = opt.ctx();
  Emitter em{opt, "hpp " + action};
  if (action == "census") {
    auto rep = typicality_census(ctx, opt.deg, opt.sample_limit, opt.seed);
    json payload{{"deg", opt.deg},
                 {"classes", rep.classes},
                 {"tested", rep.tested},
                 {"failing", rep.failing},
                 {"fraction", rep.fraction},
                 {"fraction_times_q", rep.fraction * ctx->q()},
                 {"wilson_lo", rep.ci.lo},
                 {"wilson_hi", rep.ci.hi},
                 {"sampled", rep.sampled}};
    json rows = json::array({payload});
    return em.emit(payload, std::nullopt, &rows);
  }
  if (action != "fidelity" && action != "bounds")
    throw ValidationError("unknown hpp action '" + action + "'");

  Rng master(opt.seed, 4);
  json rows = json::array();
  for (int i = 0; i < opt.pairs; ++i) {
    Rng rng = master.split(i);
    auto h1 = random_poly(ctx, 2, 1 + static_cast<int>(rng.below(opt.deg)), rng);
    auto h2 = random_poly(ctx, 2, 1 + static_cast<int>(rng.below(opt.deg)), rng);
    double f = fidelity(h1, h2, opt.d);
    json row{{"h", h1.str()}, {"h2", h2.str()}, {"fidelity", f}};
    if (action == "bounds") {
      auto prof = intersections(h1, h2, opt.d);
      auto sizes = level_sets(h1, opt.d);
      auto ab = auto_bounds(prof, sizes, opt.d);
      row["bound1"] = ab.bound1;
      row["bound2"] = ab.comb2_applicable ? json(ab.bound2) : json();
      row["alpha1"] = ab.alpha1;
      row["beta1"] = ab.beta1;
      row["gamma"] = ab.gamma;
      row["delta"] = ab.delta;
      if (f < 1.0 && f > 0.0)
        row["copies_for_target"] = copies_needed(f, opt.copies_n, opt.copies_eps).copies;
      else
        row["copies_for_target"] = json();
    }
    rows.push_back(row);
  }
  return em.emit(json{{"pairs", rows}}, std::nullopt, &rows);
}

int cmd_verify(const Options& opt) {
  Emitter em{opt, "verify"};
  VerifyOptions vo;
  vo.level = opt.level == "fast" ? VerifyOptions::Level::fast : VerifyOptions::Level::full;
  vo.seed = opt.seed;
  auto results = run_verify(vo);
  bool all = true;
  json timing = json::object();
  for (const auto& r : results) {
    all &= r.pass;
    timing[r.name] = r.seconds;
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << "  (" << r.seconds << " s)\n";
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - em.start).count();
  json env = make_envelope("verify", opt.echo("verify"), verify_payload(results), wall, all);
  env["timing"] = timing;
  std::string text = env.dump(2) + "\n";
  if (opt.out.empty())
    std::cout << text;
  else
    write_text_atomic(opt.out, text);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  if (const char* env = std::getenv("HSL_THREADS")) opt.threads = std::atoi(env);

  CLI::App app{"hidden-structure simulation lab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--q", opt.q, "field size, q or p^m");
  app.add_option("--p", opt.p, "field characteristic (with --m)");
  app.add_option("--m", opt.m, "extension degree");
  app.add_option("--d", opt.d, "ambient dimension");
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--threads", opt.threads, "worker thread count (HSL_THREADS fallback)");
  app.add_option("--out", opt.out, "output path (written atomically)");
  app.add_option("--format", opt.format, "json|csv");

  auto* field = app.add_subcommand("field", "finite-field arithmetic");
  std::string field_action = "info";
  field->add_option("action", field_action, "info|eval")->required();
  field->add_option("--op", opt.op, "add|sub|mul|inv|trace|chi|sqrt");
  field->add_option("--a", opt.a);
  field->add_option("--b", opt.b);

  auto* sums = app.add_subcommand("sums", "exponential sums");
  std::string sums_action;
  sums->add_option("action", sums_action, "gauss|salie|kloosterman|sato-tate")->required();
  sums->add_option("--a", opt.a);
  sums->add_option("--b", opt.b);
  sums->add_option("--eta", opt.eta, "trivial|quadratic");
  sums->add_option("--method", opt.method, "closed|brute");
  sums->add_option("--bins", opt.bins);

  auto* sphere = app.add_subcommand("sphere", "spheres in F_q^d");
  std::string sphere_action;
  sphere->add_option("action", sphere_action, "size|points|fourier")->required();
  sphere->add_option("--r", opt.r, "radius");
  sphere->add_option("--k", opt.k, "frequency point, elements joined by |");

  auto* oracle = app.add_subcommand("oracle", "black-box adversary session (NDJSON on stdin)");
  std::string oracle_action = "session";
  oracle->add_option("action", oracle_action, "session");
  oracle->add_option("--r", opt.r, "sphere radius for S");
  oracle->add_option("--shift-flat-dim", opt.shift_flat_dim,
                     "dimension of the shift flat T (default: all of F_q^d)");

  auto* hrp = app.add_subcommand("hrp", "hidden radius experiments");
  std::string hrp_action;
  hrp->add_option("action", hrp_action, "dist|classify|tv|evidence")->required();
  hrp->add_option("--r", opt.r);
  hrp->add_option("--r2", opt.r2);
  hrp->add_option("--reps", opt.reps);
  hrp->add_option("--method", opt.method, "closed|brute");

  auto* hfc = app.add_subcommand("hfc", "hidden flat of centers experiments");
  std::string hfc_action = "run";
  hfc->add_option("action", hfc_action, "run");
  hfc->add_option("--flat-dim", opt.flat_dim);
  hfc->add_option("--shots", opt.shots);
  hfc->add_option("--time-scan", opt.time_scan, "scan this many walk times");

  auto* hpp = app.add_subcommand("hpp", "hidden polynomial experiments");
  std::string hpp_action;
  hpp->add_option("action", hpp_action, "fidelity|bounds|census")->required();
  hpp->add_option("--deg", opt.deg);
  hpp->add_option("--pairs", opt.pairs);
  hpp->add_option("--sample-limit", opt.sample_limit);
  hpp->add_option("--copies-n", opt.copies_n);
  hpp->add_option("--copies-eps", opt.copies_eps);

  auto* verify = app.add_subcommand("verify", "run the named acceptance checks");
  verify->add_option("--level", opt.level, "fast|full");

  CLI11_PARSE(app, argc, argv);

  try {
    set_thread_count(opt.threads);
    if (*field) return cmd_field(opt, field_action);
    if (*sums) return cmd_sums(opt, sums_action);
    if (*sphere) return cmd_sphere(opt, sphere_action);
    if (*oracle) return cmd_oracle(opt);
    if (*hrp) return cmd_hrp(opt, hrp_action);
    if (*hfc) return cmd_hfc(opt);
    if (*hpp) return cmd_hpp(opt, hpp_action);
    if (*verify) return cmd_verify(opt);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
