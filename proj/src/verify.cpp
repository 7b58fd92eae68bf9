#include "hsl/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "hsl/char_sums.hpp"
#include "hsl/errors.hpp"
#include "hsl/geometry.hpp"
#include "hsl/hidden_flat.hpp"
#include "hsl/hidden_polynomial.hpp"
#include "hsl/hidden_radius.hpp"
#include "hsl/oracle.hpp"
#include "hsl/parallel.hpp"
#include "hsl/rng.hpp"

namespace hsl {

using nlohmann::json;

namespace {

bool is_fast(const VerifyOptions& o) { return o.level == VerifyOptions::Level::fast; }

// 99th-percentile chi-square quantile (Wilson-Hilferty approximation; the
// goodness-of-fit tests here run at hundreds of degrees of freedom where it
// is accurate to a fraction of a percent).
double chi2_quantile_99(double df) {
  const double z = 2.3263478740408408;
  double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

// ---- criterion 1: sphere sizes ----
CheckResult check_sphere_sizes(const VerifyOptions& o) {
  CheckResult res{"sphere-sizes", true, 0, 60, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{3, 5, 7} : std::vector<int>{3, 5, 7, 9, 11};
  std::vector<int> ds = is_fast(o) ? std::vector<int>{2, 3} : std::vector<int>{2, 3, 4, 5};
  json grids = json::array();
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    for (int d : ds) {
      Grid grid(ctx, d);
      std::vector<std::uint64_t> counts(ctx->q(), 0);
      // Direct enumeration is the oracle here.
      const std::int64_t chunks = 64;
      std::vector<std::vector<std::uint64_t>> local(chunks,
                                                    std::vector<std::uint64_t>(ctx->q(), 0));
      par_for(chunks, Exec::parallel, [&](std::int64_t c) {
        std::uint64_t lo = grid.size() * c / chunks, hi = grid.size() * (c + 1) / chunks;
        for (std::uint64_t x = lo; x < hi; ++x) ++local[c][grid.norm(x)];
      });
      for (const auto& l : local)
        for (felem w = 0; w < ctx->q(); ++w) counts[w] += l[w];
      bool ok = true;
      std::uint64_t total = 0;
      for (felem r = 0; r < ctx->q(); ++r) {
        ok &= counts[r] == sphere_size_formula(*ctx, r, d);
        total += counts[r];
      }
      ok &= total == grid.size();
      res.pass &= ok;
      grids.push_back({{"q", q}, {"d", d}, {"exact_match", ok}});
    }
  }
  res.details["grids"] = grids;
  return res;
}

}  // namespace

double salie_closed_vs_brute_max_error(const FieldCtx& ctx, double perturbation) {
  CharSpec quad{CharKind::quadratic, nullptr};
  double worst = 0.0;
  auto tab = additive_char_table(ctx);
  for (felem a = 0; a < ctx.q(); ++a) {
    for (felem b = 0; b < ctx.q(); ++b) {
      cdouble brute = 0.0;
      for (felem c = 1; c < ctx.q(); ++c) {
        felem e = ctx.add(ctx.mul(a, c), ctx.mul(b, ctx.inv(c)));
        brute += static_cast<double>(ctx.quad_char(c)) * tab[e];
      }
      cdouble closed = salie(ctx, a, b).value + cdouble(perturbation, 0.0);
      worst = std::max(worst, std::abs(closed - brute));
    }
  }
  return worst;
}

namespace {

// ---- criterion 2: Salie closed form ----
CheckResult check_salie(const VerifyOptions& o) {
  CheckResult res{"salie-closed-form", true, 0, 30, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{3, 5, 9} : std::vector<int>{3, 5, 7, 9, 13, 25};
  json per_q = json::array();
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    double err = salie_closed_vs_brute_max_error(*ctx);
    double tol = 1e-9 * std::sqrt(static_cast<double>(q));
    res.pass &= err <= tol;
    per_q.push_back({{"q", q}, {"max_error", err}, {"tolerance", tol}});
  }
  res.details["fields"] = per_q;
  return res;
}

// ---- criterion 3: sphere Fourier identity ----
CheckResult check_sphere_fourier(const VerifyOptions& o) {
  CheckResult res{"sphere-fourier", true, 0, 300, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{3, 5} : std::vector<int>{3, 5, 7, 9};
  json per_q = json::array();
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    Grid grid(ctx, 3);
    double err = sphere_fourier_max_error(grid);
    double tol = 1e-8 * q;
    res.pass &= err <= tol;
    per_q.push_back({{"q", q}, {"d", 3}, {"max_error", err}, {"tolerance", tol}});
  }
  res.details["fields"] = per_q;
  return res;
}

// ---- criterion 4: App. B distribution ----
CheckResult check_appb_distribution(const VerifyOptions& o) {
  CheckResult res{"appb-distribution", true, 0, 0, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{7} : std::vector<int>{7, 9, 11};
  json per_q = json::array();
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    double worst = 0.0, worst_total = 0.0, spread = 0.0;
    for (felem r = 0; r < ctx->q(); ++r) {
      auto closed = radius_distribution(ctx, r, 3);
      auto brute = radius_distribution_brute(ctx, r, 3);
      worst = std::max(worst, radius_distribution_max_error(closed, brute));
      worst_total = std::max(worst_total, std::abs(closed.total() - 1.0));
      spread = std::max(spread, brute.class_spread);
    }
    bool ok = worst <= 1e-9 && worst_total <= 1e-9;
    res.pass &= ok;
    per_q.push_back({{"q", q},
                     {"max_pointwise_error", worst},
                     {"max_total_deviation", worst_total},
                     {"max_in_class_spread", spread}});
  }
  res.details["fields"] = per_q;
  return res;
}

// ---- criterion 5: chi(r) classifier ----
CheckResult check_classifier(const VerifyOptions& o) {
  CheckResult res{"chi-classifier", true, 0, 300, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{7} : std::vector<int>{7, 9, 11};
  const int trials = is_fast(o) ? 200 : 1000;
  const int reps = 20;
  json per_q = json::array();
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    auto rates = classifier_success_rates(ctx, 3, reps, trials, o.seed ^ 0x5a5a, Exec::parallel);
    double worst = 1.0;
    json per_r = json::array();
    for (const auto& cs : rates) {
      worst = std::min(worst, cs.rate);
      per_r.push_back({{"r", cs.r},
                       {"rate", cs.rate},
                       {"wilson_lo", cs.ci.lo},
                       {"wilson_hi", cs.ci.hi}});
    }
    res.pass &= worst >= 0.9;
    per_q.push_back({{"q", q}, {"reps", reps}, {"trials", trials}, {"worst_rate", worst},
                     {"per_radius", per_r}});
  }
  res.details["fields"] = per_q;
  return res;
}

// ---- criterion 6: total-variation analysis ----
CheckResult check_tv_analysis(const VerifyOptions& o) {
  CheckResult res{"tv-analysis", true, 0, 0, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{7} : std::vector<int>{7, 11, 13};
  json per_q = json::array();
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    auto table = min_pairwise_tv(ctx, 3);
    double max_diag = 0.0, min_mismatch = 1.0;
    for (felem r = 0; r < ctx->q(); ++r) max_diag = std::max(max_diag, table.at(r, r));
    for (felem r = 1; r < ctx->q(); ++r)
      for (felem r2 = 1; r2 < ctx->q(); ++r2)
        if (r != r2 && ctx->quad_char(r) != ctx->quad_char(r2))
          min_mismatch = std::min(min_mismatch, table.at(r, r2));
    double rescale_err = 0.0;
    for (felem c = 1; c < ctx->q(); ++c) {
      felem c2 = ctx->mul(c, c);
      for (felem r = 0; r < ctx->q(); ++r)
        rescale_err = std::max(rescale_err,
                               std::abs(table.at(ctx->one(), r) - table.at(c2, ctx->mul(c2, r))));
    }
    bool diag_ok = max_diag <= 1e-12;
    bool mismatch_ok = min_mismatch >= 0.9;
    bool min_ok = table.min_distinct > 0.0 && rescale_err <= 1e-12;
    res.pass &= diag_ok && mismatch_ok && min_ok;
    json entry{{"q", q},
               {"max_diagonal", max_diag},
               {"min_chi_mismatched_tv", min_mismatch},
               {"chi_mismatched_ok", mismatch_ok},
               {"min_distinct_tv", table.min_distinct},
               {"rescaling_error", rescale_err}};
    if (ctx->m() == 1) {
      double chain = rescaled_cosine_chain_min(*ctx);
      entry["chain_final_value"] = chain;
      if (!is_fast(o) && q == 13) res.pass &= std::abs(chain - 0.5) <= 1e-9;
    }
    per_q.push_back(entry);
  }
  res.details["fields"] = per_q;
  return res;
}

// ---- criterion 7: walk simulator ----
CheckResult check_walk(const VerifyOptions& o) {
  CheckResult res{"walk-simulator", true, 0, 600, {}};
  json details;

  // (a) unitarity on random states.
  {
    std::vector<std::pair<int, int>> grids =
        is_fast(o) ? std::vector<std::pair<int, int>>{{3, 2}, {5, 3}}
                   : std::vector<std::pair<int, int>>{{3, 2}, {5, 3}, {7, 3}, {11, 3}};
    const int states = is_fast(o) ? 20 : 100;
    double worst = 0.0;
    for (auto [q, d] : grids) {
      auto ctx = FieldCtx::parse(std::to_string(q));
      auto spec = build_walk(ctx, d);
      double t = default_walk_time(*ctx, d);
      Rng rng(o.seed ^ 0x7171, 1);
      for (int i = 0; i < states; ++i) {
        StateVector v(ctx, d);
        for (auto& a : v.amps) a = {rng.next_double() - 0.5, rng.next_double() - 0.5};
        double nrm = std::sqrt(v.norm2());
        for (auto& a : v.amps) a /= nrm;
        worst = std::max(worst, std::abs(walk_evolve(v, spec, t).norm2() - 1.0));
      }
    }
    res.pass &= worst <= 1e-9;
    details["unitarity_max_deviation"] = worst;
  }

  // (b) dense-matrix oracle at q=3, d=2.
  {
    auto ctx = FieldCtx::parse("3");
    auto spec = build_walk(ctx, 2);
    double t = default_walk_time(*ctx, 2);
    Rng rng(o.seed ^ 0x7272, 2);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      StateVector v(ctx, 2);
      for (auto& a : v.amps) a = {rng.next_double() - 0.5, rng.next_double() - 0.5};
      double nrm = std::sqrt(v.norm2());
      for (auto& a : v.amps) a /= nrm;
      auto fast_route = walk_evolve(v, spec, t);
      auto dense = walk_evolve_dense(v, spec, t);
      for (std::size_t j = 0; j < fast_route.amps.size(); ++j)
        worst = std::max(worst, std::abs(fast_route.amps[j] - dense.amps[j]));
    }
    res.pass &= worst <= 1e-8;
    details["dense_oracle_max_deviation"] = worst;
  }

  // (c) spherical symmetry about the sphere center, every radius, q=5, d=3.
  {
    auto ctx = FieldCtx::parse("5");
    auto spec = build_walk(ctx, 3);
    Grid grid(ctx, 3);
    double t = default_walk_time(*ctx, 3);
    PointIndex center = 7;  // arbitrary nonzero center
    double worst = 0.0;
    for (felem r = 0; r < ctx->q(); ++r) {
      if (sphere_size_formula(*ctx, r, 3) == 0) continue;
      auto evolved = walk_evolve(sphere_state(grid, r, center), spec, t);
      std::map<felem, double> first;
      for (PointIndex y = 0; y < grid.size(); ++y) {
        if (y == center) continue;  // the y = x atom is its own class
        felem w = grid.norm(grid.sub(y, center));
        double p = std::norm(evolved.amps[y]);
        auto [it, inserted] = first.try_emplace(w, p);
        if (!inserted) worst = std::max(worst, std::abs(p - it->second));
      }
    }
    res.pass &= worst <= 1e-10;
    details["spherical_symmetry_max_spread"] = worst;
  }

  // (d) walk-lemma bands at q=11, d=3, H a line.
  if (!is_fast(o)) {
    auto ctx = FieldCtx::parse("11");
    auto spec = build_walk(ctx, 3);
    Grid grid(ctx, 3);
    double t = default_walk_time(*ctx, 3);
    double lo = 0.5 / std::log(11.0), hi = 1.5 / std::log(11.0);
    double cap = 10.0 / static_cast<double>(grid.size());
    Rng rng(o.seed ^ 0x7373, 3);
    json lines = json::array();
    for (int trial = 0; trial < 3; ++trial) {
      PointIndex base = rng.below(grid.size());
      PointIndex dir = trial == 0 ? grid.index_of(std::vector<felem>{1, 0, 0})
                                  : static_cast<PointIndex>(1 + rng.below(grid.size() - 1));
      std::vector<PointIndex> gen{base, grid.add(base, dir)};
      Flat line = Flat::affine_span(grid, gen);
      Rng mrng(o.seed ^ 0x7474, trial);
      auto stats = measure_walked_state(line, spec, t, mrng, 0);
      bool band_ok = stats.on_flat_mass >= lo && stats.on_flat_mass <= hi;
      bool off_ok = stats.max_off_flat <= cap;
      res.pass &= band_ok && off_ok;
      lines.push_back({{"on_flat_mass", stats.on_flat_mass},
                       {"band_lo", lo},
                       {"band_hi", hi},
                       {"max_off_flat", stats.max_off_flat},
                       {"off_flat_cap", cap}});
    }
    details["lemma_bands"] = lines;
  }

  res.details = details;
  return res;
}

// ---- criterion 8: hidden flat end to end ----
CheckResult check_hfc(const VerifyOptions& o) {
  CheckResult res{"hfc-end-to-end", true, 0, 900, {}};
  struct Config {
    int q, flat_dim, shots, trials;
  };
  std::vector<Config> configs = is_fast(o)
                                    ? std::vector<Config>{{7, 0, 200, 20}}
                                    : std::vector<Config>{{7, 0, 200, 100}, {11, 1, 400, 100}};
  json per_config = json::array();
  for (const auto& cfg : configs) {
    auto ctx = FieldCtx::parse(std::to_string(cfg.q));
    auto spec = build_walk(ctx, 3);
    Grid grid(ctx, 3);
    std::vector<std::uint8_t> succ(cfg.trials, 0), wrong(cfg.trials, 0);
    par_for(cfg.trials, Exec::parallel, [&](std::int64_t trial) {
      Rng rng(o.seed ^ 0x8181,
              (static_cast<std::uint64_t>(cfg.q) << 32) | static_cast<std::uint64_t>(trial));
      Flat secret = [&] {
        PointIndex base = rng.below(grid.size());
        if (cfg.flat_dim == 0) return Flat::single_point(grid, base);
        PointIndex dir = static_cast<PointIndex>(1 + rng.below(grid.size() - 1));
        std::vector<PointIndex> gen{base, grid.add(base, dir)};
        return Flat::affine_span(grid, gen);
      }();
      HfcConfig hc;
      hc.shots = cfg.shots;
      auto rep = hfc_end_to_end(secret, spec, hc, rng);
      succ[trial] = rep.success;
      wrong[trial] = rep.wrong_flat;
    });
    std::uint64_t s = 0, w = 0;
    for (int i = 0; i < cfg.trials; ++i) {
      s += succ[i];
      w += wrong[i];
    }
    double rate = static_cast<double>(s) / cfg.trials;
    auto ci = wilson_interval(s, cfg.trials);
    res.pass &= rate >= 0.9 && w == 0;
    per_config.push_back({{"q", cfg.q},
                          {"flat_dim", cfg.flat_dim},
                          {"shots", cfg.shots},
                          {"trials", cfg.trials},
                          {"success_rate", rate},
                          {"wilson_lo", ci.lo},
                          {"wilson_hi", ci.hi},
                          {"wrong_flat_events", w}});
  }
  res.details["configs"] = per_config;
  return res;
}

// Partition signature: level-set structure up to relabeling of values, which
// is exactly what the states depend on.
std::string partition_signature(const std::vector<felem>& values) {
  std::map<felem, int> relabel;
  std::string sig;
  for (felem v : values) {
    auto [it, inserted] = relabel.try_emplace(v, static_cast<int>(relabel.size()));
    sig += static_cast<char>('a' + it->second);
  }
  return sig;
}

std::vector<MultiPoly> partition_class_reps(const FieldCtxPtr& ctx, int deg, int d) {
  Grid grid(ctx, d);
  auto mons = monomials_upto(d, deg);
  std::vector<MultiPoly> reps;
  std::set<std::string> seen;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < mons.size(); ++i) count *= ctx->q();
  for (std::uint64_t code = 0; code < count; ++code) {
    MultiPoly h = MultiPoly::zero(ctx, d, deg);
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < h.coeffs.size(); ++i) {
      h.coeffs[i] = static_cast<felem>(rest % ctx->q());
      rest /= ctx->q();
    }
    std::vector<felem> values(grid.size());
    for (PointIndex x = 0; x < grid.size(); ++x) {
      auto c = grid.coords(x);
      values[x] = h.eval(c);
    }
    if (seen.insert(partition_signature(values)).second) reps.push_back(std::move(h));
  }
  return reps;
}

// ---- criterion 9: fidelity engine ----
CheckResult check_fidelity(const VerifyOptions& o) {
  CheckResult res{"fidelity-engine", true, 0, 0, {}};
  auto f3 = FieldCtx::parse("3");

  // Exhaustive over q=3, d=2, deg <= 2: quotiented by the level-set partition
  // the states are built from.
  auto reps = partition_class_reps(f3, 2, 2);
  double worst = 0.0;
  std::vector<double> fvals(reps.size() * reps.size(), 0.0);
  par_for(static_cast<std::int64_t>(reps.size() * reps.size()), Exec::parallel,
          [&](std::int64_t ij) {
            std::size_t i = ij / reps.size(), j = ij % reps.size();
            if (j < i) return;
            double fn = fidelity(reps[i], reps[j], 2);
            double fd = fidelity_dense(reps[i], reps[j], 2);
            fvals[ij] = std::abs(fn - fd);
          });
  for (double e : fvals) worst = std::max(worst, e);
  res.pass &= worst <= 1e-8;
  res.details["q3_partition_classes"] = reps.size();
  res.details["q3_exhaustive_max_error"] = worst;

  // 200 random pairs at q=5.
  {
    auto f5 = FieldCtx::parse("5");
    const int pairs = is_fast(o) ? 40 : 200;
    std::vector<double> errs(pairs, 0.0);
    par_for(pairs, Exec::parallel, [&](std::int64_t i) {
      Rng rng(o.seed ^ 0x9191, static_cast<std::uint64_t>(i));
      auto h1 = random_poly(f5, 2, 1 + static_cast<int>(rng.below(2)), rng);
      auto h2 = random_poly(f5, 2, 1 + static_cast<int>(rng.below(2)), rng);
      errs[i] = std::abs(fidelity(h1, h2, 2) - fidelity_dense(h1, h2, 2));
    });
    double w5 = 0.0;
    for (double e : errs) w5 = std::max(w5, e);
    res.pass &= w5 <= 1e-8;
    res.details["q5_random_pairs"] = pairs;
    res.details["q5_max_error"] = w5;
  }

  // Transversal lines: exactly 1/q.
  {
    json tv = json::array();
    for (int q : {3, 5, 7}) {
      auto ctx = FieldCtx::parse(std::to_string(q));
      auto h1 = MultiPoly::zero(ctx, 2, 1);
      auto h2 = MultiPoly::zero(ctx, 2, 1);
      auto mons = monomials_upto(2, 1);
      for (std::size_t i = 0; i < mons.size(); ++i) {
        if (mons[i] == std::vector<int>{1, 0}) h1.coeffs[i] = ctx->one();
        if (mons[i] == std::vector<int>{0, 1}) h2.coeffs[i] = ctx->one();
      }
      double f = fidelity(h1, h2, 2);
      double err = std::abs(f - 1.0 / q);
      res.pass &= err <= 1e-12;
      tv.push_back({{"q", q}, {"fidelity", f}, {"error", err}});
    }
    res.details["transversal"] = tv;
  }
  return res;
}

// ---- criterion 10: comb bounds dominate ----
CheckResult check_bounds(const VerifyOptions& o) {
  CheckResult res{"comb-bounds", true, 0, 0, {}};
  auto f3 = FieldCtx::parse("3");
  auto reps = partition_class_reps(f3, 2, 2);

  double worst_slack1 = -1e300, worst_slack2 = -1e300;
  std::uint64_t checked = 0, comb2_checked = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    auto sizes_i = level_sets(reps[i], 2);
    for (std::size_t j = 0; j < reps.size(); ++j) {
      auto prof = intersections(reps[i], reps[j], 2);
      auto ab = auto_bounds(prof, sizes_i, 2);
      double f2 = std::pow(fidelity(reps[i], reps[j], 2), 2);
      worst_slack1 = std::max(worst_slack1, f2 - ab.bound1);
      ++checked;
      if (ab.comb2_applicable) {
        worst_slack2 = std::max(worst_slack2, f2 - ab.bound2);
        ++comb2_checked;
      }
    }
  }
  res.details["q3_ordered_class_pairs"] = checked;
  res.details["q3_comb2_applicable"] = comb2_checked;

  const int pairs = is_fast(o) ? 100 : 500;
  std::vector<double> slack1(pairs, -1e300), slack2(pairs, -1e300);
  par_for(pairs, Exec::parallel, [&](std::int64_t i) {
    Rng rng(o.seed ^ 0xa1a1, static_cast<std::uint64_t>(i));
    auto ctx = FieldCtx::parse(i % 2 == 0 ? "5" : "7");
    auto h1 = random_poly(ctx, 2, 1 + static_cast<int>(rng.below(3)), rng);
    auto h2 = random_poly(ctx, 2, 1 + static_cast<int>(rng.below(3)), rng);
    auto prof = intersections(h1, h2, 2);
    auto sizes = level_sets(h1, 2);
    auto ab = auto_bounds(prof, sizes, 2);
    double f2 = std::pow(fidelity(h1, h2, 2), 2);
    slack1[i] = f2 - ab.bound1;
    if (ab.comb2_applicable) slack2[i] = f2 - ab.bound2;
  });
  for (int i = 0; i < pairs; ++i) {
    worst_slack1 = std::max(worst_slack1, slack1[i]);
    worst_slack2 = std::max(worst_slack2, slack2[i]);
  }
  res.pass &= worst_slack1 <= 1e-9 && worst_slack2 <= 1e-9;
  res.details["random_pairs"] = pairs;
  res.details["max_f2_minus_bound1"] = worst_slack1;
  res.details["max_f2_minus_bound2"] = worst_slack2;
  return res;
}

// ---- criterion 11: typicality census ----
CheckResult check_census(const VerifyOptions& o) {
  CheckResult res{"typicality-census", true, 0, 1200, {}};
  std::vector<int> qs = is_fast(o) ? std::vector<int>{3} : std::vector<int>{3, 5, 7};
  json per_q = json::array();
  double cmax = 0.0;
  for (int q : qs) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    auto rep = typicality_census(ctx, 2, 1u << 20, o.seed ^ 0xb1b1);
    double c = rep.fraction * q;
    cmax = std::max(cmax, c);
    per_q.push_back({{"q", q},
                     {"classes", rep.classes},
                     {"failing", rep.failing},
                     {"fraction", rep.fraction},
                     {"fraction_times_q", c},
                     {"wilson_lo", rep.ci.lo},
                     {"wilson_hi", rep.ci.hi},
                     {"sampled", rep.sampled}});
  }
  res.pass &= cmax <= 20.0;
  res.details["fields"] = per_q;
  res.details["max_fraction_times_q"] = cmax;
  return res;
}

// ---- criterion 12: oracle round trips ----
CheckResult check_oracle(const VerifyOptions& o) {
  CheckResult res{"oracle-roundtrip", true, 0, 0, {}};

  // Exhaustive g(pi(s,t), f(t)) = (s,t) over S x T.
  std::vector<std::pair<int, int>> grids =
      is_fast(o) ? std::vector<std::pair<int, int>>{{3, 2}, {3, 3}}
                 : std::vector<std::pair<int, int>>{{3, 2}, {3, 3}, {5, 2}, {5, 3}};
  json round = json::array();
  for (auto [q, d] : grids) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    Grid grid(ctx, d);
    std::vector<PointIndex> all_shifts(grid.size());
    for (PointIndex t = 0; t < grid.size(); ++t) all_shifts[t] = t;
    ShiftedSubsetInstance inst(grid, sphere_points(grid, ctx->one()), all_shifts,
                               o.seed ^ 0xc1c1);
    bool ok = true;
    for (std::uint64_t s = 0; s < inst.subset_size() && ok; ++s) {
      for (std::uint64_t t = 0; t < inst.shift_count() && ok; ++t) {
        auto x = inst.pi(s, t);
        auto y = inst.f(t);
        auto back = inst.g(*x, *y);
        ok = back && back->first == s && back->second == t;
      }
    }
    res.pass &= ok;
    round.push_back({{"q", q}, {"d", d}, {"identity_ok", ok}});
  }
  res.details["roundtrip"] = round;

  // Sampler chi^2 against the exact mixture: S the unit sphere, T a line.
  {
    auto ctx = FieldCtx::parse(is_fast(o) ? "3" : "5");
    int d = 3;
    Grid grid(ctx, d);
    std::vector<PointIndex> line;
    for (felem c = 0; c < ctx->q(); ++c)
      line.push_back(grid.index_of(std::vector<felem>{c, 0, 0}));
    ShiftedSubsetInstance inst(grid, sphere_points(grid, ctx->one()), line, o.seed ^ 0xc2c2);
    auto exact = inst.exact_mixture();
    const std::uint64_t draws = is_fast(o) ? 10000 : 100000;
    Rng rng(o.seed ^ 0xc3c3, 5);
    std::vector<std::uint64_t> hist(grid.size(), 0);
    for (std::uint64_t i = 0; i < draws; ++i) ++hist[inst.sample_state(rng)];
    double stat = 0.0;
    std::uint64_t support = 0;
    bool leaked = false;
    for (PointIndex x = 0; x < grid.size(); ++x) {
      if (exact[x] == 0.0) {
        leaked |= hist[x] != 0;
        continue;
      }
      ++support;
      double expect = exact[x] * static_cast<double>(draws);
      double diff = static_cast<double>(hist[x]) - expect;
      stat += diff * diff / expect;
    }
    double quantile = chi2_quantile_99(static_cast<double>(support - 1));
    bool ok = !leaked && stat <= quantile;
    res.pass &= ok;
    res.details["chi2"] = {{"draws", draws},
                           {"support", support},
                           {"statistic", stat},
                           {"quantile_99", quantile},
                           {"outside_support", leaked}};
  }
  return res;
}

// ---- criterion 13: determinism across thread counts ----
CheckResult check_determinism(const VerifyOptions& o) {
  CheckResult res{"determinism", true, 0, 0, {}};
  int original = thread_count();
  set_thread_count(1);
  auto run1 = run_core_checks(o);
  set_thread_count(8);
  auto run8 = run_core_checks(o);
  set_thread_count(original);
  std::string p1 = verify_payload(run1).dump();
  std::string p8 = verify_payload(run8).dump();
  res.pass = p1 == p8;
  res.details["payload_bytes"] = p1.size();
  res.details["byte_identical"] = res.pass;
  return res;
}

using CheckFn = CheckResult (*)(const VerifyOptions&);

constexpr std::pair<const char*, CheckFn> kCoreChecks[] = {
    {"sphere-sizes", check_sphere_sizes},
    {"salie-closed-form", check_salie},
    {"sphere-fourier", check_sphere_fourier},
    {"appb-distribution", check_appb_distribution},
    {"chi-classifier", check_classifier},
    {"tv-analysis", check_tv_analysis},
    {"walk-simulator", check_walk},
    {"hfc-end-to-end", check_hfc},
    {"fidelity-engine", check_fidelity},
    {"comb-bounds", check_bounds},
    {"typicality-census", check_census},
    {"oracle-roundtrip", check_oracle},
};

CheckResult timed(CheckFn fn, const VerifyOptions& o) {
  auto start = std::chrono::steady_clock::now();
  CheckResult res = fn(o);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.limit_seconds > 0 && res.seconds >= res.limit_seconds) res.pass = false;
  return res;
}

}  // namespace

std::vector<CheckResult> run_core_checks(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : kCoreChecks) out.push_back(timed(fn, opts));
  return out;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  auto out = run_core_checks(opts);
  out.push_back(timed(check_determinism, opts));
  return out;
}

nlohmann::json verify_payload(const std::vector<CheckResult>& results) {
  json checks = json::array();
  for (const auto& r : results)
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"details", r.details}});
  bool all = std::all_of(results.begin(), results.end(),
                         [](const CheckResult& r) { return r.pass; });
  return json{{"checks", checks}, {"all_pass", all}};
}

}  // namespace hsl
