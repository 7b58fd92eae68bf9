#include "hsl/hidden_flat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "hsl/char_sums.hpp"
#include "hsl/errors.hpp"

namespace hsl {

WalkSpec build_walk(FieldCtxPtr ctx, int d) {
  WalkSpec spec;
  spec.ctx = ctx;
  spec.dim = d;
  spec.lambda0 = static_cast<double>(sphere_size_formula(*ctx, ctx->one(), d));
  spec.eigen_by_class.assign(ctx->q(), 0.0);
  for (felem w = 0; w < ctx->q(); ++w) {
    cdouble lam = sphere_fourier_closed(*ctx, ctx->one(), w, d);
    spec.max_imag = std::max(spec.max_imag, std::abs(lam.imag()));
    spec.eigen_by_class[w] = lam.real();
  }
  return spec;
}

double default_walk_time(const FieldCtx& ctx, int d) {
  double qd1 = std::pow(static_cast<double>(ctx.q()), d - 1);
  return 1.0 / std::sqrt(qd1 * std::log(static_cast<double>(ctx.q())));
}

StateVector walk_evolve(const StateVector& v, const WalkSpec& spec, double t) {
  Grid grid(v.ctx, v.dim);
  StateVector hat = fourier(v);
  for (PointIndex k = 1; k < grid.size(); ++k) {
    double lam = spec.eigen_by_class[grid.norm(k)];
    double ang = -lam * t;
    hat.amps[k] *= cdouble(std::cos(ang), std::sin(ang));
  }
  // k = 0: the modified operator has eigenvalue 0 there, phase 1.
  return inverse_fourier(hat);
}

StateVector walk_evolve_dense(const StateVector& v, const WalkSpec& spec, double t) {
  Grid grid(spec.ctx, spec.dim);
  const std::size_t n = grid.size();
  if (n > 4096) throw ResourceCapError("dense walk oracle capped at 4096 amplitudes");

  // A explicitly from its definition: column x has a 1 in row x + s per
  // sphere point s; then remove the uniform mode's eigenvalue.
  Matrix a(n);
  auto sphere = sphere_points(grid, v.ctx->one());
  for (PointIndex x = 0; x < n; ++x)
    for (PointIndex s : sphere) a(grid.add(x, s), x) += 1.0;
  const double l0 = static_cast<double>(sphere.size()) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) -= l0;

  SymEigen eig = sym_eigen(a);
  // exp(-iAt) v = V diag(exp(-i lambda t)) V^T v.
  std::vector<cdouble> proj(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    cdouble dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += eig.vectors(i, k) * v.amps[i];
    double ang = -eig.values[k] * t;
    proj[k] = dot * cdouble(std::cos(ang), std::sin(ang));
  }
  StateVector out(v.ctx, v.dim);
  for (std::size_t i = 0; i < n; ++i) {
    cdouble acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += eig.vectors(i, k) * proj[k];
    out.amps[i] = acc;
  }
  return out;
}

StateVector prepare_sphere_state(const Grid& grid, PointIndex center, felem r) {
  return sphere_state(grid, r, center);
}

StateVector prepare_rho_h_sample(const Flat& flat, Rng& rng) {
  auto pts = flat.points();
  PointIndex h = pts[rng.below(pts.size())];
  return prepare_sphere_state(flat.grid(), h);
}

std::vector<double> walked_output_distribution(const WalkSpec& spec, double t) {
  Grid grid(spec.ctx, spec.dim);
  StateVector evolved = walk_evolve(prepare_sphere_state(grid, 0), spec, t);
  std::vector<double> prob(evolved.amps.size());
  for (std::size_t i = 0; i < prob.size(); ++i) prob[i] = std::norm(evolved.amps[i]);
  return prob;
}

namespace {

// Cumulative distribution for fast sampling.
std::vector<double> cdf_of(const std::vector<double>& prob) {
  std::vector<double> cdf(prob.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    acc += prob[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.next_double() * cdf.back();
  return static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace

WalkMeasurementStats measure_walked_state(const Flat& flat, const WalkSpec& spec,
                                          double t, Rng& rng, int shots) {
  const Grid& grid = flat.grid();
  auto p0 = walked_output_distribution(spec, t);
  auto flat_pts = flat.points();

  WalkMeasurementStats stats;
  // The evolved component for center h is the translate of the h = 0 one, so
  // exact statistics reduce to sums over p0.
  // On-flat mass: sum over y,h in H of p0[y-h]/|H| = sum over direction
  // differences (each occurring |H| times).
  double on = 0.0;
  for (PointIndex y : flat_pts)
    for (PointIndex h : flat_pts) on += p0[grid.sub(y, h)];
  stats.on_flat_mass = on / static_cast<double>(flat_pts.size());

  std::vector<double> avg(grid.size(), 0.0);
  for (PointIndex h : flat_pts)
    for (PointIndex y = 0; y < grid.size(); ++y) avg[y] += p0[grid.sub(y, h)];
  for (PointIndex y = 0; y < grid.size(); ++y) {
    if (flat.contains(y)) continue;
    stats.max_off_flat = std::max(stats.max_off_flat, avg[y] / flat_pts.size());
  }

  if (shots > 0) {
    stats.hist.assign(grid.size(), 0);
    auto cdf = cdf_of(p0);
    for (int s = 0; s < shots; ++s) {
      PointIndex h = flat_pts[rng.below(flat_pts.size())];
      PointIndex y = grid.add(static_cast<PointIndex>(draw_from_cdf(cdf, rng)), h);
      ++stats.hist[y];
    }
  }
  return stats;
}

std::vector<PointIndex> sample_walked_points(const Flat& flat, const WalkSpec& spec,
                                             double t, Rng& rng, int shots) {
  const Grid& grid = flat.grid();
  auto p0 = walked_output_distribution(spec, t);
  auto cdf = cdf_of(p0);
  auto flat_pts = flat.points();
  std::vector<PointIndex> out;
  out.reserve(shots);
  for (int s = 0; s < shots; ++s) {
    PointIndex h = flat_pts[rng.below(flat_pts.size())];
    out.push_back(grid.add(static_cast<PointIndex>(draw_from_cdf(cdf, rng)), h));
  }
  return out;
}

ReconstructionResult reconstruct_flat(const Grid& grid,
                                      std::span<const PointIndex> samples,
                                      int dim_guess, std::uint64_t subset_cap) {
  ReconstructionResult res;
  if (samples.empty()) return res;
  const std::uint64_t need = 4ull * (dim_guess + 1);

  // Distinct points with multiplicities; spanning subsets come from the
  // distinct set, support counts the full sample.
  std::map<PointIndex, std::uint64_t> mult;
  for (PointIndex x : samples) ++mult[x];
  std::vector<PointIndex> distinct;
  distinct.reserve(mult.size());
  for (const auto& [x, c] : mult) distinct.push_back(x);

  const std::size_t nd = distinct.size();
  const int ss = dim_guess + 1;  // spanning subset size
  if (static_cast<int>(nd) < ss) return res;

  // Candidate flats grouped by canonical form.
  std::map<std::string, Flat> candidates;
  std::vector<std::size_t> idx(ss);
  for (int i = 0; i < ss; ++i) idx[i] = i;
  std::uint64_t tried = 0;
  std::vector<PointIndex> subset(ss);
  while (true) {
    if (++tried > subset_cap)
      throw ResourceCapError("flat reconstruction exceeded the subset cap");
    for (int i = 0; i < ss; ++i) subset[i] = distinct[idx[i]];
    Flat f = Flat::affine_span(grid, subset);
    if (f.dim() == dim_guess) candidates.try_emplace(f.key(), f);
    // Next combination.
    int i = ss - 1;
    while (i >= 0 && idx[i] == nd - static_cast<std::size_t>(ss - i)) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < ss; ++j) idx[j] = idx[j - 1] + 1;
  }

  std::uint64_t best_support = 0;
  for (auto& [key, f] : candidates) {
    std::uint64_t support = 0;
    if (f.size() <= mult.size()) {
      for (PointIndex y : f.points()) {
        auto it = mult.find(y);
        if (it != mult.end()) support += it->second;
      }
    } else {
      for (const auto& [x, c] : mult)
        if (f.contains(x)) support += c;
    }
    if (support < need) continue;
    if (support > best_support) {
      best_support = support;
      res.flat = f;
    }
    // Equal support: candidates iterate in canonical-key order, keep first.
  }
  res.support = best_support;
  return res;
}

HfcReport hfc_end_to_end(const Flat& secret, const WalkSpec& spec,
                         const HfcConfig& cfg, Rng& rng) {
  const Grid& grid = secret.grid();
  const double t = cfg.time > 0.0 ? cfg.time : default_walk_time(*spec.ctx, spec.dim);
  auto samples = sample_walked_points(secret, spec, t, rng, cfg.shots);

  HfcReport rep;
  rep.shots = cfg.shots;
  // Accept a candidate only when it carries a constant fraction of the walk
  // lemma's on-flat mass; a quarter of the nominal 1/ln q sits well below the
  // exact desk-scale mass (~0.55/ln q once higher-order terms bite) and an
  // order of magnitude above the support any wrong flat accumulates, so
  // sub-flats of H cannot win at too-small dims.
  rep.accept_threshold =
      static_cast<double>(cfg.shots) / (4.0 * std::log(static_cast<double>(spec.ctx->q())));

  const int max_dim = cfg.max_dim >= 0 ? cfg.max_dim : grid.dim();
  for (int g = 0; g <= max_dim; ++g) {
    auto rec = reconstruct_flat(grid, samples, g, cfg.subset_cap);
    if (!rec.flat) continue;
    if (static_cast<double>(rec.support) < rep.accept_threshold) continue;
    rep.recovered = rec.flat;
    rep.dim_found = g;
    rep.support = rec.support;
    break;
  }
  if (rep.recovered) {
    rep.success = *rep.recovered == secret;
    rep.wrong_flat = !rep.success;
  }
  return rep;
}

}  // namespace hsl
