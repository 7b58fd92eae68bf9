#include "hsl/hidden_radius.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsl/char_sums.hpp"
#include "hsl/errors.hpp"

namespace hsl {

namespace {
constexpr double kPi = std::numbers::pi;

std::uint64_t pow_u64(std::uint64_t b, int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= b;
  return v;
}
}  // namespace

double RadiusDistribution::total() const {
  double s = atom0;
  for (std::size_t w = 0; w < class_prob.size(); ++w)
    s += class_prob[w] * static_cast<double>(class_size[w]);
  return s;
}

RadiusDistribution radius_distribution(FieldCtxPtr ctx, felem r, int d) {
  if (d % 2 == 0) throw ValidationError("closed-form Pr(k|r) requires odd d");
  const std::uint32_t q = ctx->q();
  const std::uint64_t qd = pow_u64(q, d);
  const double sphere = static_cast<double>(sphere_size_formula(*ctx, r, d));
  if (sphere == 0.0) throw ValidationError("empty sphere");

  RadiusDistribution dist;
  dist.ctx = ctx;
  dist.dim = d;
  dist.r = r;
  dist.atom0 = sphere / static_cast<double>(qd);

  auto sizes = norm_class_sizes(*ctx, d);
  dist.class_size.assign(q, 0);
  for (felem w = 0; w < q; ++w) dist.class_size[w] = sizes[w] - (w == 0 ? 1 : 0);

  dist.class_prob.assign(q, 0.0);
  const double base = 1.0 / (static_cast<double>(q) * sphere);
  for (felem w = 0; w < q; ++w) {
    felem rw = ctx->mul(r, w);
    if (rw == 0) {
      // Exactly one of r, d(k) zero keeps weight 1; both zero is forbidden.
      dist.class_prob[w] = (r != 0 || w != 0) ? base : 0.0;
      continue;
    }
    int chi = ctx->quad_char(rw);
    if (chi == -1) {
      dist.class_prob[w] = 0.0;
      continue;
    }
    felem root = *ctx->sqrt_of(rw);
    double c = std::cos(2.0 * kPi * ctx->trace(root) / ctx->p());
    dist.class_prob[w] = 4.0 * c * c * base;
  }
  return dist;
}

RadiusDistribution radius_distribution_brute(FieldCtxPtr ctx, felem r, int d, Exec exec) {
  const std::uint32_t q = ctx->q();
  Grid grid(ctx, d);
  const double qd = static_cast<double>(grid.size());
  auto pts = sphere_points(grid, r, exec);
  if (pts.empty()) throw ValidationError("empty sphere");
  const double denom = qd * static_cast<double>(pts.size());

  std::vector<double> per_k(grid.size());
  auto tab = additive_char_table(*ctx);
  par_for(static_cast<std::int64_t>(grid.size()), exec, [&](std::int64_t ki) {
    PointIndex k = static_cast<PointIndex>(ki);
    auto kc = grid.coords(k);
    cdouble acc = 0.0;
    for (PointIndex x : pts) {
      auto xc = grid.coords(x);
      felem dot = 0;
      for (int j = 0; j < d; ++j) dot = ctx->add(dot, ctx->mul(kc[j], xc[j]));
      acc += tab[dot];
    }
    per_k[ki] = std::norm(acc) / denom;
  });

  RadiusDistribution dist;
  dist.ctx = ctx;
  dist.dim = d;
  dist.r = r;
  dist.atom0 = per_k[0];
  dist.class_size.assign(q, 0);
  dist.class_prob.assign(q, 0.0);
  std::vector<bool> seen(q, false);
  for (PointIndex k = 1; k < grid.size(); ++k) {
    felem w = grid.norm(k);
    if (!seen[w]) {
      dist.class_prob[w] = per_k[k];
      seen[w] = true;
    } else {
      dist.class_spread = std::max(dist.class_spread, std::abs(per_k[k] - dist.class_prob[w]));
    }
    ++dist.class_size[w];
  }
  return dist;
}

double radius_distribution_max_error(const RadiusDistribution& closed_form,
                                     const RadiusDistribution& brute) {
  double err = std::abs(closed_form.atom0 - brute.atom0);
  for (std::size_t w = 0; w < closed_form.class_prob.size(); ++w)
    err = std::max(err, std::abs(closed_form.class_prob[w] - brute.class_prob[w]));
  return err;
}

RadiusSampler::RadiusSampler(Grid grid, RadiusDistribution dist)
    : grid_(std::move(grid)), dist_(std::move(dist)) {
  const std::uint32_t q = grid_.ctx()->q();
  members_.assign(q, {});
  for (PointIndex k = 1; k < grid_.size(); ++k) members_[grid_.norm(k)].push_back(k);
  cdf_.reserve(q + 1);
  double acc = dist_.atom0;
  cdf_.push_back(acc);
  for (felem w = 0; w < q; ++w) {
    acc += dist_.class_prob[w] * static_cast<double>(dist_.class_size[w]);
    cdf_.push_back(acc);
  }
}

PointIndex RadiusSampler::draw(Rng& rng) const {
  double u = rng.next_double() * cdf_.back();
  std::size_t idx = static_cast<std::size_t>(
      std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  if (idx == 0) return 0;  // the k = 0 atom
  const auto& cls = members_[idx - 1];
  return cls[rng.below(cls.size())];
}

std::vector<PointIndex> sample_k(const RadiusSampler& sampler, Rng& rng, std::size_t n) {
  std::vector<PointIndex> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw(rng));
  return out;
}

ClassifierReport classify_chi_r(const Grid& grid,
                                const std::function<PointIndex(Rng&)>& draw_k,
                                Rng& rng, int reps) {
  ClassifierReport rep;
  bool saw_plus = false, saw_minus = false;
  for (int i = 0; i < reps; ++i) {
    PointIndex k = draw_k(rng);
    felem w = grid.norm(k);
    if (w == 0) {
      ++rep.discarded;
      continue;
    }
    ++rep.kept;
    (grid.ctx()->quad_char(w) == 1 ? saw_plus : saw_minus) = true;
  }
  if (rep.kept == 0)
    rep.verdict = ChiVerdict::inconclusive;
  else if (saw_plus && saw_minus)
    rep.verdict = ChiVerdict::zero_radius;
  else
    rep.verdict = saw_plus ? ChiVerdict::chi_plus : ChiVerdict::chi_minus;
  return rep;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 95%
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double center = (phat + z2 / (2 * n)) / (1 + z2 / n);
  double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {center - half, center + half};
}

namespace {

std::vector<ClassifierSuccess> classifier_rates_impl(FieldCtxPtr ctx, int d, int reps,
                                                     int trials, std::uint64_t seed,
                                                     Exec exec) {
  const std::uint32_t q = ctx->q();
  Grid grid(ctx, d);
  std::vector<ClassifierSuccess> out(q);
  for (felem r = 0; r < q; ++r) {
    RadiusSampler sampler(grid, radius_distribution(ctx, r, d));
    ChiVerdict truth = r == 0 ? ChiVerdict::zero_radius
                      : ctx->quad_char(r) == 1 ? ChiVerdict::chi_plus
                                               : ChiVerdict::chi_minus;
    std::vector<std::uint8_t> ok(trials, 0);
    par_for(trials, exec, [&](std::int64_t t) {
      Rng rng(seed, (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(t));
      auto rep = classify_chi_r(
          grid, [&](Rng& g) { return sampler.draw(g); }, rng, reps);
      ok[t] = rep.verdict == truth ? 1 : 0;
    });
    ClassifierSuccess& cs = out[r];
    cs.r = r;
    cs.trials = trials;
    for (auto v : ok) cs.successes += v;
    cs.rate = trials ? static_cast<double>(cs.successes) / trials : 0.0;
    cs.ci = wilson_interval(cs.successes, cs.trials);
  }
  return out;
}

}  // namespace

std::vector<ClassifierSuccess> classifier_success_rates(FieldCtxPtr ctx, int d, int reps,
                                                        int trials, std::uint64_t seed,
                                                        Exec exec) {
  return classifier_rates_impl(std::move(ctx), d, reps, trials, seed, exec);
}

std::vector<ClassifierSuccess> classifier_success_rates_ref(FieldCtxPtr ctx, int d,
                                                            int reps, int trials,
                                                            std::uint64_t seed) {
  return classifier_rates_impl(std::move(ctx), d, reps, trials, seed, Exec::serial);
}

double total_variation(const RadiusDistribution& a, const RadiusDistribution& b) {
  if (a.dim != b.dim || !a.ctx->same_field(*b.ctx))
    throw ValidationError("total variation between mismatched distributions");
  double s = std::abs(a.atom0 - b.atom0);
  for (std::size_t w = 0; w < a.class_prob.size(); ++w)
    s += static_cast<double>(a.class_size[w]) * std::abs(a.class_prob[w] - b.class_prob[w]);
  return 0.5 * s;
}

namespace {

TvTable tv_table_impl(FieldCtxPtr ctx, int d, Exec exec) {
  const std::uint32_t q = ctx->q();
  std::vector<RadiusDistribution> dists;
  dists.reserve(q);
  for (felem r = 0; r < q; ++r) dists.push_back(radius_distribution(ctx, r, d));

  TvTable table;
  table.q = q;
  table.tv.assign(static_cast<std::size_t>(q) * q, 0.0);
  par_for(static_cast<std::int64_t>(q) * q, exec, [&](std::int64_t i) {
    felem r = static_cast<felem>(i / q), r2 = static_cast<felem>(i % q);
    if (r2 < r) return;  // fill upper triangle, mirror below
    table.tv[i] = total_variation(dists[r], dists[r2]);
  });
  for (felem r = 0; r < q; ++r)
    for (felem r2 = 0; r2 < r; ++r2)
      table.tv[static_cast<std::size_t>(r) * q + r2] = table.tv[static_cast<std::size_t>(r2) * q + r];
  for (felem r = 0; r < q; ++r)
    for (felem r2 = 0; r2 < q; ++r2)
      if (r != r2) table.min_distinct = std::min(table.min_distinct, table.at(r, r2));
  return table;
}

}  // namespace

TvTable min_pairwise_tv(FieldCtxPtr ctx, int d, Exec exec) {
  return tv_table_impl(std::move(ctx), d, exec);
}

TvTable min_pairwise_tv_ref(FieldCtxPtr ctx, int d) {
  // Independent path: pairwise TV computed directly from per-k probabilities.
  const std::uint32_t q = ctx->q();
  std::vector<RadiusDistribution> dists;
  for (felem r = 0; r < q; ++r) dists.push_back(radius_distribution(ctx, r, d));
  TvTable table;
  table.q = q;
  table.tv.assign(static_cast<std::size_t>(q) * q, 0.0);
  for (felem r = 0; r < q; ++r) {
    for (felem r2 = 0; r2 < q; ++r2) {
      double s = std::abs(dists[r].atom0 - dists[r2].atom0);
      for (felem w = 0; w < q; ++w)
        s += static_cast<double>(dists[r].class_size[w]) *
             std::abs(dists[r].class_prob[w] - dists[r2].class_prob[w]);
      table.tv[static_cast<std::size_t>(r) * q + r2] = 0.5 * s;
      if (r != r2)
        table.min_distinct = std::min(table.min_distinct, 0.5 * s);
    }
  }
  return table;
}

double rescaled_cosine_chain_min(const FieldCtx& ctx) {
  const std::uint32_t q = ctx.q();
  const felem minus_one = ctx.neg(ctx.one());
  double best = std::numeric_limits<double>::infinity();
  for (felem r = 1; r < q; ++r) {
    if (r == ctx.one() || r == minus_one) continue;
    double acc = 0.0;
    for (felem s = 0; s < q; ++s) {
      double cs = std::cos(4.0 * kPi * ctx.trace(s) / ctx.p());
      double crs = std::cos(4.0 * kPi * ctx.trace(ctx.mul(r, s)) / ctx.p());
      acc += cs * cs - cs * crs;
    }
    best = std::min(best, acc / q);
  }
  return best;
}

EvenDimEvidence kloosterman_distribution_evidence(FieldCtxPtr ctx, int d_even, Exec exec) {
  if (d_even % 2 != 0) throw ValidationError("even-dimension evidence requires even d");
  const std::uint32_t q = ctx->q();
  std::vector<RadiusDistribution> dists;
  for (felem r = 0; r < q; ++r)
    dists.push_back(radius_distribution_brute(ctx, r, d_even, exec));

  EvenDimEvidence ev;
  ev.table.q = q;
  ev.table.tv.assign(static_cast<std::size_t>(q) * q, 0.0);
  ev.min_distinct_nonzero = 1.0;
  for (felem r = 0; r < q; ++r) {
    ev.totals.push_back(dists[r].total());
    for (felem r2 = 0; r2 < q; ++r2) {
      double tv = total_variation(dists[r], dists[r2]);
      ev.table.tv[static_cast<std::size_t>(r) * q + r2] = tv;
      if (r != r2) {
        ev.table.min_distinct = std::min(ev.table.min_distinct, tv);
        if (r != 0 && r2 != 0)
          ev.min_distinct_nonzero = std::min(ev.min_distinct_nonzero, tv);
      }
    }
  }
  return ev;
}

}  // namespace hsl
