#include "hsl/char_sums.hpp"

#include <cmath>
#include <numbers>

#include "hsl/errors.hpp"

namespace hsl {

namespace {
constexpr double kPi = std::numbers::pi;
}

cdouble additive_char(const FieldCtx& ctx, felem a) {
  double ang = 2.0 * kPi * ctx.trace(a) / ctx.p();
  return {std::cos(ang), std::sin(ang)};
}

std::vector<cdouble> additive_char_table(const FieldCtx& ctx) {
  // omega_p^t for t in [0, p), then spread through the trace table.
  std::vector<cdouble> roots(ctx.p());
  for (std::uint32_t t = 0; t < ctx.p(); ++t) {
    double ang = 2.0 * kPi * t / ctx.p();
    roots[t] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cdouble> tab(ctx.q());
  for (felem a = 0; a < ctx.q(); ++a) tab[a] = roots[ctx.trace(a)];
  return tab;
}

SumValue gauss_sum(const FieldCtx& ctx, SumMethod method) {
  if (method == SumMethod::brute_force) {
    cdouble acc = 0.0;
    auto tab = additive_char_table(ctx);
    for (felem c = 1; c < ctx.q(); ++c)
      acc += static_cast<double>(ctx.quad_char(c)) * tab[c];
    return {acc, SumMethod::brute_force};
  }
  const double root_q = std::sqrt(static_cast<double>(ctx.q()));
  cdouble base = (ctx.p() % 4 == 1) ? cdouble(-1.0, 0.0) : cdouble(0.0, -1.0);
  cdouble power = 1.0;
  for (std::uint32_t i = 0; i < ctx.m(); ++i) power *= base;
  return {-power * root_q, SumMethod::closed_form};
}

SumValue kloosterman(const FieldCtx& ctx, felem a, felem b, const CharSpec& eta) {
  if (!eta.ctx || !eta.ctx->same_field(ctx))
    throw ValidationError("character context does not match the sum context");
  auto tab = additive_char_table(ctx);
  cdouble acc = 0.0;
  for (felem c = 1; c < ctx.q(); ++c) {
    felem e = ctx.add(ctx.mul(a, c), ctx.mul(b, ctx.inv(c)));
    acc += eta.eval(c) * tab[e];
  }
  return {acc, SumMethod::brute_force};
}

SumValue kloosterman_via_char_identity(const FieldCtx& ctx, felem a, felem b) {
  if (a == 0 && b == 0)
    throw ValidationError("character identity for K_1 requires (a,b) != (0,0)");
  auto tab = additive_char_table(ctx);
  felem four_ab = ctx.mul(ctx.from_residue(4), ctx.mul(a, b));
  cdouble acc = 0.0;
  for (felem c = 0; c < ctx.q(); ++c) {
    felem disc = ctx.sub(ctx.mul(c, c), four_ab);
    acc += static_cast<double>(ctx.quad_char(disc)) * tab[c];
  }
  return {acc, SumMethod::brute_force};
}

SumValue salie(const FieldCtx& ctx, felem a, felem b) {
  const cdouble g1 = gauss_sum(ctx).value;
  felem ab = ctx.mul(a, b);
  if (ab == 0) {
    if (a == 0 && b == 0) return {0.0, SumMethod::closed_form};
    // K_chi(a,0) = chi(a) G_1 (substitute v = ac), and symmetrically in b.
    int chi = ctx.quad_char(a != 0 ? a : b);
    return {static_cast<double>(chi) * g1, SumMethod::closed_form};
  }
  if (ctx.quad_char(ab) == -1) return {0.0, SumMethod::closed_form};
  felem root = *ctx.sqrt_of(ab);
  // Root-sign ambiguity is harmless: tr(-x) = -tr(x) and cos is even.
  double angle = 4.0 * kPi * ctx.trace(root) / ctx.p();
  double chi_b = static_cast<double>(ctx.quad_char(b));
  return {2.0 * chi_b * g1 * std::cos(angle), SumMethod::closed_form};
}

namespace {

SatoTateHistogram sato_tate_impl(const FieldCtx& ctx, int bins, Exec exec) {
  if (bins < 1) throw ValidationError("need at least one histogram bin");
  const std::uint32_t q = ctx.q();
  auto tab = additive_char_table(ctx);
  const double two_root_q = 2.0 * std::sqrt(static_cast<double>(q));

  std::vector<double> cosines(q - 1);
  par_for(q - 1, exec, [&](std::int64_t i) {
    felem a = static_cast<felem>(i + 1);
    cdouble acc = 0.0;
    for (felem c = 1; c < q; ++c) {
      felem e = ctx.add(c, ctx.mul(a, ctx.inv(c)));
      acc += tab[e];
    }
    cosines[i] = acc.real() / two_root_q;
  });

  SatoTateHistogram h;
  h.bins.assign(bins, 0);
  h.samples = q - 1;
  for (double cv : cosines) {
    h.max_abs_cos = std::max(h.max_abs_cos, std::abs(cv));
    double theta = std::acos(std::clamp(cv, -1.0, 1.0));
    int bin = std::min(bins - 1, static_cast<int>(theta / kPi * bins));
    ++h.bins[bin];
  }
  // Semicircle mass per bin: integral of (2/pi) sin^2 = (theta - sin cos)/pi.
  auto cdf = [](double theta) { return (theta - std::sin(theta) * std::cos(theta)) / kPi; };
  for (int b = 0; b < bins; ++b) {
    double lo = kPi * b / bins, hi = kPi * (b + 1) / bins;
    double expect = cdf(hi) - cdf(lo);
    h.l1_to_semicircle += std::abs(static_cast<double>(h.bins[b]) / h.samples - expect);
  }
  return h;
}

}  // namespace

SatoTateHistogram sato_tate_histogram(const FieldCtx& ctx, int bins, Exec exec) {
  return sato_tate_impl(ctx, bins, exec);
}

SatoTateHistogram sato_tate_histogram_ref(const FieldCtx& ctx, int bins) {
  if (bins < 1) throw ValidationError("need at least one histogram bin");
  SatoTateHistogram h;
  h.bins.assign(bins, 0);
  h.samples = ctx.q() - 1;
  const double two_root_q = 2.0 * std::sqrt(static_cast<double>(ctx.q()));
  for (felem a = 1; a < ctx.q(); ++a) {
    cdouble k = 0.0;
    for (felem c = 1; c < ctx.q(); ++c)
      k += additive_char(ctx, ctx.add(c, ctx.mul(a, ctx.inv(c))));
    double cv = k.real() / two_root_q;
    h.max_abs_cos = std::max(h.max_abs_cos, std::abs(cv));
    double theta = std::acos(std::clamp(cv, -1.0, 1.0));
    ++h.bins[std::min(bins - 1, static_cast<int>(theta / kPi * bins))];
  }
  auto cdf = [](double theta) { return (theta - std::sin(theta) * std::cos(theta)) / kPi; };
  for (int b = 0; b < bins; ++b) {
    double expect = cdf(kPi * (b + 1) / bins) - cdf(kPi * b / bins);
    h.l1_to_semicircle += std::abs(static_cast<double>(h.bins[b]) / h.samples - expect);
  }
  return h;
}

}  // namespace hsl
