#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hsl/field.hpp"
#include "hsl/parallel.hpp"

namespace hsl {

using cdouble = std::complex<double>;

enum class SumMethod { closed_form, brute_force };

// Value of an exponential sum together with how it was obtained.
struct SumValue {
  cdouble value;
  SumMethod method;
};

enum class CharKind { trivial, quadratic };

// Multiplicative character eta of F_q^x, extended by eta(0) = 0. Only the
// two characters the sphere transforms need: chi^d collapses to the trivial
// character for even d and to chi for odd d.
struct CharSpec {
  CharKind kind;
  FieldCtxPtr ctx;

  static CharSpec power_of_quadratic(FieldCtxPtr ctx, int d) {
    return {d % 2 == 0 ? CharKind::trivial : CharKind::quadratic, std::move(ctx)};
  }

  double eval(felem c) const {
    if (c == 0) return 0.0;
    return kind == CharKind::trivial ? 1.0 : static_cast<double>(ctx->quad_char(c));
  }
};

// omega_p^{tr a} for a single element.
cdouble additive_char(const FieldCtx& ctx, felem a);
// Full table, indexed by element; the workhorse for Fourier kernels.
std::vector<cdouble> additive_char_table(const FieldCtx& ctx);

// G_1 = sum_{c != 0} chi(c) omega_p^{tr c}. Closed form:
// -(-1)^m sqrt(q) for p = 1 mod 4, -(-i)^m sqrt(q) for p = 3 mod 4.
SumValue gauss_sum(const FieldCtx& ctx, SumMethod method = SumMethod::closed_form);

// Twisted Kloosterman sum K_eta(a,b) = sum_{c in F_q^x} eta(c) w^{tr(ac + b/c)},
// by direct summation.
SumValue kloosterman(const FieldCtx& ctx, felem a, felem b, const CharSpec& eta);

// Second route for the untwisted sum: sum_c chi(c^2 - 4ab) w^{tr c}.
// Requires (a,b) != (0,0).
SumValue kloosterman_via_char_identity(const FieldCtx& ctx, felem a, felem b);

// Salie sum K_chi(a,b) in closed form:
//   G_1                                   ab = 0, not both zero
//   2 chi(b) G_1 cos(4 pi tr sqrt(ab)/p)  chi(ab) = +1
//   0                                     chi(ab) = -1 or a = b = 0
SumValue salie(const FieldCtx& ctx, felem a, felem b);

struct SatoTateHistogram {
  std::vector<std::int64_t> bins;  // counts of angles over [0, pi]
  double l1_to_semicircle = 0.0;   // sum_bins |freq - integral of (2/pi) sin^2|
  std::size_t samples = 0;         // q - 1
  double max_abs_cos = 0.0;        // diagnostic for the Weil bound
};

// Angles theta_a with K_1(1,a) = 2 sqrt(q) cos(theta_a), a in F_q^x.
SatoTateHistogram sato_tate_histogram(const FieldCtx& ctx, int bins,
                                      Exec exec = Exec::parallel);
// Plain-loop reference, kept for testing the parallel kernel.
SatoTateHistogram sato_tate_histogram_ref(const FieldCtx& ctx, int bins);

}  // namespace hsl
