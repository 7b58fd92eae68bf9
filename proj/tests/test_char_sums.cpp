#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hsl/char_sums.hpp"
#include "hsl/errors.hpp"

using namespace hsl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("additive character") {
  auto f5 = FieldCtx::make(5, 1);
  CHECK(std::abs(additive_char(*f5, 0) - cdouble(1.0, 0.0)) < 1e-15);
  cdouble w = additive_char(*f5, 1);
  CHECK(std::abs(w - std::exp(cdouble(0, 2 * kPi / 5))) < 1e-15);

  for (auto q : {5u, 9u, 13u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    cdouble total = 0;
    for (felem a = 0; a < ctx->q(); ++a) {
      cdouble v = additive_char(*ctx, a);
      CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
      total += v;
    }
    CHECK(std::abs(total) < 1e-9);
  }
}

TEST_CASE("gauss sums") {
  auto f5 = FieldCtx::make(5, 1);
  CHECK(std::abs(gauss_sum(*f5).value - cdouble(std::sqrt(5.0), 0)) < 1e-12);

  auto f3 = FieldCtx::make(3, 1);
  CHECK(std::abs(gauss_sum(*f3).value - cdouble(0, std::sqrt(3.0))) < 1e-12);

  auto f9 = FieldCtx::make(3, 2);
  CHECK(std::abs(gauss_sum(*f9).value - gauss_sum(*f9, SumMethod::brute_force).value) < 1e-9);

  for (auto q : {5u, 7u, 9u, 13u, 25u, 27u, 49u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    cdouble closed = gauss_sum(*ctx).value;
    CHECK(std::abs(std::norm(closed) - static_cast<double>(q)) < 1e-9);
    CHECK(std::abs(closed - gauss_sum(*ctx, SumMethod::brute_force).value) <
          1e-9 * std::sqrt(static_cast<double>(q)));
  }
}

TEST_CASE("kloosterman sums") {
  auto f5 = FieldCtx::make(5, 1);
  CharSpec triv{CharKind::trivial, f5};

  // Direct 4-term sum: c + 1/c for c = 1..4 gives exponents 2,0,0,3.
  cdouble w = std::exp(cdouble(0, 2 * kPi / 5));
  cdouble expected = w * w + 2.0 + w * w * w;
  auto k11 = kloosterman(*f5, 1, 1, triv);
  CHECK(std::abs(k11.value - expected) < 1e-12);
  CHECK(k11.value.real() == doctest::Approx(0.381966).epsilon(1e-5));
  CHECK(std::abs(kloosterman_via_char_identity(*f5, 1, 1).value - expected) < 1e-12);

  CHECK(std::abs(kloosterman(*f5, 0, 0, triv).value - cdouble(4.0, 0)) < 1e-12);
  CHECK(std::abs(kloosterman(*f5, 1, 0, triv).value - cdouble(-1.0, 0)) < 1e-12);
  CHECK_THROWS_AS(kloosterman_via_char_identity(*f5, 0, 0), ValidationError);

  // Both summation routes agree away from (0,0); K is symmetric and real.
  for (auto q : {5u, 9u, 13u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    CharSpec t{CharKind::trivial, ctx};
    for (felem a = 0; a < ctx->q(); ++a)
      for (felem b = 0; b < ctx->q(); ++b) {
        auto direct = kloosterman(*ctx, a, b, t).value;
        CHECK(std::abs(direct.imag()) < 1e-9);
        CHECK(std::abs(direct - kloosterman(*ctx, b, a, t).value) < 1e-9);
        if (a != 0 || b != 0)
          CHECK(std::abs(direct - kloosterman_via_char_identity(*ctx, a, b).value) < 1e-9);
      }
  }
}

TEST_CASE("salie closed form") {
  auto f5 = FieldCtx::make(5, 1);
  // Brute force over F_5: chi weights 1,-1,-1,1 with exponents 2,0,0,3.
  cdouble w = std::exp(cdouble(0, 2 * kPi / 5));
  cdouble brute = w * w - 2.0 + w * w * w;
  CHECK(std::abs(salie(*f5, 1, 1).value - brute) < 1e-12);
  CHECK(salie(*f5, 1, 1).value.real() == doctest::Approx(-3.618034).epsilon(1e-6));

  CHECK(std::abs(salie(*f5, 1, 2).value) < 1e-12);  // chi(2) = -1
  CHECK(std::abs(salie(*f5, 1, 0).value - cdouble(std::sqrt(5.0), 0)) < 1e-12);
  CHECK(std::abs(salie(*f5, 0, 0).value) < 1e-12);

  // Exhaustive equality against the quadratic-twisted brute force.
  for (auto q : {3u, 7u, 9u, 11u, 27u, 49u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    CharSpec quad{CharKind::quadratic, ctx};
    double tol = 1e-9 * std::sqrt(static_cast<double>(q));
    for (felem a = 0; a < ctx->q(); ++a)
      for (felem b = 0; b < ctx->q(); ++b)
        CHECK(std::abs(salie(*ctx, a, b).value - kloosterman(*ctx, a, b, quad).value) < tol);
  }
}

TEST_CASE("sato-tate histogram") {
  auto small = FieldCtx::make(101, 1);
  auto h = sato_tate_histogram(*small, 10);
  std::int64_t total = 0;
  for (auto b : h.bins) total += b;
  CHECK(total == 100);
  CHECK(h.max_abs_cos <= 1.0 + 1e-12);  // Weil bound

  auto big = FieldCtx::make(1009, 1);
  auto hb = sato_tate_histogram(*big, 20);
  CHECK(hb.samples == 1008);
  CHECK(hb.l1_to_semicircle < 0.15);
  CHECK(hb.max_abs_cos <= 1.0 + 1e-12);

  // Parallel kernel against the plain-loop reference.
  auto ref = sato_tate_histogram_ref(*big, 20);
  CHECK(ref.bins == hb.bins);
  CHECK(ref.l1_to_semicircle == doctest::Approx(hb.l1_to_semicircle).epsilon(1e-12));
}
