#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "hsl/errors.hpp"
#include "hsl/field.hpp"

using namespace hsl;

namespace {
std::vector<std::uint32_t> co(std::initializer_list<std::uint32_t> v) { return {v}; }
}  // namespace

TEST_CASE("addition") {
  auto f3 = FieldCtx::make(3, 1);
  CHECK(f3->add(2, 2) == 1);

  auto f9 = FieldCtx::make(3, 2);
  felem alpha = f9->from_coeffs(co({0, 1}));
  felem two_alpha_plus_1 = f9->from_coeffs(co({1, 2}));
  CHECK(f9->add(alpha, two_alpha_plus_1) == f9->one());

  for (felem a = 0; a < f9->q(); ++a) CHECK(f9->add(a, f9->zero()) == a);
}

TEST_CASE("multiplication and inverses") {
  auto f5 = FieldCtx::make(5, 1);
  CHECK(f5->inv(2) == 3);

  auto f9 = FieldCtx::make(3, 2);
  felem alpha = f9->from_coeffs(co({0, 1}));
  CHECK(f9->mul(alpha, alpha) == f9->from_coeffs(co({2, 0})));  // alpha^2 = -1

  // inv(3) over F_7 against exhaustive search.
  auto f7 = FieldCtx::make(7, 1);
  felem expected = 0;
  for (felem x = 1; x < 7; ++x)
    if (f7->mul(3, x) == f7->one()) expected = x;
  CHECK(expected == 5);
  CHECK(f7->inv(3) == expected);

  CHECK_THROWS_AS((void)f7->inv(0), ValidationError);
}

TEST_CASE("trace") {
  auto f5 = FieldCtx::make(5, 1);
  CHECK(f5->trace(3) == 3);

  auto f9 = FieldCtx::make(3, 2);
  CHECK(f9->trace(f9->one()) == 2);

  // tr(alpha) = alpha + alpha^3 computed through polynomial arithmetic.
  felem alpha = f9->from_coeffs(co({0, 1}));
  felem alpha3 = f9->mul(alpha, f9->mul(alpha, alpha));
  felem sum = f9->add(alpha, alpha3);
  CHECK(sum == f9->zero());
  CHECK(f9->trace(alpha) == 0);
}

TEST_CASE("quadratic character") {
  auto f5 = FieldCtx::make(5, 1);
  CHECK(f5->quad_char(f5->one()) == 1);
  CHECK(f5->quad_char(0) == 0);

  // Squares mod 5 are {1,4}.
  std::set<felem> squares;
  for (felem x = 1; x < 5; ++x) squares.insert(f5->mul(x, x));
  CHECK(squares == std::set<felem>{1, 4});
  CHECK(f5->quad_char(2) == -1);

  for (auto q : {5u, 9u, 13u, 25u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    int plus = 0;
    for (felem a = 1; a < ctx->q(); ++a) {
      if (ctx->quad_char(a) == 1) ++plus;
      for (felem b = 1; b < ctx->q(); ++b)
        CHECK(ctx->quad_char(ctx->mul(a, b)) == ctx->quad_char(a) * ctx->quad_char(b));
      CHECK(ctx->quad_char(a) == (ctx->pow(a, (ctx->q() - 1) / 2) == ctx->one() ? 1 : -1));
    }
    CHECK(plus == static_cast<int>((ctx->q() - 1) / 2));
  }
}

TEST_CASE("square roots") {
  auto f5 = FieldCtx::make(5, 1);
  auto r = f5->sqrt_of(4);
  REQUIRE(r.has_value());
  CHECK((*r == 2 || *r == 3));
  CHECK(f5->sqrt_of(0) == 0);

  auto f7 = FieldCtx::make(7, 1);
  CHECK_FALSE(f7->sqrt_of(3).has_value());  // squares mod 7: {1,2,4}

  for (auto q : {7u, 9u, 27u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    for (felem a = 0; a < ctx->q(); ++a) {
      auto root = ctx->sqrt_of(a);
      if (ctx->quad_char(a) >= 0) {
        REQUIRE(root.has_value());
        CHECK(ctx->mul(*root, *root) == a);
      } else {
        CHECK_FALSE(root.has_value());
      }
    }
  }
}

TEST_CASE("enumerate") {
  auto f3 = FieldCtx::make(3, 1);
  CHECK(f3->enumerate() == std::vector<felem>{0, 1, 2});
  auto f9 = FieldCtx::make(3, 2);
  auto all = f9->enumerate();
  CHECK(all.size() == 9);
  CHECK(all.front() == f9->zero());
  CHECK(std::set<felem>(all.begin(), all.end()).size() == 9);
  CHECK(FieldCtx::make(5, 2)->enumerate().size() == 25);
}

TEST_CASE("context construction") {
  auto f3 = FieldCtx::make(3, 1);
  CHECK(f3->modulus() == co({0, 1}));  // x

  // Smallest monic irreducible over F_3 by an independent root check
  // (quadratics are reducible iff they have a root).
  auto has_root = [](std::uint32_t a0, std::uint32_t a1) {
    for (std::uint32_t x = 0; x < 3; ++x)
      if ((x * x + a1 * x + a0) % 3 == 0) return true;
    return false;
  };
  std::vector<std::uint32_t> smallest;
  for (std::uint32_t a0 = 0; a0 < 3 && smallest.empty(); ++a0)
    for (std::uint32_t a1 = 0; a1 < 3 && smallest.empty(); ++a1)
      if (!has_root(a0, a1)) smallest = {a0, a1, 1};
  CHECK(FieldCtx::make(3, 2)->modulus() == smallest);
  CHECK(smallest == co({1, 0, 1}));  // x^2 + 1

  CHECK_THROWS_AS(FieldCtx::make(4, 1), ValidationError);
  CHECK_THROWS_AS(FieldCtx::make(2, 3), ValidationError);
  CHECK_THROWS_AS(FieldCtx::make(9, 1), ValidationError);
  CHECK_THROWS_AS(FieldCtx::make(3, 20), ValidationError);  // q > 2^20
}

TEST_CASE("field properties") {
  for (auto q : {7u, 9u, 25u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    for (felem a = 1; a < ctx->q(); ++a) CHECK(ctx->mul(a, ctx->inv(a)) == ctx->one());
    for (felem a = 0; a < ctx->q(); ++a) {
      felem ap = ctx->pow(a, ctx->p());
      CHECK(ctx->trace(ap) == ctx->trace(a));
      for (felem b = 0; b < ctx->q(); ++b)
        CHECK((ctx->trace(ctx->add(a, b)) % ctx->p()) ==
              (ctx->trace(a) + ctx->trace(b)) % ctx->p());
    }
  }
}

TEST_CASE("cross-context operations are rejected") {
  auto f5 = FieldCtx::make(5, 1);
  auto f7 = FieldCtx::make(7, 1);
  FieldElement a(2, f5), b(3, f7);
  CHECK_THROWS_AS((void)(a + b), ValidationError);
  CHECK_THROWS_AS((void)(a * b), ValidationError);
  // Same field built twice is the same context.
  FieldElement c(2, FieldCtx::make(5, 1));
  CHECK(a == c);
}

TEST_CASE("element and context text formats") {
  auto f9 = FieldCtx::make(3, 2);
  felem e = f9->from_coeffs(co({1, 2}));
  CHECK(f9->format(e) == "1,2");
  CHECK(f9->parse_element("1,2") == e);
  CHECK(f9->name() == "3^2");
  CHECK(FieldCtx::parse("3^2")->q() == 9);
  CHECK(FieldCtx::parse("25")->p() == 5);
  CHECK_THROWS_AS(FieldCtx::parse("12"), ValidationError);
  for (felem a = 0; a < f9->q(); ++a) CHECK(f9->parse_element(f9->format(a)) == a);
}
