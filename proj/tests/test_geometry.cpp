#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hsl/errors.hpp"
#include "hsl/geometry.hpp"
#include "hsl/rng.hpp"

using namespace hsl;

namespace {
PointIndex pt(const Grid& g, std::initializer_list<felem> coords) {
  return g.index_of(std::vector<felem>(coords));
}
}  // namespace

TEST_CASE("norm form") {
  auto f3 = FieldCtx::make(3, 1);
  Grid g3(f3, 3);
  CHECK(g3.norm(0) == 0);
  CHECK(g3.norm(pt(g3, {1, 1, 1})) == 0);  // 3 = 0 mod 3

  auto f5 = FieldCtx::make(5, 1);
  Grid g5(f5, 3);
  CHECK(g5.norm(pt(g5, {1, 2, 0})) == 0);  // 1 + 4 = 5
}

TEST_CASE("sphere sizes: formula vs enumeration") {
  auto f3 = FieldCtx::make(3, 1);
  Grid g33(f3, 3);
  CHECK(sphere_points(g33, 1).size() == 6);
  CHECK(sphere_size_formula(*f3, 1, 3) == 6);
  CHECK(sphere_size_formula(*f3, 0, 3) == 9);

  Grid g32(f3, 2);
  auto origin_sphere = sphere_points(g32, 0);
  CHECK(origin_sphere.size() == 1);
  CHECK(origin_sphere[0] == 0);

  auto f5 = FieldCtx::make(5, 1);
  CHECK(sphere_size_formula(*f5, 0, 2) == 9);  // 2q - 1 when q = 1 mod 4
  CHECK(sphere_size_formula(*f5, 1, 2) == 4);
  Grid g52(f5, 2);
  CHECK(sphere_points(g52, 1).size() == 4);

  for (auto q : {3u, 5u, 7u, 9u}) {
    auto ctx = FieldCtx::parse(std::to_string(q));
    for (int d = 2; d <= 4; ++d) {
      Grid grid(ctx, d);
      std::uint64_t total = 0;
      auto conv = norm_class_sizes(*ctx, d);
      for (felem r = 0; r < ctx->q(); ++r) {
        auto pts = sphere_points(grid, r);
        CHECK(pts.size() == sphere_size_formula(*ctx, r, d));
        CHECK(pts.size() == conv[r]);
        total += pts.size();
      }
      CHECK(total == grid.size());
    }
  }

  // Parallel enumeration equals the plain loop, in order.
  auto f7 = FieldCtx::make(7, 1);
  Grid g73(f7, 3);
  CHECK(sphere_points(g73, 3) == sphere_points_ref(g73, 3));
}

TEST_CASE("fourier transform") {
  auto f5 = FieldCtx::make(5, 1);
  Grid g(f5, 2);

  StateVector delta(f5, 2);
  delta.amps[0] = 1.0;
  auto hat = fourier(delta);
  for (const auto& a : hat.amps) CHECK(std::abs(a - cdouble(0.2, 0.0)) < 1e-12);

  Rng rng(11);
  StateVector v(f5, 2);
  for (auto& a : v.amps) a = {rng.next_double() - 0.5, rng.next_double() - 0.5};
  double n = std::sqrt(v.norm2());
  for (auto& a : v.amps) a /= n;
  auto round = inverse_fourier(fourier(v));
  for (std::size_t i = 0; i < v.amps.size(); ++i)
    CHECK(std::abs(round.amps[i] - v.amps[i]) < 1e-9);
  CHECK(fourier(v).norm2() == doctest::Approx(1.0).epsilon(1e-9));  // Parseval
}

TEST_CASE("fourier of a sphere state matches the closed form") {
  auto f5 = FieldCtx::make(5, 1);
  Grid g(f5, 3);
  auto v = fourier(sphere_state(g, 1, 0));
  double s1 = static_cast<double>(sphere_size_formula(*f5, 1, 3));
  double scale = std::sqrt(static_cast<double>(g.size()) * s1);
  PointIndex k = pt(g, {1, 2, 0});
  CHECK(g.norm(k) == 0);
  // Frozen from the direct-summation oracle: the k=(1,2,0) amplitude equals
  // (brute sphere sum) / sqrt(q^d |S_1|) = 5 / sqrt(125 * 30).
  cdouble brute = sphere_fourier_brute(g, 1, k);
  CHECK(std::abs(brute - cdouble(5.0, 0.0)) < 1e-9);
  CHECK(std::abs(v.amps[k] - brute / scale) < 1e-9);
  CHECK(std::abs(v.amps[k] - sphere_fourier_closed(*f5, 1, 0, 3) / scale) < 1e-9);
}

TEST_CASE("sphere fourier closed form vs direct summation") {
  auto f5 = FieldCtx::make(5, 1);
  Grid g(f5, 3);
  PointIndex k = pt(g, {1, 2, 0});
  CHECK(std::abs(sphere_fourier_closed(*f5, 1, g.norm(k), 3) - cdouble(5.0, 0.0)) < 1e-9);

  // Zero branch: chi(r d(k)/4) = -1.
  bool found = false;
  for (PointIndex kk = 1; kk < g.size() && !found; ++kk) {
    felem w = g.norm(kk);
    felem b = f5->mul(w, f5->inv(f5->from_residue(4)));
    if (f5->quad_char(f5->mul(1, b)) == -1) {
      CHECK(std::abs(sphere_fourier_closed(*f5, 1, w, 3)) < 1e-12);
      CHECK(std::abs(sphere_fourier_brute(g, 1, kk)) < 1e-9);
      found = true;
    }
  }
  CHECK(found);

  // Even d: identity checked against direct summation.
  Grid g2(f5, 2);
  for (PointIndex kk = 1; kk < g2.size(); ++kk)
    for (felem r = 0; r < 5; ++r)
      CHECK(std::abs(sphere_fourier_closed(*f5, r, g2.norm(kk), 2) -
                     sphere_fourier_brute(g2, r, kk)) < 1e-9);

  // Parallel grid kernel equals the naive reference.
  auto f3 = FieldCtx::make(3, 1);
  Grid g3(f3, 3);
  CHECK(std::abs(sphere_fourier_max_error(g3) - sphere_fourier_max_error_ref(g3)) < 1e-12);
}

TEST_CASE("flats") {
  auto f3 = FieldCtx::make(3, 1);
  Grid g(f3, 3);

  auto single = Flat::affine_span(g, std::vector<PointIndex>{pt(g, {1, 2, 0})});
  CHECK(single.dim() == 0);
  CHECK(single.size() == 1);
  CHECK(single.points() == std::vector<PointIndex>{pt(g, {1, 2, 0})});

  std::vector<PointIndex> two{0, pt(g, {1, 0, 0})};
  auto line = Flat::affine_span(g, two);
  CHECK(line.dim() == 1);
  CHECK(line.size() == 3);
  CHECK(line.contains(pt(g, {2, 0, 0})));
  CHECK_FALSE(line.contains(pt(g, {0, 1, 0})));

  // Three collinear points still span dimension 1.
  std::vector<PointIndex> three{pt(g, {0, 1, 0}), pt(g, {1, 1, 0}), pt(g, {2, 1, 0})};
  CHECK(Flat::affine_span(g, three).dim() == 1);

  CHECK_THROWS_AS(Flat::affine_span(g, std::vector<PointIndex>{}), ValidationError);
}

TEST_CASE("affine span is order independent and canonical") {
  auto f5 = FieldCtx::make(5, 1);
  Grid g(f5, 3);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PointIndex> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(rng.below(g.size()));
    auto a = Flat::affine_span(g, pts);
    std::vector<PointIndex> shuffled = {pts[2], pts[0], pts[1]};
    auto b = Flat::affine_span(g, shuffled);
    CHECK(a == b);
    // Idempotent: span of the flat's points is the flat.
    auto c = Flat::affine_span(g, a.points());
    CHECK(a == c);
    // The canonical base point is the smallest point of the flat.
    CHECK(a.base() == a.points().front());
    for (PointIndex x : a.points()) CHECK(a.contains(x));
  }
}

TEST_CASE("point text format round trips") {
  auto f9 = FieldCtx::make(3, 2);
  Grid g(f9, 2);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    PointIndex x = rng.below(g.size());
    CHECK(g.parse_point(g.format(x)) == x);
  }
}

TEST_CASE("grid size caps") {
  auto f5 = FieldCtx::make(5, 1);
  CHECK_THROWS_AS(Grid(f5, 12), ResourceCapError);  // 5^12 > 2^24
}
