#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsl/char_sums.hpp"
#include "hsl/field.hpp"
#include "hsl/parallel.hpp"

namespace hsl {

// Linear index of a point of F_q^d: mixed radix, coordinate 0 most
// significant, digits in field enumeration order. Ascending index equals
// lexicographic order on coordinate lists.
using PointIndex = std::uint64_t;

constexpr std::uint64_t kMaxGridSize = 1ull << 24;
constexpr std::uint64_t kMaxLevelSetGrid = 1ull << 22;

// F_q^d with its canonical point indexing and componentwise arithmetic.
class Grid {
 public:
  Grid(FieldCtxPtr ctx, int dim);

  const FieldCtxPtr& ctx() const { return ctx_; }
  int dim() const { return dim_; }
  std::uint64_t size() const { return size_; }

  std::vector<felem> coords(PointIndex x) const;
  PointIndex index_of(std::span<const felem> coords) const;

  PointIndex add(PointIndex x, PointIndex y) const;
  PointIndex sub(PointIndex x, PointIndex y) const;
  PointIndex neg(PointIndex x) const;
  PointIndex scale(felem c, PointIndex x) const;

  // Norm form d(x) = sum_j x_j^2.
  felem norm(PointIndex x) const;

  // "c0,c1|c0,c1|..." textual form: coordinates joined by '|'.
  std::string format(PointIndex x) const;
  PointIndex parse_point(std::string_view text) const;

 private:
  FieldCtxPtr ctx_;
  int dim_;
  std::uint64_t size_;
};

// Closed-form sphere size |S_r| in F_q^d (four cases by parity of d and
// whether r = 0).
std::uint64_t sphere_size_formula(const FieldCtx& ctx, felem r, int d);

// Exact enumeration of S_r (centered at the origin), canonical point order.
std::vector<PointIndex> sphere_points(const Grid& grid, felem r, Exec exec = Exec::parallel);
std::vector<PointIndex> sphere_points_ref(const Grid& grid, felem r);

// |{x in F_q^d : d(x) = w}| for every w, via d-fold additive convolution of
// the single-coordinate square counts; O(d q^2) instead of O(q^d).
std::vector<std::uint64_t> norm_class_sizes(const FieldCtx& ctx, int d);

// Complex amplitudes over F_q^d in canonical point order.
struct StateVector {
  FieldCtxPtr ctx;
  int dim = 0;
  std::vector<cdouble> amps;

  StateVector() = default;
  StateVector(FieldCtxPtr c, int d);
  double norm2() const;
};

// Normalized uniform superposition over S_r + center.
StateVector sphere_state(const Grid& grid, felem r, PointIndex center);

// d-dimensional Fourier transform with kernel w_p^{tr(k.x)}/sqrt(q^d),
// applied one axis at a time.
StateVector fourier(const StateVector& v);
StateVector inverse_fourier(const StateVector& v);

// Closed form of sum_{x in S_r} w^{tr(k.x)} for k != 0, which depends on k
// only through d(k): (G_1^d / q) K_{chi^d}(r, d(k)/4). Odd d uses the Salie
// closed form; even d evaluates the untwisted sum directly.
cdouble sphere_fourier_closed(const FieldCtx& ctx, felem r, felem norm_k, int d);
// Direct summation over the sphere, the oracle the closed form is checked
// against.
cdouble sphere_fourier_brute(const Grid& grid, felem r, PointIndex k);

// max |closed - brute| over all r and all k != 0; the workhorse of the
// sphere-Fourier acceptance check.
double sphere_fourier_max_error(const Grid& grid, Exec exec = Exec::parallel);
double sphere_fourier_max_error_ref(const Grid& grid);

// Affine subspace of F_q^d in canonical form: `base` is the unique point of
// the flat with zeros in all pivot coordinates of the row-reduced direction
// basis (equivalently, the lexicographically smallest point), and `basis`
// rows are in reduced row echelon form. Equality of flats is equality of the
// canonical fields.
class Flat {
 public:
  static Flat from_base_and_basis(const Grid& grid, PointIndex base,
                                  std::span<const PointIndex> basis);
  static Flat affine_span(const Grid& grid, std::span<const PointIndex> points);
  static Flat single_point(const Grid& grid, PointIndex point);

  const Grid& grid() const { return grid_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  std::uint64_t size() const;
  PointIndex base() const { return base_; }
  const std::vector<PointIndex>& basis() const { return basis_; }

  bool contains(PointIndex x) const;
  std::vector<PointIndex> points() const;  // canonical order of enumeration

  bool operator==(const Flat& o) const {
    return base_ == o.base_ && basis_ == o.basis_;
  }
  bool operator!=(const Flat& o) const { return !(*this == o); }

  // Stable key for hashing/grouping candidates.
  std::string key() const;

 private:
  Flat(Grid grid) : grid_(std::move(grid)) {}
  void canonicalize(std::vector<std::vector<felem>> directions, PointIndex through);

  Grid grid_;
  PointIndex base_ = 0;
  std::vector<PointIndex> basis_;  // RREF rows, encoded as points
};

}  // namespace hsl
