#include "hsl/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "hsl/errors.hpp"

namespace hsl {

Grid::Grid(FieldCtxPtr ctx, int dim) : ctx_(std::move(ctx)), dim_(dim) {
  if (dim_ < 1) throw ValidationError("dimension must be >= 1");
  size_ = 1;
  for (int j = 0; j < dim_; ++j) {
    size_ *= ctx_->q();
    if (size_ > kMaxGridSize) throw ResourceCapError("q^d exceeds the 2^24 grid cap");
  }
}

std::vector<felem> Grid::coords(PointIndex x) const {
  std::vector<felem> c(dim_);
  for (int j = dim_; j-- > 0;) {
    c[j] = static_cast<felem>(x % ctx_->q());
    x /= ctx_->q();
  }
  return c;
}

PointIndex Grid::index_of(std::span<const felem> coords) const {
  if (static_cast<int>(coords.size()) != dim_)
    throw ValidationError("coordinate list has wrong length");
  PointIndex x = 0;
  for (felem c : coords) {
    if (c >= ctx_->q()) throw ValidationError("coordinate out of range");
    x = x * ctx_->q() + c;
  }
  return x;
}

PointIndex Grid::add(PointIndex x, PointIndex y) const {
  PointIndex out = 0;
  std::uint64_t scale = 1;
  for (int j = 0; j < dim_; ++j) {
    felem a = static_cast<felem>(x % ctx_->q());
    felem b = static_cast<felem>(y % ctx_->q());
    out += static_cast<std::uint64_t>(ctx_->add(a, b)) * scale;
    x /= ctx_->q();
    y /= ctx_->q();
    scale *= ctx_->q();
  }
  return out;
}

PointIndex Grid::sub(PointIndex x, PointIndex y) const { return add(x, neg(y)); }

PointIndex Grid::neg(PointIndex x) const {
  PointIndex out = 0;
  std::uint64_t scale = 1;
  for (int j = 0; j < dim_; ++j) {
    felem a = static_cast<felem>(x % ctx_->q());
    out += static_cast<std::uint64_t>(ctx_->neg(a)) * scale;
    x /= ctx_->q();
    scale *= ctx_->q();
  }
  return out;
}

PointIndex Grid::scale(felem c, PointIndex x) const {
  PointIndex out = 0;
  std::uint64_t sc = 1;
  for (int j = 0; j < dim_; ++j) {
    felem a = static_cast<felem>(x % ctx_->q());
    out += static_cast<std::uint64_t>(ctx_->mul(c, a)) * sc;
    x /= ctx_->q();
    sc *= ctx_->q();
  }
  return out;
}

felem Grid::norm(PointIndex x) const {
  felem acc = 0;
  for (int j = 0; j < dim_; ++j) {
    felem a = static_cast<felem>(x % ctx_->q());
    acc = ctx_->add(acc, ctx_->mul(a, a));
    x /= ctx_->q();
  }
  return acc;
}

std::string Grid::format(PointIndex x) const {
  auto c = coords(x);
  std::string out;
  for (int j = 0; j < dim_; ++j) {
    if (j) out += '|';
    out += ctx_->format(c[j]);
  }
  return out;
}

PointIndex Grid::parse_point(std::string_view text) const {
  std::vector<felem> coords;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto bar = text.find('|', pos);
    auto tok = text.substr(pos, bar == std::string_view::npos ? text.size() - pos : bar - pos);
    coords.push_back(ctx_->parse_element(tok));
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }
  return index_of(coords);
}

std::uint64_t sphere_size_formula(const FieldCtx& ctx, felem r, int d) {
  const std::uint64_t q = ctx.q();
  auto qpow = [&](int e) {
    std::uint64_t v = 1;
    for (int i = 0; i < e; ++i) v *= q;
    return v;
  };
  const felem minus_one = ctx.neg(ctx.one());
  if (d % 2 == 1) {
    if (r == 0) return qpow(d - 1);
    // chi((-1)^{(d-1)/2} r) sqrt(q^{d-1})
    felem sign = ((d - 1) / 2) % 2 == 0 ? ctx.one() : minus_one;
    int chi = ctx.quad_char(ctx.mul(sign, r));
    std::int64_t corr = static_cast<std::int64_t>(qpow((d - 1) / 2)) * chi;
    return qpow(d - 1) + corr;
  }
  felem sign = (d / 2) % 2 == 0 ? ctx.one() : minus_one;
  int chi = ctx.quad_char(sign);
  if (r == 0) {
    std::int64_t corr = static_cast<std::int64_t>(q - 1) *
                        static_cast<std::int64_t>(qpow((d - 2) / 2)) * chi;
    return qpow(d - 1) + corr;
  }
  std::int64_t corr = -static_cast<std::int64_t>(qpow((d - 2) / 2)) * chi;
  return qpow(d - 1) + corr;
}

std::vector<PointIndex> sphere_points(const Grid& grid, felem r, Exec exec) {
  const std::uint64_t n = grid.size();
  // Chunked collection keeps canonical order at any thread count.
  const std::int64_t chunks = 64;
  std::vector<std::vector<PointIndex>> found(chunks);
  par_for(chunks, exec, [&](std::int64_t c) {
    std::uint64_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
    for (std::uint64_t x = lo; x < hi; ++x)
      if (grid.norm(x) == r) found[c].push_back(x);
  });
  std::vector<PointIndex> out;
  for (auto& part : found) out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::vector<PointIndex> sphere_points_ref(const Grid& grid, felem r) {
  std::vector<PointIndex> out;
  for (std::uint64_t x = 0; x < grid.size(); ++x)
    if (grid.norm(x) == r) out.push_back(x);
  return out;
}

std::vector<std::uint64_t> norm_class_sizes(const FieldCtx& ctx, int d) {
  const std::uint32_t q = ctx.q();
  // Counts of x^2 = w for one coordinate: 1 + chi(w).
  std::vector<std::uint64_t> one(q);
  for (felem w = 0; w < q; ++w)
    one[w] = static_cast<std::uint64_t>(1 + ctx.quad_char(w));
  std::vector<std::uint64_t> acc = one;
  for (int j = 1; j < d; ++j) {
    std::vector<std::uint64_t> next(q, 0);
    for (felem u = 0; u < q; ++u) {
      if (acc[u] == 0) continue;
      for (felem v = 0; v < q; ++v) next[ctx.add(u, v)] += acc[u] * one[v];
    }
    acc = std::move(next);
  }
  return acc;
}

StateVector::StateVector(FieldCtxPtr c, int d) : ctx(std::move(c)), dim(d) {
  Grid grid(ctx, d);
  amps.assign(grid.size(), cdouble(0.0, 0.0));
}

double StateVector::norm2() const {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return s;
}

StateVector sphere_state(const Grid& grid, felem r, PointIndex center) {
  StateVector v(grid.ctx(), grid.dim());
  auto pts = sphere_points(grid, r);
  if (pts.empty()) throw ValidationError("empty sphere has no uniform superposition");
  double amp = 1.0 / std::sqrt(static_cast<double>(pts.size()));
  for (PointIndex x : pts) v.amps[grid.add(x, center)] = amp;
  return v;
}

namespace {

// One axis-wise pass: out[k] = sum_x kernel[mul(k,x)] in[x] / sqrt(q), applied
// along every axis in turn.
StateVector axiswise_transform(const StateVector& v, bool inverse) {
  const FieldCtx& ctx = *v.ctx;
  const std::uint32_t q = ctx.q();
  auto kernel = additive_char_table(ctx);
  if (inverse)
    for (auto& z : kernel) z = std::conj(z);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));

  std::vector<cdouble> cur = v.amps;
  std::vector<cdouble> next(cur.size());
  std::uint64_t stride = 1;
  for (int axis = v.dim; axis-- > 0;) {
    // Lines along `axis` have indices base + t*stride, t in [0, q).
    const std::uint64_t nlines = cur.size() / q;
    const std::uint64_t block = stride * q;
    par_for(static_cast<std::int64_t>(nlines), Exec::parallel, [&](std::int64_t li) {
      std::uint64_t line = static_cast<std::uint64_t>(li);
      std::uint64_t base = (line / stride) * block + (line % stride);
      for (std::uint32_t k = 0; k < q; ++k) {
        cdouble acc = 0.0;
        for (std::uint32_t x = 0; x < q; ++x)
          acc += kernel[ctx.mul(k, x)] * cur[base + x * stride];
        next[base + k * stride] = acc * scale;
      }
    });
    cur.swap(next);
    stride *= q;
  }
  StateVector out(v.ctx, v.dim);
  out.amps = std::move(cur);
  return out;
}

}  // namespace

StateVector fourier(const StateVector& v) { return axiswise_transform(v, false); }
StateVector inverse_fourier(const StateVector& v) { return axiswise_transform(v, true); }

cdouble sphere_fourier_closed(const FieldCtx& ctx, felem r, felem norm_k, int d) {
  // Completing the square per coordinate gives conj(G_1)^d, i.e. an extra
  // chi(-1)^d relative to the plain G_1^d; validated exhaustively against
  // the direct sphere sums.
  const cdouble g1 = std::conj(gauss_sum(ctx).value);
  cdouble g1d = 1.0;
  for (int i = 0; i < d; ++i) g1d *= g1;
  felem b = ctx.mul(norm_k, ctx.inv(ctx.from_residue(4)));
  cdouble k;
  if (d % 2 == 1) {
    k = salie(ctx, r, b).value;
  } else {
    // chi^d is trivial: the untwisted sum has no closed form, evaluate it.
    auto tab = additive_char_table(ctx);
    cdouble acc = 0.0;
    for (felem c = 1; c < ctx.q(); ++c)
      acc += tab[ctx.add(ctx.mul(r, c), ctx.mul(b, ctx.inv(c)))];
    k = acc;
  }
  return g1d * k / static_cast<double>(ctx.q());
}

cdouble sphere_fourier_brute(const Grid& grid, felem r, PointIndex k) {
  auto tab = additive_char_table(*grid.ctx());
  const std::uint32_t q = grid.ctx()->q();
  auto kc = grid.coords(k);
  cdouble acc = 0.0;
  for (std::uint64_t x = 0; x < grid.size(); ++x) {
    if (grid.norm(x) != r) continue;
    PointIndex xx = x;
    felem dot = 0;
    for (int j = grid.dim(); j-- > 0;) {
      felem c = static_cast<felem>(xx % q);
      dot = grid.ctx()->add(dot, grid.ctx()->mul(kc[j], c));
      xx /= q;
    }
    acc += tab[dot];
  }
  return acc;
}

namespace {

double sphere_fourier_error_impl(const Grid& grid, Exec exec) {
  const FieldCtx& ctx = *grid.ctx();
  const std::uint32_t q = ctx.q();
  auto tab = additive_char_table(ctx);

  // Closed-form values per (r, d(k) class).
  std::vector<std::vector<cdouble>> closed(q, std::vector<cdouble>(q));
  for (felem r = 0; r < q; ++r)
    for (felem w = 0; w < q; ++w) closed[r][w] = sphere_fourier_closed(ctx, r, w, grid.dim());

  // Norm of every point, shared by all k-passes.
  std::vector<felem> norms(grid.size());
  par_for(static_cast<std::int64_t>(grid.size()), exec,
          [&](std::int64_t x) { norms[x] = grid.norm(static_cast<PointIndex>(x)); });

  std::vector<double> errs(grid.size(), 0.0);
  par_for(static_cast<std::int64_t>(grid.size()), exec, [&](std::int64_t ki) {
    PointIndex k = static_cast<PointIndex>(ki);
    if (k == 0) return;
    auto kc = grid.coords(k);
    // One pass over all x accumulates the brute sums for every radius.
    std::vector<cdouble> per_r(q, cdouble(0.0, 0.0));
    for (std::uint64_t x = 0; x < grid.size(); ++x) {
      PointIndex xx = x;
      felem dot = 0;
      for (int j = grid.dim(); j-- > 0;) {
        felem c = static_cast<felem>(xx % q);
        dot = ctx.add(dot, ctx.mul(kc[j], c));
        xx /= q;
      }
      per_r[norms[x]] += tab[dot];
    }
    double worst = 0.0;
    felem w = norms[k];
    for (felem r = 0; r < q; ++r) worst = std::max(worst, std::abs(per_r[r] - closed[r][w]));
    errs[ki] = worst;
  });
  double max_err = 0.0;
  for (double e : errs) max_err = std::max(max_err, e);
  return max_err;
}

}  // namespace

double sphere_fourier_max_error(const Grid& grid, Exec exec) {
  return sphere_fourier_error_impl(grid, exec);
}

double sphere_fourier_max_error_ref(const Grid& grid) {
  // Naive double loop, one brute sum per (r, k).
  const FieldCtx& ctx = *grid.ctx();
  double worst = 0.0;
  for (PointIndex k = 1; k < grid.size(); ++k) {
    felem w = grid.norm(k);
    for (felem r = 0; r < ctx.q(); ++r) {
      cdouble c = sphere_fourier_closed(ctx, r, w, grid.dim());
      cdouble b = sphere_fourier_brute(grid, r, k);
      worst = std::max(worst, std::abs(c - b));
    }
  }
  return worst;
}

Flat Flat::single_point(const Grid& grid, PointIndex point) {
  Flat f(grid);
  f.base_ = point;
  return f;
}

Flat Flat::from_base_and_basis(const Grid& grid, PointIndex base,
                               std::span<const PointIndex> basis) {
  Flat f(grid);
  std::vector<std::vector<felem>> dirs;
  for (PointIndex b : basis) dirs.push_back(grid.coords(b));
  f.canonicalize(std::move(dirs), base);
  return f;
}

Flat Flat::affine_span(const Grid& grid, std::span<const PointIndex> points) {
  if (points.empty()) throw ValidationError("affine span of an empty point set");
  Flat f(grid);
  std::vector<std::vector<felem>> dirs;
  for (std::size_t i = 1; i < points.size(); ++i)
    dirs.push_back(grid.coords(grid.sub(points[i], points[0])));
  f.canonicalize(std::move(dirs), points[0]);
  return f;
}

// Reduce direction vectors to RREF (pivot columns chosen left to right), then
// reduce the base point against them so its pivot coordinates vanish. That
// representative is the lexicographically smallest point of the flat.
void Flat::canonicalize(std::vector<std::vector<felem>> rows, PointIndex through) {
  const FieldCtx& ctx = *grid_.ctx();
  const int d = grid_.dim();
  std::vector<std::vector<felem>> rref;
  std::vector<int> pivots;
  for (int col = 0; col < d && !rows.empty(); ++col) {
    // Find a row with a nonzero entry in this column.
    std::size_t sel = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][col] != 0) {
        sel = i;
        break;
      }
    }
    if (sel == rows.size()) continue;
    std::vector<felem> piv = rows[sel];
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(sel));
    felem s = ctx.inv(piv[col]);
    for (auto& x : piv) x = ctx.mul(s, x);
    for (auto& row : rows) {
      felem f = row[col];
      if (f == 0) continue;
      for (int j = 0; j < d; ++j) row[j] = ctx.sub(row[j], ctx.mul(f, piv[j]));
    }
    for (std::size_t i = 0; i < rref.size(); ++i) {
      felem f = rref[i][col];
      if (f == 0) continue;
      for (int j = 0; j < d; ++j) rref[i][j] = ctx.sub(rref[i][j], ctx.mul(f, piv[j]));
    }
    rref.push_back(std::move(piv));
    pivots.push_back(col);
  }

  auto basec = grid_.coords(through);
  for (std::size_t i = 0; i < rref.size(); ++i) {
    felem f = basec[pivots[i]];
    if (f == 0) continue;
    for (int j = 0; j < d; ++j) basec[j] = ctx.sub(basec[j], ctx.mul(f, rref[i][j]));
  }

  base_ = grid_.index_of(basec);
  basis_.clear();
  for (auto& row : rref) basis_.push_back(grid_.index_of(row));
  std::sort(basis_.begin(), basis_.end());
}

std::uint64_t Flat::size() const {
  std::uint64_t s = 1;
  for (std::size_t i = 0; i < basis_.size(); ++i) s *= grid_.ctx()->q();
  return s;
}

bool Flat::contains(PointIndex x) const {
  const FieldCtx& ctx = *grid_.ctx();
  auto v = grid_.coords(grid_.sub(x, base_));
  for (PointIndex b : basis_) {
    auto row = grid_.coords(b);
    // Pivot column = first nonzero entry of the RREF row.
    int pc = 0;
    while (row[pc] == 0) ++pc;
    felem f = v[pc];
    if (f == 0) continue;
    for (int j = 0; j < grid_.dim(); ++j) v[j] = ctx.sub(v[j], ctx.mul(f, row[j]));
  }
  for (felem c : v)
    if (c != 0) return false;
  return true;
}

std::vector<PointIndex> Flat::points() const {
  const std::uint32_t q = grid_.ctx()->q();
  std::vector<PointIndex> out;
  out.reserve(size());
  std::vector<felem> t(basis_.size(), 0);
  while (true) {
    PointIndex x = base_;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (t[i] != 0) x = grid_.add(x, grid_.scale(t[i], basis_[i]));
    out.push_back(x);
    std::size_t j = 0;
    for (; j < t.size(); ++j) {
      if (++t[j] < q) break;
      t[j] = 0;
    }
    if (j == t.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Flat::key() const {
  std::string k = std::to_string(base_);
  for (PointIndex b : basis_) {
    k += ':';
    k += std::to_string(b);
  }
  return k;
}

}  // namespace hsl
