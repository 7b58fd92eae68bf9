#include "hsl/hidden_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hsl/errors.hpp"
#include "hsl/linalg.hpp"

namespace hsl {

std::vector<std::vector<int>> monomials_upto(int d, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(d, 0);
  // All tuples with sum <= t.
  while (true) {
    int s = 0;
    for (int x : e) s += x;
    if (s <= t) out.push_back(e);
    int j = d - 1;
    while (j >= 0 && e[j] == t) e[j--] = 0;
    if (j < 0) break;
    ++e[j];
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    if (sa != sb) return sa > sb;
    return a > b;
  });
  return out;
}

MultiPoly MultiPoly::zero(FieldCtxPtr ctx, int nvars, int max_deg) {
  MultiPoly h;
  h.ctx = std::move(ctx);
  h.nvars = nvars;
  h.max_deg = max_deg;
  h.coeffs.assign(monomials_upto(nvars, max_deg).size(), 0);
  return h;
}

int MultiPoly::total_degree() const {
  auto mons = monomials_upto(nvars, max_deg);
  int deg = -1;
  for (std::size_t i = 0; i < mons.size(); ++i) {
    if (coeffs[i] == 0) continue;
    int s = 0;
    for (int x : mons[i]) s += x;
    deg = std::max(deg, s);
  }
  return deg;
}

felem MultiPoly::eval(std::span<const felem> point) const {
  auto mons = monomials_upto(nvars, max_deg);
  felem acc = 0;
  for (std::size_t i = 0; i < mons.size(); ++i) {
    if (coeffs[i] == 0) continue;
    felem term = coeffs[i];
    for (int j = 0; j < nvars; ++j)
      for (int rep = 0; rep < mons[i][j]; ++rep) term = ctx->mul(term, point[j]);
    acc = ctx->add(acc, term);
  }
  return acc;
}

MultiPoly MultiPoly::minus_constant(felem y) const {
  MultiPoly out = *this;
  out.coeffs.back() = ctx->sub(out.coeffs.back(), y);  // constant monomial is last
  return out;
}

MultiPoly MultiPoly::scaled(felem c) const {
  MultiPoly out = *this;
  for (auto& v : out.coeffs) v = ctx->mul(c, v);
  return out;
}

std::string MultiPoly::str() const {
  auto mons = monomials_upto(nvars, max_deg);
  std::string out;
  for (std::size_t i = 0; i < mons.size(); ++i) {
    if (coeffs[i] == 0) continue;
    if (!out.empty()) out += '+';
    std::string c = ctx->format(coeffs[i]);
    bool has_var = false;
    for (int x : mons[i]) has_var |= x > 0;
    bool unit = coeffs[i] == ctx->one();
    if (!unit || !has_var) out += ctx->m() > 1 ? "(" + c + ")" : c;
    if (!unit && has_var) out += '*';
    bool first = true;
    for (int j = 0; j < nvars; ++j) {
      if (mons[i][j] == 0) continue;
      if (!first) out += '*';
      first = false;
      out += "x" + std::to_string(j + 1);
      if (mons[i][j] > 1) out += "^" + std::to_string(mons[i][j]);
    }
  }
  return out.empty() ? "0" : out;
}

MultiPoly random_poly(FieldCtxPtr ctx, int nvars, int deg, Rng& rng) {
  MultiPoly h = MultiPoly::zero(ctx, nvars, deg);
  auto mons = monomials_upto(nvars, deg);
  std::size_t top = 0;
  while (top < mons.size()) {
    int s = 0;
    for (int x : mons[top]) s += x;
    if (s < deg) break;
    ++top;
  }
  do {
    for (std::size_t i = 0; i < top; ++i)
      h.coeffs[i] = static_cast<felem>(rng.below(ctx->q()));
  } while (std::all_of(h.coeffs.begin(), h.coeffs.begin() + top,
                       [](felem c) { return c == 0; }));
  for (std::size_t i = top; i < h.coeffs.size(); ++i)
    h.coeffs[i] = static_cast<felem>(rng.below(ctx->q()));
  return h;
}

namespace {

std::vector<felem> eval_over_grid(const MultiPoly& h, const Grid& grid) {
  if (grid.size() > kMaxLevelSetGrid)
    throw ResourceCapError("level-set enumeration capped at 2^22 points");
  std::vector<felem> values(grid.size());
  par_for(static_cast<std::int64_t>(grid.size()), Exec::parallel, [&](std::int64_t x) {
    auto c = grid.coords(static_cast<PointIndex>(x));
    values[x] = h.eval(c);
  });
  return values;
}

}  // namespace

LevelSetProfile level_sets(const MultiPoly& h, int d) {
  Grid grid(h.ctx, d);
  auto values = eval_over_grid(h, grid);
  LevelSetProfile prof;
  prof.sizes.assign(h.ctx->q(), 0);
  for (felem v : values) ++prof.sizes[v];
  prof.total = grid.size();
  return prof;
}

IntersectionProfile intersections(const MultiPoly& h, const MultiPoly& h2, int d) {
  if (!h.ctx->same_field(*h2.ctx))
    throw ValidationError("intersection profile needs a common field");
  Grid grid(h.ctx, d);
  auto va = eval_over_grid(h, grid);
  auto vb = eval_over_grid(h2, grid);
  IntersectionProfile prof;
  prof.q = h.ctx->q();
  prof.n.assign(static_cast<std::size_t>(prof.q) * prof.q, 0);
  for (std::uint64_t x = 0; x < grid.size(); ++x)
    ++prof.n[static_cast<std::size_t>(va[x]) * prof.q + vb[x]];
  return prof;
}

double fidelity(const MultiPoly& h, const MultiPoly& h2, int d) {
  auto prof = intersections(h, h2, d);
  Matrix n(prof.q);
  for (std::size_t i = 0; i < prof.n.size(); ++i)
    n.a[i] = static_cast<double>(prof.n[i]);
  double qd = std::pow(static_cast<double>(h.ctx->q()), d);
  return nuclear_norm(n) / qd;
}

double fidelity_dense(const MultiPoly& h, const MultiPoly& h2, int d, int tensor_power) {
  Grid grid(h.ctx, d);
  auto va = eval_over_grid(h, grid);
  auto vb = eval_over_grid(h2, grid);
  const std::size_t n1 = grid.size();
  std::size_t n = 1;
  for (int i = 0; i < tensor_power; ++i) n *= n1;
  if (n > 4096) throw ResourceCapError("dense fidelity oracle capped at 4096 amplitudes");

  auto build = [&](const std::vector<felem>& vals) {
    Matrix rho(n);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        std::size_t uu = u, vv = v;
        bool same = true;
        for (int f = 0; f < tensor_power; ++f) {
          if (vals[uu % n1] != vals[vv % n1]) {
            same = false;
            break;
          }
          uu /= n1;
          vv /= n1;
        }
        if (same) rho(u, v) = w;
      }
    return rho;
  };

  Matrix prod = matmul(sym_sqrt(build(va)), sym_sqrt(build(vb)));
  return nuclear_norm(prod);
}

BoundCheck bound_comb1(const IntersectionProfile& n, const LevelSetProfile& h_sizes,
                       int d, double alpha, double beta, double delta) {
  const std::uint32_t q = n.q;
  BoundCheck out;
  std::size_t exceed = 0;
  for (std::uint64_t v : n.n)
    if (static_cast<double>(v) >= alpha) ++exceed;
  bool beta_ok = static_cast<double>(exceed) / (static_cast<double>(q) * q) <= beta;
  bool delta_ok = true;
  for (std::uint64_t s : h_sizes.sizes) delta_ok &= static_cast<double>(s) <= delta;
  out.hypotheses_ok = beta_ok && delta_ok;
  double x = std::pow(static_cast<double>(q), d);
  out.bound = (alpha * alpha + beta * delta * delta) * std::pow(static_cast<double>(q), 3) / (x * x);
  return out;
}

BoundCheck bound_comb2(const IntersectionProfile& n, const LevelSetProfile& h_sizes,
                       int d, double alpha, double beta, double gamma, double delta) {
  if (gamma <= 0.0) throw ValidationError("comb2 requires gamma > 0");
  const std::uint32_t q = n.q;
  BoundCheck out;
  bool beta_ok = true;
  for (felem y2 = 0; y2 < q; ++y2) {
    std::size_t exceed = 0;
    for (felem y = 0; y < q; ++y)
      if (static_cast<double>(n.at(y, y2)) >= alpha) ++exceed;
    beta_ok &= static_cast<double>(exceed) / q <= beta;
  }
  bool size_ok = true;
  for (std::uint64_t s : h_sizes.sizes)
    size_ok &= gamma <= static_cast<double>(s) && static_cast<double>(s) <= delta;
  out.hypotheses_ok = beta_ok && size_ok;
  double x = std::pow(static_cast<double>(q), d);
  out.bound = alpha * q * q / (gamma * x) + beta * delta * q / x;
  return out;
}

AutoBounds auto_bounds(const IntersectionProfile& n, const LevelSetProfile& h_sizes, int d) {
  const std::uint32_t q = n.q;
  AutoBounds out;
  out.delta = 0;
  double gamma = std::numeric_limits<double>::infinity();
  for (std::uint64_t s : h_sizes.sizes) {
    out.delta = std::max(out.delta, static_cast<double>(s));
    gamma = std::min(gamma, static_cast<double>(s));
  }
  out.gamma = gamma;
  out.comb2_applicable = gamma > 0;

  std::vector<std::uint64_t> dist(n.n.begin(), n.n.end());
  std::sort(dist.begin(), dist.end());
  dist.erase(std::unique(dist.begin(), dist.end()), dist.end());
  std::vector<double> cands;
  for (std::uint64_t v : dist) cands.push_back(static_cast<double>(v));
  cands.push_back(static_cast<double>(dist.back()) + 1.0);

  const double x = std::pow(static_cast<double>(q), d);
  out.bound1 = std::numeric_limits<double>::infinity();
  out.bound2 = std::numeric_limits<double>::infinity();
  for (double alpha : cands) {
    std::size_t exceed = 0;
    for (std::uint64_t v : n.n)
      if (static_cast<double>(v) >= alpha) ++exceed;
    double beta = static_cast<double>(exceed) / (static_cast<double>(q) * q);
    double b1 = (alpha * alpha + beta * out.delta * out.delta) *
                std::pow(static_cast<double>(q), 3) / (x * x);
    if (b1 < out.bound1) {
      out.bound1 = b1;
      out.alpha1 = alpha;
      out.beta1 = beta;
    }
    if (out.comb2_applicable) {
      double worst_col = 0.0;
      for (felem y2 = 0; y2 < q; ++y2) {
        std::size_t colex = 0;
        for (felem y = 0; y < q; ++y)
          if (static_cast<double>(n.at(y, y2)) >= alpha) ++colex;
        worst_col = std::max(worst_col, static_cast<double>(colex) / q);
      }
      double b2 = alpha * q * q / (gamma * x) + worst_col * out.delta * q / x;
      if (b2 < out.bound2) {
        out.bound2 = b2;
        out.alpha2 = alpha;
        out.beta2 = worst_col;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Univariate/bivariate polynomial machinery for the factor certificates.

namespace {

struct UPoly {
  const FieldCtx* F = nullptr;
  std::vector<felem> c;  // little-endian; empty = zero

  int deg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
};

UPoly up_const(const FieldCtx& F, felem v) {
  UPoly p{&F, {}};
  if (v != 0) p.c = {v};
  return p;
}

UPoly up_add(const UPoly& a, const UPoly& b) {
  UPoly out{a.F ? a.F : b.F, {}};
  out.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    felem x = i < a.c.size() ? a.c[i] : 0;
    felem y = i < b.c.size() ? b.c[i] : 0;
    out.c[i] = out.F->add(x, y);
  }
  out.trim();
  return out;
}

UPoly up_scale(const UPoly& a, felem s) {
  UPoly out = a;
  for (auto& x : out.c) x = a.F->mul(s, x);
  out.trim();
  return out;
}

UPoly up_sub(const UPoly& a, const UPoly& b) {
  return up_add(a, up_scale(b, b.F ? b.F->neg(b.F->one()) : 0));
}

UPoly up_mul(const UPoly& a, const UPoly& b) {
  UPoly out{a.F ? a.F : b.F, {}};
  if (a.is_zero() || b.is_zero()) return out;
  out.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      out.c[i + j] = out.F->add(out.c[i + j], out.F->mul(a.c[i], b.c[j]));
  }
  return out;
}

// a = q*b + r with deg r < deg b; b nonzero.
void up_divmod(const UPoly& a, const UPoly& b, UPoly* quo, UPoly* rem) {
  const FieldCtx& F = *b.F;
  UPoly r = a;
  UPoly q{&F, {}};
  if (!b.is_zero() && !r.is_zero() && r.deg() >= b.deg())
    q.c.assign(r.deg() - b.deg() + 1, 0);
  felem lead_inv = F.inv(b.c.back());
  while (!r.is_zero() && r.deg() >= b.deg()) {
    int shift = r.deg() - b.deg();
    felem f = F.mul(r.c.back(), lead_inv);
    q.c[shift] = f;
    for (std::size_t i = 0; i < b.c.size(); ++i)
      r.c[shift + i] = F.sub(r.c[shift + i], F.mul(f, b.c[i]));
    r.trim();
  }
  q.trim();
  if (quo) *quo = q;
  if (rem) *rem = r;
}

UPoly up_divexact(const UPoly& a, const UPoly& b) {
  UPoly q, r;
  up_divmod(a, b, &q, &r);
  if (!r.is_zero()) throw std::logic_error("inexact polynomial division");
  return q;
}

UPoly up_gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly r;
    up_divmod(a, b, nullptr, &r);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) a = up_scale(a, a.F->inv(a.c.back()));  // monic
  return a;
}

// Bivariate polynomial as coefficients in F_q[x1] per power of x2.
struct BiPoly {
  const FieldCtx* F = nullptr;
  std::vector<UPoly> c;  // index = x2 power

  int deg_x2() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
};

BiPoly to_bipoly(const MultiPoly& h) {
  const FieldCtx& F = *h.ctx;
  auto mons = monomials_upto(h.nvars, h.max_deg);
  BiPoly out{&F, {}};
  for (std::size_t i = 0; i < mons.size(); ++i) {
    if (h.coeffs[i] == 0) continue;
    int e1 = mons[i][0], e2 = mons[i][1];
    if (static_cast<int>(out.c.size()) <= e2) out.c.resize(e2 + 1, UPoly{&F, {}});
    UPoly mono{&F, std::vector<felem>(e1 + 1, 0)};
    mono.c[e1] = h.coeffs[i];
    out.c[e2] = up_add(out.c[e2], mono);
  }
  out.trim();
  return out;
}

UPoly bipoly_content(const BiPoly& f) {
  UPoly g{f.F, {}};
  for (const auto& coef : f.c) g = up_gcd(g, coef);
  return g;
}

BiPoly bipoly_primitive(const BiPoly& f, const UPoly& content) {
  BiPoly out{f.F, {}};
  for (const auto& coef : f.c)
    out.c.push_back(coef.is_zero() ? coef : up_divexact(coef, content));
  return out;
}

// Resultant w.r.t. x2 via fraction-free (Bareiss) elimination of the
// Sylvester matrix over F_q[x1]; only zero-ness is needed.
bool resultant_x2_is_zero(const BiPoly& f, const BiPoly& g) {
  const FieldCtx& F = *f.F;
  const int m = f.deg_x2(), n = g.deg_x2();
  const int sz = m + n;
  std::vector<std::vector<UPoly>> a(sz, std::vector<UPoly>(sz, UPoly{&F, {}}));
  // Rows of f coefficients (degree-descending), shifted.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) a[i][i + j] = f.c[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) a[n + i][i + j] = g.c[n - j];

  UPoly prev = up_const(F, F.one());
  for (int k = 0; k < sz - 1; ++k) {
    if (a[k][k].is_zero()) {
      int swap_row = -1;
      for (int r = k + 1; r < sz; ++r)
        if (!a[r][k].is_zero()) {
          swap_row = r;
          break;
        }
      if (swap_row < 0) return true;  // singular: resultant vanishes
      std::swap(a[k], a[swap_row]);
    }
    for (int i = k + 1; i < sz; ++i) {
      for (int j = k + 1; j < sz; ++j) {
        UPoly num = up_sub(up_mul(a[i][j], a[k][k]), up_mul(a[i][k], a[k][j]));
        a[i][j] = num.is_zero() ? num : up_divexact(num, prev);
      }
      a[i][k] = UPoly{&F, {}};
    }
    prev = a[k][k];
  }
  return a[sz - 1][sz - 1].is_zero();
}

bool common_nontrivial_factor(const BiPoly& f, const BiPoly& g) {
  if (f.is_zero() || g.is_zero())
    throw ValidationError("common-factor test on the zero polynomial");
  UPoly cf = bipoly_content(f), cg = bipoly_content(g);
  if (up_gcd(cf, cg).deg() > 0) return true;
  BiPoly pf = bipoly_primitive(f, cf), pg = bipoly_primitive(g, cg);
  if (pf.deg_x2() == 0 || pg.deg_x2() == 0) return false;
  return resultant_x2_is_zero(pf, pg);
}

}  // namespace

SzParams common_factor_and_sz_params(const MultiPoly& h, const MultiPoly& h2) {
  if (h.nvars != 2 || h2.nvars != 2)
    throw ValidationError("factor certificates implemented for d = 2");
  const FieldCtx& F = *h.ctx;
  const std::uint32_t q = F.q();
  int dh = h.total_degree(), dh2 = h2.total_degree();
  if (dh < 1 || dh2 < 1) throw ValidationError("degrees must be >= 1");

  SzParams out;
  out.q = q;
  out.alpha = static_cast<double>(dh) * dh2 * std::min(dh, dh2);  // q^{d-2} = 1 at d=2
  out.delta = static_cast<double>(q) * dh;
  out.common_factor.assign(static_cast<std::size_t>(q) * q, 0);

  std::vector<BiPoly> fy(q), gy(q);
  for (felem y = 0; y < q; ++y) {
    fy[y] = to_bipoly(h.minus_constant(y));
    gy[y] = to_bipoly(h2.minus_constant(y));
  }
  std::size_t flagged = 0;
  for (felem y = 0; y < q; ++y)
    for (felem y2 = 0; y2 < q; ++y2) {
      bool cf = common_nontrivial_factor(fy[y], gy[y2]);
      out.common_factor[static_cast<std::size_t>(y) * q + y2] = cf ? 1 : 0;
      flagged += cf;
    }
  out.flagged_fraction = static_cast<double>(flagged) / (static_cast<double>(q) * q);
  return out;
}

// ---------------------------------------------------------------------------
// Absolute irreducibility by exhaustive linear-factor search over extensions.

namespace {

struct ExtensionTower {
  FieldCtxPtr base;
  std::vector<FieldCtxPtr> fields;            // fields[k-1] = F_{q^k}
  std::vector<std::vector<felem>> embeddings; // embeddings[k-1][a]
};

ExtensionTower build_tower(const FieldCtxPtr& base, int max_k) {
  ExtensionTower tw;
  tw.base = base;
  for (int k = 1; k <= max_k; ++k) {
    auto ext = k == 1 ? base : FieldCtx::make(base->p(), base->m() * k);
    std::vector<felem> emb(base->q());
    if (k == 1) {
      for (felem a = 0; a < base->q(); ++a) emb[a] = a;
    } else {
      // Image of the base generator-polynomial variable: the smallest root
      // of the base modulus inside the extension.
      felem root = 0;
      bool found = false;
      for (felem v = 0; v < ext->q() && !found; ++v) {
        felem acc = 0, pw = ext->one();
        for (std::uint32_t j = 0; j <= base->m(); ++j) {
          acc = ext->add(acc, ext->mul(ext->from_residue(base->modulus()[j]), pw));
          pw = ext->mul(pw, v);
        }
        if (acc == 0) {
          root = v;
          found = true;
        }
      }
      if (!found) throw std::logic_error("base modulus has no root in extension");
      for (felem a = 0; a < base->q(); ++a) {
        auto cs = base->coeffs_of(a);
        felem acc = 0, pw = ext->one();
        for (std::uint32_t j = 0; j < base->m(); ++j) {
          acc = ext->add(acc, ext->mul(ext->from_residue(cs[j]), pw));
          pw = ext->mul(pw, root);
        }
        emb[a] = acc;
      }
    }
    tw.fields.push_back(std::move(ext));
    tw.embeddings.push_back(std::move(emb));
  }
  return tw;
}

struct EmbeddedPoly {
  const FieldCtx* E = nullptr;
  std::vector<std::array<int, 2>> exps;
  std::vector<felem> coeffs;
};

EmbeddedPoly embed_poly(const MultiPoly& f, const ExtensionTower& tw, int k) {
  EmbeddedPoly out;
  out.E = tw.fields[k - 1].get();
  auto mons = monomials_upto(f.nvars, f.max_deg);
  for (std::size_t i = 0; i < mons.size(); ++i) {
    if (f.coeffs[i] == 0) continue;
    out.exps.push_back({mons[i][0], mons[i][1]});
    out.coeffs.push_back(tw.embeddings[k - 1][f.coeffs[i]]);
  }
  return out;
}

// Top form evaluated at a direction (u, v): the s^deg coefficient of the
// restriction of f to any line with that direction.
felem top_form_at(const EmbeddedPoly& f, int deg, felem u, felem v) {
  const FieldCtx& E = *f.E;
  felem acc = 0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    if (f.exps[i][0] + f.exps[i][1] != deg) continue;
    felem t = f.coeffs[i];
    for (int r = 0; r < f.exps[i][0]; ++r) t = E.mul(t, u);
    for (int r = 0; r < f.exps[i][1]; ++r) t = E.mul(t, v);
    acc = E.add(acc, t);
  }
  return acc;
}

// f restricted to x1 = -b s - c, x2 = s, expanded symbolically; zero iff the
// line divides f.
bool vanishes_on_slanted_line(const EmbeddedPoly& f, int deg, felem b, felem c) {
  const FieldCtx& E = *f.E;
  // Powers of u = (-c) + (-b) s.
  std::vector<std::vector<felem>> upow(deg + 1);
  upow[0] = {E.one()};
  std::vector<felem> u{E.neg(c), E.neg(b)};
  for (int j = 1; j <= deg; ++j) {
    upow[j].assign(j + 1, 0);
    for (std::size_t i = 0; i < upow[j - 1].size(); ++i) {
      upow[j][i] = E.add(upow[j][i], E.mul(upow[j - 1][i], u[0]));
      upow[j][i + 1] = E.add(upow[j][i + 1], E.mul(upow[j - 1][i], u[1]));
    }
  }
  std::vector<felem> res(deg + 1, 0);
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    int e1 = f.exps[i][0], e2 = f.exps[i][1];
    for (int j = 0; j <= e1; ++j) {
      felem add = E.mul(f.coeffs[i], upow[e1][j]);
      res[e2 + j] = E.add(res[e2 + j], add);
    }
  }
  return std::all_of(res.begin(), res.end(), [](felem x) { return x == 0; });
}

bool vanishes_on_vertical_line(const EmbeddedPoly& f, int deg, felem c) {
  const FieldCtx& E = *f.E;
  // x2 = -c, x1 = s free.
  std::vector<felem> res(deg + 1, 0);
  felem mc = E.neg(c);
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    felem t = f.coeffs[i];
    for (int r = 0; r < f.exps[i][1]; ++r) t = E.mul(t, mc);
    res[f.exps[i][0]] = E.add(res[f.exps[i][0]], t);
  }
  return std::all_of(res.begin(), res.end(), [](felem x) { return x == 0; });
}

// Exhaustive search for a linear factor over the field of f. A line with
// direction (u, v) can divide f only if the top form vanishes at (u, v),
// which prunes all but <= deg directions.
bool has_linear_factor(const EmbeddedPoly& f, int deg) {
  const FieldCtx& E = *f.E;
  for (felem b = 0; b < E.q(); ++b) {
    if (top_form_at(f, deg, E.neg(b), E.one()) != 0) continue;
    for (felem c = 0; c < E.q(); ++c)
      if (vanishes_on_slanted_line(f, deg, b, c)) return true;
  }
  if (top_form_at(f, deg, E.one(), 0) == 0) {
    for (felem c = 0; c < E.q(); ++c)
      if (vanishes_on_vertical_line(f, deg, c)) return true;
  }
  return false;
}

bool abs_irred_with_tower(const MultiPoly& shifted, const ExtensionTower& tw) {
  int deg = shifted.total_degree();
  if (deg <= 0) return false;
  if (deg == 1) return true;
  for (int k = 1; k <= deg; ++k) {
    if (has_linear_factor(embed_poly(shifted, tw, k), deg)) return false;
  }
  return true;
}

}  // namespace

bool absolute_irreducibility(const MultiPoly& h, felem y) {
  if (h.nvars != 2) throw ValidationError("absolute irreducibility test is bivariate");
  if (h.ctx->q() > 9) throw ResourceCapError("absolute irreducibility capped at q <= 9");
  MultiPoly f = h.minus_constant(y);
  int deg = f.total_degree();
  if (deg > 3) throw ResourceCapError("absolute irreducibility capped at degree 3");
  if (deg <= 0) return false;
  if (deg == 1) return true;
  return abs_irred_with_tower(f, build_tower(h.ctx, deg));
}

// ---------------------------------------------------------------------------
// Typicality census over projectivized degree-t polynomials (d = 2).

namespace {

struct CensusIndex {
  std::vector<std::vector<int>> mons;
  std::size_t top_count = 0;    // monomials of degree exactly t (leading block)
  std::size_t low_count = 0;
  std::uint64_t classes = 0;
  std::vector<std::uint64_t> lead_sizes;  // classes with given lead position
};

CensusIndex census_index(const FieldCtx& F, int t) {
  CensusIndex ix;
  ix.mons = monomials_upto(2, t);
  for (const auto& e : ix.mons) {
    int s = e[0] + e[1];
    if (s == t) ++ix.top_count;
  }
  ix.low_count = ix.mons.size() - ix.top_count;
  std::uint64_t qp_low = 1;
  for (std::size_t i = 0; i < ix.low_count; ++i) qp_low *= F.q();
  for (std::size_t lead = 0; lead < ix.top_count; ++lead) {
    std::uint64_t sz = qp_low;
    for (std::size_t i = lead + 1; i < ix.top_count; ++i) sz *= F.q();
    ix.lead_sizes.push_back(sz);
    ix.classes += sz;
  }
  return ix;
}

MultiPoly census_decode(const FieldCtxPtr& ctx, int t, const CensusIndex& ix,
                        std::uint64_t index) {
  MultiPoly h = MultiPoly::zero(ctx, 2, t);
  std::size_t lead = 0;
  while (index >= ix.lead_sizes[lead]) {
    index -= ix.lead_sizes[lead];
    ++lead;
  }
  h.coeffs[lead] = ctx->one();
  // Remaining free coefficients in mixed radix.
  for (std::size_t i = ix.mons.size(); i-- > lead + 1;) {
    h.coeffs[i] = static_cast<felem>(index % ctx->q());
    index /= ctx->q();
  }
  return h;
}

CensusReport census_impl(FieldCtxPtr ctx, int t, std::uint64_t sample_limit,
                         std::uint64_t seed, Exec exec) {
  if (t < 1 || t > 3) throw ValidationError("census supports total degree 1..3");
  if (ctx->q() > 9) throw ResourceCapError("census capped at q <= 9");
  auto ix = census_index(*ctx, t);
  auto tower = build_tower(ctx, std::max(t, 1));

  CensusReport rep;
  rep.classes = ix.classes;
  rep.sampled = ix.classes > sample_limit;
  rep.tested = rep.sampled ? sample_limit : ix.classes;

  Rng master(seed);
  std::vector<std::uint8_t> fail(rep.tested, 0);
  par_for(static_cast<std::int64_t>(rep.tested), exec, [&](std::int64_t i) {
    Rng stream = master.split(static_cast<std::uint64_t>(i));
    std::uint64_t cls = rep.sampled ? stream.below(ix.classes) : static_cast<std::uint64_t>(i);
    MultiPoly h = census_decode(ctx, t, ix, cls);
    felem y = static_cast<felem>(stream.below(ctx->q()));
    fail[i] = abs_irred_with_tower(h.minus_constant(y), tower) ? 0 : 1;
  });
  for (auto f : fail) rep.failing += f;
  rep.fraction = rep.tested ? static_cast<double>(rep.failing) / rep.tested : 0.0;
  rep.ci = wilson_interval(rep.failing, rep.tested);
  return rep;
}

}  // namespace

CensusReport typicality_census(FieldCtxPtr ctx, int t, std::uint64_t sample_limit,
                               std::uint64_t seed, Exec exec) {
  return census_impl(std::move(ctx), t, sample_limit, seed, exec);
}

CensusReport typicality_census_ref(FieldCtxPtr ctx, int t, std::uint64_t sample_limit,
                                   std::uint64_t seed) {
  // Plain serial loop over the same class enumeration.
  if (t < 1 || t > 3) throw ValidationError("census supports total degree 1..3");
  if (ctx->q() > 9) throw ResourceCapError("census capped at q <= 9");
  auto ix = census_index(*ctx, t);
  CensusReport rep;
  rep.classes = ix.classes;
  rep.sampled = ix.classes > sample_limit;
  rep.tested = rep.sampled ? sample_limit : ix.classes;
  Rng master(seed);
  for (std::uint64_t i = 0; i < rep.tested; ++i) {
    Rng stream = master.split(i);
    std::uint64_t cls = rep.sampled ? stream.below(ix.classes) : i;
    MultiPoly h = census_decode(ctx, t, ix, cls);
    felem y = static_cast<felem>(stream.below(ctx->q()));
    if (!absolute_irreducibility(h, y)) ++rep.failing;
  }
  rep.fraction = rep.tested ? static_cast<double>(rep.failing) / rep.tested : 0.0;
  rep.ci = wilson_interval(rep.failing, rep.tested);
  return rep;
}

CopiesReport copies_needed(double f_max, double n_states, double eps) {
  if (!(f_max > 0.0) || f_max >= 1.0)
    throw ValidationError("copies_needed requires 0 < F_max < 1");
  if (n_states < 2.0) throw ValidationError("copies_needed requires N >= 2");
  if (!(eps > 0.0) || eps >= 1.0) throw ValidationError("copies_needed requires 0 < eps < 1");
  CopiesReport rep;
  double l = 2.0 * (std::log(n_states) - std::log(eps)) / std::log(1.0 / f_max);
  rep.copies = std::max(1, static_cast<int>(std::ceil(l)));
  rep.single_shot_success = 1.0 - n_states * std::sqrt(std::pow(f_max, rep.copies));
  return rep;
}

}  // namespace hsl
