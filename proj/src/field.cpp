#include "hsl/field.hpp"

#include <algorithm>
#include <charconv>

#include "hsl/errors.hpp"

namespace hsl {
namespace detail {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

namespace {

// Remainder of a mod b over F_p, both little-endian coefficient vectors,
// b monic.
std::vector<std::uint32_t> poly_mod(std::vector<std::uint32_t> a,
                                    std::span<const std::uint32_t> b,
                                    std::uint32_t p) {
  const std::size_t db = b.size() - 1;
  while (a.size() > db) {
    std::uint64_t lead = a.back();
    if (lead != 0) {
      const std::size_t shift = a.size() - 1 - db;
      for (std::size_t i = 0; i < db; ++i) {
        std::uint64_t t = a[shift + i] + static_cast<std::uint64_t>(p) * p -
                          lead * b[i] % p;
        a[shift + i] = static_cast<std::uint32_t>(t % p);
      }
    }
    a.pop_back();
  }
  while (a.size() > 1 && a.back() == 0) a.pop_back();
  return a;
}

bool poly_is_zero(const std::vector<std::uint32_t>& a) {
  return a.size() == 1 && a[0] == 0;
}

// Enumerates monic polynomials over F_p of the given degree in lexicographic
// order on (c0,...,c_{deg-1}) and calls fn until it returns true.
template <class Fn>
bool for_each_monic(std::uint32_t p, std::size_t deg, Fn&& fn) {
  std::vector<std::uint32_t> coeffs(deg + 1, 0);
  coeffs[deg] = 1;
  while (true) {
    if (fn(coeffs)) return true;
    std::size_t j = deg;
    while (j-- > 0) {
      if (++coeffs[j] < p) break;
      coeffs[j] = 0;
      if (j == 0) return false;
    }
  }
}

}  // namespace

bool is_irreducible_mod_p(std::span<const std::uint32_t> poly, std::uint32_t p) {
  const std::size_t deg = poly.size() - 1;
  if (deg == 0) return false;
  if (deg == 1) return true;
  for (std::size_t dd = 1; dd <= deg / 2; ++dd) {
    bool divisor_found = for_each_monic(p, dd, [&](const std::vector<std::uint32_t>& div) {
      std::vector<std::uint32_t> a(poly.begin(), poly.end());
      return poly_is_zero(poly_mod(std::move(a), div, p));
    });
    if (divisor_found) return false;
  }
  return true;
}

}  // namespace detail

std::shared_ptr<const FieldCtx> FieldCtx::make(std::uint32_t p, std::uint32_t m) {
  if (p == 2) throw ValidationError("characteristic 2 is not supported");
  if (!detail::is_prime(p)) throw ValidationError("p = " + std::to_string(p) + " is not prime");
  if (m < 1) throw ValidationError("extension degree must be >= 1");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    q *= p;
    if (q > kMaxFieldSize)
      throw ValidationError("field size p^m exceeds the 2^20 cap");
  }

  auto ctx = std::shared_ptr<FieldCtx>(new FieldCtx());
  ctx->p_ = p;
  ctx->m_ = m;
  ctx->q_ = static_cast<std::uint32_t>(q);

  if (m == 1) {
    ctx->modulus_ = {0, 1};  // x
  } else {
    // Lexicographically smallest monic irreducible of degree m.
    std::vector<std::uint32_t> found;
    detail::for_each_monic(p, m, [&](const std::vector<std::uint32_t>& cand) {
      if (detail::is_irreducible_mod_p(cand, p)) {
        found = cand;
        return true;
      }
      return false;
    });
    ctx->modulus_ = std::move(found);
  }

  ctx->build_tables();
  return ctx;
}

std::shared_ptr<const FieldCtx> FieldCtx::parse(std::string_view spec) {
  auto parse_u32 = [](std::string_view s) -> std::uint32_t {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ValidationError("bad field spec token: '" + std::string(s) + "'");
    return v;
  };
  auto caret = spec.find('^');
  if (caret != std::string_view::npos) {
    return make(parse_u32(spec.substr(0, caret)), parse_u32(spec.substr(caret + 1)));
  }
  // Plain prime power q: factor out the unique prime.
  std::uint32_t q = parse_u32(spec);
  if (q < 3) throw ValidationError("field size must be an odd prime power >= 3");
  std::uint32_t p = q;
  for (std::uint32_t f = 2; f * f <= q; ++f) {
    if (q % f == 0) {
      p = f;
      break;
    }
  }
  std::uint32_t m = 0, rest = q;
  while (rest > 1) {
    if (rest % p != 0) throw ValidationError(std::to_string(q) + " is not a prime power");
    rest /= p;
    ++m;
  }
  return make(p, m);
}

std::string FieldCtx::name() const {
  return std::to_string(p_) + "^" + std::to_string(m_);
}

felem FieldCtx::from_residue(std::uint64_t c) const {
  std::uint64_t r = c % p_;
  // Constant c0 sits in the most significant digit of the index.
  std::uint64_t idx = r;
  for (std::uint32_t i = 1; i < m_; ++i) idx *= p_;
  return static_cast<felem>(idx);
}

std::vector<std::uint32_t> FieldCtx::coeffs_of(felem a) const {
  std::vector<std::uint32_t> c(m_);
  for (std::uint32_t j = m_; j-- > 0;) {
    c[j] = a % p_;
    a /= p_;
  }
  return c;
}

felem FieldCtx::from_coeffs(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() != m_) throw ValidationError("coefficient list has wrong length");
  std::uint64_t idx = 0;
  for (std::uint32_t j = 0; j < m_; ++j) {
    if (coeffs[j] >= p_) throw ValidationError("coefficient out of range");
    idx = idx * p_ + coeffs[j];
  }
  return static_cast<felem>(idx);
}

felem FieldCtx::add(felem a, felem b) const {
  felem out = 0;
  std::uint64_t scale = 1;
  for (std::uint32_t j = 0; j < m_; ++j) {
    std::uint32_t da = a % p_, db = b % p_;
    std::uint32_t s = da + db;
    if (s >= p_) s -= p_;
    out += static_cast<felem>(s * scale);
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return out;
}

felem FieldCtx::neg(felem a) const {
  felem out = 0;
  std::uint64_t scale = 1;
  for (std::uint32_t j = 0; j < m_; ++j) {
    std::uint32_t da = a % p_;
    out += static_cast<felem>((da == 0 ? 0 : p_ - da) * scale);
    a /= p_;
    scale *= p_;
  }
  return out;
}

felem FieldCtx::sub(felem a, felem b) const { return add(a, neg(b)); }

felem FieldCtx::inv(felem a) const {
  if (a == 0) throw ValidationError("inverse of zero");
  std::uint64_t e = (q_ - 1 - log_[a]) % (q_ - 1);
  return exp_[e];
}

felem FieldCtx::pow(felem a, std::uint64_t e) const {
  if (a == 0) return e == 0 ? one_ : 0;
  std::uint64_t le = static_cast<std::uint64_t>(log_[a]) % (q_ - 1) * (e % (q_ - 1)) % (q_ - 1);
  return exp_[le];
}

std::optional<felem> FieldCtx::sqrt_of(felem a) const {
  felem r = sqrt_[a];
  if (r == kNoSqrt) return std::nullopt;
  return r;
}

std::string FieldCtx::format(felem a) const {
  auto c = coeffs_of(a);
  std::string out;
  for (std::uint32_t j = 0; j < m_; ++j) {
    if (j) out += ',';
    out += std::to_string(c[j]);
  }
  return out;
}

felem FieldCtx::parse_element(std::string_view text) const {
  std::vector<std::uint32_t> coeffs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    auto tok = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ValidationError("bad element token: '" + std::string(tok) + "'");
    coeffs.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (coeffs.size() == 1 && m_ > 1) coeffs.resize(m_, 0);  // allow plain residues
  return from_coeffs(coeffs);
}

std::vector<felem> FieldCtx::enumerate() const {
  std::vector<felem> all(q_);
  for (std::uint32_t i = 0; i < q_; ++i) all[i] = i;
  return all;
}

felem FieldCtx::mul_poly(felem a, felem b) const {
  auto ca = coeffs_of(a);
  auto cb = coeffs_of(b);
  std::vector<std::uint64_t> prod(2 * m_ - 1, 0);
  for (std::uint32_t i = 0; i < m_; ++i) {
    if (ca[i] == 0) continue;
    for (std::uint32_t j = 0; j < m_; ++j)
      prod[i + j] += static_cast<std::uint64_t>(ca[i]) * cb[j];
  }
  // Reduce degree by degree using the monic modulus.
  for (std::size_t k = prod.size(); k-- > m_;) {
    std::uint64_t lead = prod[k] % p_;
    prod[k] = 0;
    if (lead == 0) continue;
    for (std::uint32_t j = 0; j < m_; ++j) {
      std::uint64_t sub = lead * modulus_[j] % p_;
      prod[k - m_ + j] += static_cast<std::uint64_t>(p_) - sub;
    }
  }
  std::vector<std::uint32_t> red(m_);
  for (std::uint32_t j = 0; j < m_; ++j) red[j] = static_cast<std::uint32_t>(prod[j] % p_);
  return from_coeffs(red);
}

void FieldCtx::build_tables() {
  one_ = from_residue(1);

  // Prime factors of q-1, for the generator order test.
  std::vector<std::uint32_t> factors;
  {
    std::uint32_t n = q_ - 1;
    for (std::uint32_t f = 2; static_cast<std::uint64_t>(f) * f <= n; ++f) {
      if (n % f == 0) {
        factors.push_back(f);
        while (n % f == 0) n /= f;
      }
    }
    if (n > 1) factors.push_back(n);
  }

  auto pow_poly = [&](felem base, std::uint32_t e) {
    felem acc = one_;
    felem b = base;
    while (e) {
      if (e & 1) acc = mul_poly(acc, b);
      b = mul_poly(b, b);
      e >>= 1;
    }
    return acc;
  };

  felem gen = 0;
  for (felem cand = 1; cand < q_; ++cand) {
    bool ok = true;
    for (std::uint32_t f : factors) {
      if (pow_poly(cand, (q_ - 1) / f) == one_) {
        ok = false;
        break;
      }
    }
    if (ok) {
      gen = cand;
      break;
    }
  }

  exp_.resize(q_ - 1);
  log_.assign(q_, 0);
  felem cur = one_;
  for (std::uint32_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = cur;
    log_[cur] = i;
    cur = mul_poly(cur, gen);
  }

  inv_two_ = inv(from_residue(2));

  // Quadratic character from discrete-log parity.
  chi_.assign(q_, 0);
  for (felem a = 1; a < q_; ++a) chi_[a] = (log_[a] % 2 == 0) ? 1 : -1;

  // Trace via Frobenius chains a -> a^p through the log table.
  trace_.assign(q_, 0);
  for (felem a = 0; a < q_; ++a) {
    felem acc = a;
    felem frob = a;
    for (std::uint32_t i = 1; i < m_; ++i) {
      if (frob != 0) {
        std::uint64_t e = static_cast<std::uint64_t>(log_[frob]) * p_ % (q_ - 1);
        frob = exp_[e];
      }
      acc = add(acc, frob);
    }
    auto c = coeffs_of(acc);
    for (std::uint32_t j = 1; j < m_; ++j) {
      if (c[j] != 0) throw std::logic_error("trace left the prime subfield");
    }
    trace_[a] = c[0];
  }

  // Square-root table by exhaustive squaring; smallest root wins.
  sqrt_.assign(q_, kNoSqrt);
  for (felem x = 0; x < q_; ++x) {
    felem sq = mul(x, x);
    if (sqrt_[sq] == kNoSqrt) sqrt_[sq] = x;
  }
}

namespace {
void require_same(const FieldCtxPtr& a, const FieldCtxPtr& b) {
  if (!a || !b || !a->same_field(*b))
    throw ValidationError("field elements belong to different contexts");
}
}  // namespace

FieldElement FieldElement::operator+(const FieldElement& o) const {
  require_same(ctx_, o.ctx_);
  return {ctx_->add(v_, o.v_), ctx_};
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  require_same(ctx_, o.ctx_);
  return {ctx_->sub(v_, o.v_), ctx_};
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  require_same(ctx_, o.ctx_);
  return {ctx_->mul(v_, o.v_), ctx_};
}

std::optional<FieldElement> FieldElement::sqrt() const {
  auto r = ctx_->sqrt_of(v_);
  if (!r) return std::nullopt;
  return FieldElement(*r, ctx_);
}

}  // namespace hsl
