#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsl {

// Element of F_{p^m} in its canonical index encoding (see FieldCtx::compose).
using felem = std::uint32_t;

constexpr std::uint32_t kMaxFieldSize = 1u << 20;

// Arithmetic context for F_{p^m}, p an odd prime, built once and then
// immutable; safe to share across threads. Elements are indices in [0, q)
// ordered like the lexicographic order on coefficient lists (c0,...,c_{m-1}),
// where the element is c0 + c1*x + ... + c_{m-1}*x^{m-1} mod `modulus`.
class FieldCtx {
 public:
  static std::shared_ptr<const FieldCtx> make(std::uint32_t p, std::uint32_t m);
  // Accepts "p^m" or a plain prime-power "q".
  static std::shared_ptr<const FieldCtx> parse(std::string_view spec);

  std::uint32_t p() const { return p_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t q() const { return q_; }
  // Monic irreducible modulus, little-endian coefficients, length m+1.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  std::string name() const;  // "p^m"

  bool same_field(const FieldCtx& other) const {
    return p_ == other.p_ && m_ == other.m_ && modulus_ == other.modulus_;
  }

  felem zero() const { return 0; }
  felem one() const { return one_; }
  // Embeds an integer residue (reduced mod p) as a constant.
  felem from_residue(std::uint64_t c) const;

  felem add(felem a, felem b) const;
  felem sub(felem a, felem b) const;
  felem neg(felem a) const;
  felem mul(felem a, felem b) const {
    if (a == 0 || b == 0) return 0;
    std::uint64_t e = static_cast<std::uint64_t>(log_[a]) + log_[b];
    if (e >= q_ - 1) e -= q_ - 1;
    return exp_[e];
  }
  felem inv(felem a) const;
  felem pow(felem a, std::uint64_t e) const;
  felem half(felem a) const { return mul(a, inv_two_); }

  // tr: F_q -> F_p, returned as an integer in [0, p).
  std::uint32_t trace(felem a) const { return trace_[a]; }
  // Quadratic character: +1 nonzero square, -1 non-square, 0 at zero.
  int quad_char(felem a) const { return chi_[a]; }
  // Some x with x*x = a when quad_char(a) >= 0; callers must not rely on the
  // sign of the root. Table-backed, built by exhaustive squaring.
  std::optional<felem> sqrt_of(felem a) const;

  std::vector<std::uint32_t> coeffs_of(felem a) const;
  felem from_coeffs(std::span<const std::uint32_t> coeffs) const;

  // Textual element format "c0,c1,...,c_{m-1}".
  std::string format(felem a) const;
  felem parse_element(std::string_view text) const;

  // All q elements in canonical (index) order.
  std::vector<felem> enumerate() const;

 private:
  FieldCtx() = default;

  felem mul_poly(felem a, felem b) const;  // bootstrap multiply, O(m^2)
  void build_tables();

  std::uint32_t p_ = 0, m_ = 0, q_ = 0;
  felem one_ = 0;
  felem inv_two_ = 0;
  std::vector<std::uint32_t> modulus_;
  std::vector<felem> exp_;            // exp_[i] = g^i, i in [0, q-1)
  std::vector<std::uint32_t> log_;    // inverse of exp_, log_[0] unused
  std::vector<std::uint32_t> trace_;  // trace_[a] in [0, p)
  std::vector<std::int8_t> chi_;
  std::vector<felem> sqrt_;  // kNoSqrt when no root exists
  static constexpr felem kNoSqrt = 0xffffffffu;
};

using FieldCtxPtr = std::shared_ptr<const FieldCtx>;

// Value-type element carrying its context; convenience layer over the index
// API for code where clarity beats raw speed.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(felem v, FieldCtxPtr ctx) : v_(v), ctx_(std::move(ctx)) {}

  felem value() const { return v_; }
  const FieldCtxPtr& ctx() const { return ctx_; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator-() const { return {ctx_->neg(v_), ctx_}; }
  FieldElement inverse() const { return {ctx_->inv(v_), ctx_}; }

  std::uint32_t trace() const { return ctx_->trace(v_); }
  int chi() const { return ctx_->quad_char(v_); }
  std::optional<FieldElement> sqrt() const;

  bool operator==(const FieldElement& o) const {
    return v_ == o.v_ && ctx_->same_field(*o.ctx_);
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  std::string str() const { return ctx_->format(v_); }

 private:
  felem v_ = 0;
  FieldCtxPtr ctx_;
};

namespace detail {
bool is_prime(std::uint64_t n);
// Irreducibility of a monic polynomial over F_p by trial division.
bool is_irreducible_mod_p(std::span<const std::uint32_t> poly, std::uint32_t p);
}  // namespace detail

}  // namespace hsl
