#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsl/geometry.hpp"
#include "hsl/hidden_radius.hpp"
#include "hsl/rng.hpp"

namespace hsl {

// Exponent tuples of the d-variate monomials of total degree <= t, ordered by
// total degree descending then lexicographic descending; the coefficient
// vector of a polynomial follows this order.
std::vector<std::vector<int>> monomials_upto(int d, int t);

// Multivariate polynomial over F_q, dense on the monomial basis above.
struct MultiPoly {
  FieldCtxPtr ctx;
  int nvars = 0;
  int max_deg = 0;                 // degree bound of the basis
  std::vector<felem> coeffs;       // aligned with monomials_upto(nvars, max_deg)

  static MultiPoly zero(FieldCtxPtr ctx, int nvars, int max_deg);
  int total_degree() const;        // -1 for the zero polynomial
  felem eval(std::span<const felem> point) const;
  MultiPoly minus_constant(felem y) const;  // h - y
  MultiPoly scaled(felem c) const;          // c * h
  std::string str() const;

  bool operator==(const MultiPoly& o) const = default;
};

// Uniform coefficients with a nonzero top-degree block (total degree exactly
// `deg`).
MultiPoly random_poly(FieldCtxPtr ctx, int nvars, int deg, Rng& rng);

// |L_y| for y in F_q (empty level sets allowed; they carry no weight).
struct LevelSetProfile {
  std::vector<std::uint64_t> sizes;
  std::uint64_t total = 0;
};

// N_{y y'} = |L_y(h) ∩ L_{y'}(h')|, q x q row-major.
struct IntersectionProfile {
  std::uint32_t q = 0;
  std::vector<std::uint64_t> n;
  std::uint64_t at(felem y, felem y2) const { return n[static_cast<std::size_t>(y) * q + y2]; }
};

LevelSetProfile level_sets(const MultiPoly& h, int d);
IntersectionProfile intersections(const MultiPoly& h, const MultiPoly& h2, int d);

// Exact fidelity F(rho_h, rho_h') = ||N||_* / q^d: the states are diagonal in
// orthonormal level-set superpositions, so sqrt(rho) sqrt(rho') has matrix
// N/|X| there and the trace norm is the nuclear norm of N.
double fidelity(const MultiPoly& h, const MultiPoly& h2, int d);

// Independent oracle: dense rho matrices in the computational basis,
// sym_sqrt, and singular values of the product. tensor_power folds in
// F(rho^{(x)l}) for small l.
double fidelity_dense(const MultiPoly& h, const MultiPoly& h2, int d,
                      int tensor_power = 1);

struct BoundCheck {
  double bound = 0.0;
  bool hypotheses_ok = false;
};

// F^2 <= (alpha^2 + beta delta^2) |Y|^3 / |X|^2, hypotheses checked exactly
// against the profiles.
BoundCheck bound_comb1(const IntersectionProfile& n, const LevelSetProfile& h_sizes,
                       int d, double alpha, double beta, double delta);
// F^2 <= alpha |Y|^2 / (gamma |X|) + beta delta |Y| / |X| with the per-column
// tail condition.
BoundCheck bound_comb2(const IntersectionProfile& n, const LevelSetProfile& h_sizes,
                       int d, double alpha, double beta, double gamma, double delta);

struct AutoBounds {
  double bound1 = 0.0, bound2 = 0.0;
  double alpha1 = 0, beta1 = 0, alpha2 = 0, beta2 = 0;
  double gamma = 0, delta = 0;
  bool comb2_applicable = false;  // gamma > 0
};

// Tightest bounds with parameters extracted from the exact profiles (alpha
// scanned over the distinct intersection counts, beta measured, gamma/delta
// exact).
AutoBounds auto_bounds(const IntersectionProfile& n, const LevelSetProfile& h_sizes, int d);

struct SzParams {
  double alpha = 0.0;   // q^{d-2} deg h deg h' min(deg h, deg h')
  double delta = 0.0;   // q^{d-1} deg h
  std::uint32_t q = 0;
  std::vector<std::uint8_t> common_factor;  // (y,y') flags, row-major
  double flagged_fraction = 0.0;

  bool flagged(felem y, felem y2) const {
    return common_factor[static_cast<std::size_t>(y) * q + y2] != 0;
  }
};

// The Schwartz-Zippel-style parameters of the corollaries plus exact
// per-(y,y') common-factor certificates (content + resultant route; d = 2).
SzParams common_factor_and_sz_params(const MultiPoly& h, const MultiPoly& h2);

// True iff h - y has no nontrivial factorization over any F_{q^k}, k <= deg.
// Degree <= 3 bivariate only: every nontrivial factorization then contains a
// linear factor over F_{q^k}, which is searched exhaustively.
bool absolute_irreducibility(const MultiPoly& h, felem y);

struct CensusReport {
  std::uint64_t classes = 0;    // projectivized polynomials of degree exactly t
  std::uint64_t tested = 0;
  std::uint64_t failing = 0;    // h - y not absolutely irreducible (random y)
  double fraction = 0.0;
  WilsonInterval ci;
  bool sampled = false;
};

// Fraction of degree-t polynomials (projectivized, d = 2) whose shift by a
// random y fails absolute irreducibility. Exact when the class count fits
// under sample_limit, else a seeded sample.
CensusReport typicality_census(FieldCtxPtr ctx, int t, std::uint64_t sample_limit,
                               std::uint64_t seed, Exec exec = Exec::parallel);
CensusReport typicality_census_ref(FieldCtxPtr ctx, int t, std::uint64_t sample_limit,
                                   std::uint64_t seed);

struct CopiesReport {
  int copies = 1;
  double single_shot_success = 0.0;  // 1 - N sqrt(F_max^copies)
};

// ceil(2 (ln N - ln eps) / ln(1/F_max)), at least 1.
CopiesReport copies_needed(double f_max, double n_states, double eps);

}  // namespace hsl
