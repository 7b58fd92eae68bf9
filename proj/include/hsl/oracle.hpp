#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsl/geometry.hpp"
#include "hsl/rng.hpp"

namespace hsl {

// Format-preserving permutation of [0, n): a small Feistel network with
// cycle walking. Deterministic in (key, tweak); not cryptographic, the
// black boxes only need bijectivity.
class Prp {
 public:
  Prp(std::uint64_t key, std::uint64_t tweak, std::uint64_t n);

  std::uint64_t domain() const { return n_; }
  std::uint64_t apply(std::uint64_t x) const;
  std::uint64_t invert(std::uint64_t y) const;

 private:
  std::uint64_t feistel(std::uint64_t x, bool forward) const;

  std::uint64_t key_ = 0;
  std::uint64_t n_ = 1;
  std::uint32_t half_bits_ = 1;
};

// Append-only log of oracle calls for one adversary session.
class Transcript {
 public:
  struct Entry {
    std::string op, input, output;
  };

  void record(std::string op, std::string input, std::string output) {
    counters_[op]++;
    entries_.push_back({std::move(op), std::move(input), std::move(output)});
  }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::map<std::string, std::uint64_t>& counters() const { return counters_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::uint64_t> counters_;
};

// Black box hiding the shifted subsets S + t, t in T. Query tokens are plain
// indices into [0,|S|) and [0,|T|); the meaning of a token is hidden by the
// seeded bijections tau (on shifts) and sigma_t (on subset points), and shifts
// are named externally through the injection f into Y = [0, 2 q^d).
class ShiftedSubsetInstance {
 public:
  ShiftedSubsetInstance(Grid grid, std::vector<PointIndex> subset,
                        std::vector<PointIndex> shifts, std::uint64_t seed,
                        bool identity_obfuscation = false);

  const Grid& grid() const { return grid_; }
  std::uint64_t subset_size() const { return subset_.size(); }
  std::uint64_t shift_count() const { return shifts_.size(); }
  std::uint64_t y_space() const { return y_space_; }

  // pi(s,t) = tau(t) + sigma_t(s); nullopt on out-of-range tokens.
  std::optional<PointIndex> pi(std::uint64_t s_tok, std::uint64_t t_tok) const;
  // f(t), the public name of the shift; injective.
  std::optional<std::uint64_t> f(std::uint64_t t_tok) const;
  // g(x, y) = (s, t) when pi(s,t) = x and f(t) = y, else nullopt.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> g(PointIndex x,
                                                           std::uint64_t y) const;

  // Computational-basis measurement of the shifted-subset state: t uniform
  // on T, then x uniform on S + t.
  PointIndex sample_state(Rng& rng) const;
  // Exact measurement distribution over F_q^d, for goodness-of-fit tests.
  std::vector<double> exact_mixture() const;

 private:
  Prp sigma_perm(std::uint64_t t_tok) const;

  Grid grid_;
  std::vector<PointIndex> subset_;   // sorted
  std::vector<PointIndex> shifts_;   // sorted
  std::uint64_t seed_;
  std::uint64_t y_space_;
  bool identity_;
};

// The two-sided black box of the hidden radius problem. sigma tokens encrust
// points of S_r in a fixed public token space sized for the largest sphere,
// so the token space itself leaks nothing about r; tokens outside the sphere
// decode to nothing and the state preparation re-samples that branch.
class HiddenRadiusOracle {
 public:
  HiddenRadiusOracle(Grid grid, felem radius, std::uint64_t seed);

  const Grid& grid() const { return grid_; }
  std::uint64_t sigma_token_space() const { return sigma_space_; }
  std::uint64_t t_token_space() const { return t_space_; }

  // f_1(x, sigma) -> encrypted t = x - s; f_{-1}(x, enc t) -> sigma.
  std::optional<std::uint64_t> f1(PointIndex x, std::uint64_t sigma) const;
  std::optional<std::uint64_t> f_minus1(PointIndex x, std::uint64_t enc_t) const;

  // Token plumbing, exposed for tests and the session harness.
  std::optional<PointIndex> decode_s(std::uint64_t sigma) const;
  std::optional<PointIndex> decode_t(std::uint64_t enc_t) const;
  std::uint64_t encode_s(PointIndex s) const;  // s must lie on the sphere
  std::uint64_t encode_t(PointIndex t) const;

  // Measurement of rho_r: t uniform, s uniform on S_r (invalid-token branch
  // re-sampled), returning x = t + s.
  PointIndex sample_state(Rng& rng) const;

 private:
  Grid grid_;
  felem radius_;
  std::vector<PointIndex> sphere_;  // sorted
  std::uint64_t sigma_space_, t_space_;
  Prp s_perm_, t_perm_;
};

// Newline-delimited JSON adversary session. Reads one query object per line
// ({"op": "pi"|"f"|"g"|"f1"|"fm1"|"sample", ...}), writes one response per
// line, and a final counters object at end of input.
void run_oracle_session(const ShiftedSubsetInstance& instance,
                        const HiddenRadiusOracle* hrp, Rng& rng,
                        std::istream& in, std::ostream& out);

}  // namespace hsl
