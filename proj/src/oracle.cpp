#include "hsl/oracle.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hsl/errors.hpp"

namespace hsl {

using nlohmann::json;

Prp::Prp(std::uint64_t key, std::uint64_t tweak, std::uint64_t n)
    : key_(mix64(key ^ mix64(tweak))), n_(n) {
  if (n == 0) throw ValidationError("permutation over an empty domain");
  std::uint32_t bits = 1;
  while ((1ull << bits) < n) ++bits;
  half_bits_ = (bits + 1) / 2;
}

std::uint64_t Prp::feistel(std::uint64_t x, bool forward) const {
  const std::uint64_t mask = (1ull << half_bits_) - 1;
  std::uint64_t left = x >> half_bits_, right = x & mask;
  constexpr int kRounds = 4;
  auto round = [&](std::uint64_t v, int r) {
    return mix64(key_ ^ (v * 0x9e3779b97f4a7c15ULL) ^ (static_cast<std::uint64_t>(r) << 56)) & mask;
  };
  if (forward) {
    for (int r = 0; r < kRounds; ++r) {
      std::uint64_t nl = right;
      right = left ^ round(right, r);
      left = nl;
    }
  } else {
    for (int r = kRounds - 1; r >= 0; --r) {
      std::uint64_t nr = left;
      left = right ^ round(left, r);
      right = nr;
    }
  }
  return (left << half_bits_) | right;
}

std::uint64_t Prp::apply(std::uint64_t x) const {
  if (n_ == 1) return 0;
  std::uint64_t v = x;
  do {
    v = feistel(v, true);
  } while (v >= n_);
  return v;
}

std::uint64_t Prp::invert(std::uint64_t y) const {
  if (n_ == 1) return 0;
  std::uint64_t v = y;
  do {
    v = feistel(v, false);
  } while (v >= n_);
  return v;
}

namespace {
std::uint64_t rank_of(const std::vector<PointIndex>& sorted, PointIndex x,
                      bool* found) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  *found = (it != sorted.end() && *it == x);
  return static_cast<std::uint64_t>(it - sorted.begin());
}
}  // namespace

ShiftedSubsetInstance::ShiftedSubsetInstance(Grid grid, std::vector<PointIndex> subset,
                                             std::vector<PointIndex> shifts,
                                             std::uint64_t seed, bool identity_obfuscation)
    : grid_(std::move(grid)),
      subset_(std::move(subset)),
      shifts_(std::move(shifts)),
      seed_(seed),
      y_space_(2 * grid_.size()),
      identity_(identity_obfuscation) {
  if (subset_.empty() || shifts_.empty())
    throw ValidationError("shifted subset instance needs nonempty S and T");
  std::sort(subset_.begin(), subset_.end());
  std::sort(shifts_.begin(), shifts_.end());
}

Prp ShiftedSubsetInstance::sigma_perm(std::uint64_t t_tok) const {
  return Prp(seed_, 0x73696700u ^ mix64(t_tok + 1), subset_.size());
}

std::optional<PointIndex> ShiftedSubsetInstance::pi(std::uint64_t s_tok,
                                                    std::uint64_t t_tok) const {
  if (s_tok >= subset_.size() || t_tok >= shifts_.size()) return std::nullopt;
  if (identity_) return grid_.add(shifts_[t_tok], subset_[s_tok]);
  Prp tau(seed_, 0x74617500u, shifts_.size());
  PointIndex shift = shifts_[tau.apply(t_tok)];
  PointIndex pt = subset_[sigma_perm(t_tok).apply(s_tok)];
  return grid_.add(shift, pt);
}

std::optional<std::uint64_t> ShiftedSubsetInstance::f(std::uint64_t t_tok) const {
  if (t_tok >= shifts_.size()) return std::nullopt;
  Prp fy(seed_, 0x66790000u, y_space_);
  return fy.apply(t_tok);
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> ShiftedSubsetInstance::g(
    PointIndex x, std::uint64_t y) const {
  if (x >= grid_.size() || y >= y_space_) return std::nullopt;
  Prp fy(seed_, 0x66790000u, y_space_);
  std::uint64_t t_tok = fy.invert(y);
  if (t_tok >= shifts_.size()) return std::nullopt;  // y not in image(f)
  PointIndex shift =
      identity_ ? shifts_[t_tok]
                : shifts_[Prp(seed_, 0x74617500u, shifts_.size()).apply(t_tok)];
  PointIndex u = grid_.sub(x, shift);
  bool found = false;
  std::uint64_t urank = rank_of(subset_, u, &found);
  if (!found) return std::nullopt;  // x not on S + tau(t)
  std::uint64_t s_tok = identity_ ? urank : sigma_perm(t_tok).invert(urank);
  return std::make_pair(s_tok, t_tok);
}

PointIndex ShiftedSubsetInstance::sample_state(Rng& rng) const {
  PointIndex t = shifts_[rng.below(shifts_.size())];
  PointIndex s = subset_[rng.below(subset_.size())];
  return grid_.add(t, s);
}

std::vector<double> ShiftedSubsetInstance::exact_mixture() const {
  std::vector<double> prob(grid_.size(), 0.0);
  const double w = 1.0 / (static_cast<double>(shifts_.size()) * subset_.size());
  for (PointIndex t : shifts_)
    for (PointIndex s : subset_) prob[grid_.add(t, s)] += w;
  return prob;
}

HiddenRadiusOracle::HiddenRadiusOracle(Grid grid, felem radius, std::uint64_t seed)
    : grid_(std::move(grid)),
      radius_(radius),
      sphere_(sphere_points(grid_, radius)),
      sigma_space_(0),
      t_space_(2 * grid_.size()),
      s_perm_(seed, 0x73696770u, 1),
      t_perm_(seed, 0x74706570u, 1) {
  // Token space sized for the largest sphere of this (q, d): public data.
  std::uint64_t max_sphere = 0;
  for (felem r = 0; r < grid_.ctx()->q(); ++r)
    max_sphere = std::max(max_sphere, sphere_size_formula(*grid_.ctx(), r, grid_.dim()));
  sigma_space_ = max_sphere;
  s_perm_ = Prp(seed, 0x73696770u, sigma_space_);
  t_perm_ = Prp(seed, 0x74706570u, t_space_);
}

std::optional<PointIndex> HiddenRadiusOracle::decode_s(std::uint64_t sigma) const {
  if (sigma >= sigma_space_) return std::nullopt;
  std::uint64_t rank = s_perm_.invert(sigma);
  if (rank >= sphere_.size()) return std::nullopt;
  return sphere_[rank];
}

std::optional<PointIndex> HiddenRadiusOracle::decode_t(std::uint64_t enc_t) const {
  if (enc_t >= t_space_) return std::nullopt;
  std::uint64_t idx = t_perm_.invert(enc_t);
  if (idx >= grid_.size()) return std::nullopt;
  return idx;
}

std::uint64_t HiddenRadiusOracle::encode_s(PointIndex s) const {
  bool found = false;
  std::uint64_t rank = rank_of(sphere_, s, &found);
  if (!found) throw ValidationError("point is not on the hidden sphere");
  return s_perm_.apply(rank);
}

std::uint64_t HiddenRadiusOracle::encode_t(PointIndex t) const {
  return t_perm_.apply(t);
}

std::optional<std::uint64_t> HiddenRadiusOracle::f1(PointIndex x,
                                                    std::uint64_t sigma) const {
  if (x >= grid_.size()) return std::nullopt;
  auto s = decode_s(sigma);
  if (!s) return std::nullopt;
  return encode_t(grid_.sub(x, *s));
}

std::optional<std::uint64_t> HiddenRadiusOracle::f_minus1(PointIndex x,
                                                          std::uint64_t enc_t) const {
  if (x >= grid_.size()) return std::nullopt;
  auto t = decode_t(enc_t);
  if (!t) return std::nullopt;
  PointIndex s = grid_.sub(x, *t);
  if (grid_.norm(s) != radius_) return std::nullopt;  // x not on S_r + t
  return encode_s(s);
}

PointIndex HiddenRadiusOracle::sample_state(Rng& rng) const {
  // Invalid sigma tokens (the slack between |S_r| and the public token
  // space) are the empty-set branch; re-sample them.
  std::uint64_t rank;
  do {
    rank = s_perm_.invert(rng.below(sigma_space_));
  } while (rank >= sphere_.size());
  PointIndex t = rng.below(grid_.size());
  return grid_.add(t, sphere_[rank]);
}

void run_oracle_session(const ShiftedSubsetInstance& instance,
                        const HiddenRadiusOracle* hrp, Rng& rng,
                        std::istream& in, std::ostream& out) {
  Transcript transcript;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json resp;
    std::string op = "?";
    try {
      json q = json::parse(line);
      op = q.value("op", "?");
      if (op == "pi") {
        auto x = instance.pi(q.at("s").get<std::uint64_t>(), q.at("t").get<std::uint64_t>());
        resp = x ? json{{"ok", true}, {"x", instance.grid().format(*x)}}
                 : json{{"ok", true}, {"empty", true}};
      } else if (op == "f") {
        auto y = instance.f(q.at("t").get<std::uint64_t>());
        resp = y ? json{{"ok", true}, {"y", *y}} : json{{"ok", true}, {"empty", true}};
      } else if (op == "g") {
        PointIndex x = instance.grid().parse_point(q.at("x").get<std::string>());
        auto st = instance.g(x, q.at("y").get<std::uint64_t>());
        resp = st ? json{{"ok", true}, {"s", st->first}, {"t", st->second}}
                  : json{{"ok", true}, {"empty", true}};
      } else if (op == "sample") {
        resp = {{"ok", true}, {"x", instance.grid().format(instance.sample_state(rng))}};
      } else if (op == "f1" && hrp) {
        PointIndex x = hrp->grid().parse_point(q.at("x").get<std::string>());
        auto enc = hrp->f1(x, q.at("sigma").get<std::uint64_t>());
        resp = enc ? json{{"ok", true}, {"t_enc", *enc}} : json{{"ok", true}, {"empty", true}};
      } else if (op == "fm1" && hrp) {
        PointIndex x = hrp->grid().parse_point(q.at("x").get<std::string>());
        auto enc = hrp->f_minus1(x, q.at("t_enc").get<std::uint64_t>());
        resp = enc ? json{{"ok", true}, {"sigma", *enc}} : json{{"ok", true}, {"empty", true}};
      } else if (op == "hrp_sample" && hrp) {
        resp = {{"ok", true}, {"x", hrp->grid().format(hrp->sample_state(rng))}};
      } else {
        resp = {{"ok", false}, {"error", "unknown op '" + op + "'"}};
      }
    } catch (const std::exception& e) {
      resp = {{"ok", false}, {"error", e.what()}};
    }
    transcript.record(op, line, resp.dump());
    out << resp.dump() << "\n";
  }
  json counters = json::object();
  for (const auto& [op, n] : transcript.counters()) counters[op] = n;
  out << json{{"session_end", true}, {"queries", counters}}.dump() << "\n";
}

}  // namespace hsl
