#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hsl/geometry.hpp"
#include "hsl/rng.hpp"

namespace hsl {

// Fourier-sampling distribution Pr(k|r). Pr depends on k only through the
// statistic d(k) (plus the k = 0 atom), so it is stored per d(k)-class with
// the class sizes carried alongside; exactly faithful and O(q) rather than
// O(q^d) storage.
struct RadiusDistribution {
  FieldCtxPtr ctx;
  int dim = 0;
  felem r = 0;
  double atom0 = 0.0;                     // Pr(k = 0)
  std::vector<double> class_prob;         // per-k probability at d(k) = w
  std::vector<std::uint64_t> class_size;  // #{k != 0 : d(k) = w}
  double class_spread = 0.0;              // brute route: max in-class deviation

  double total() const;
};

// Four-case closed form (d odd).
RadiusDistribution radius_distribution(FieldCtxPtr ctx, felem r, int d);
// |sphere Fourier|^2 / (q^d |S_r|) by direct summation; any d. Also records
// the largest deviation of Pr(k|r) within a d(k)-class, which the closed
// form says is zero.
RadiusDistribution radius_distribution_brute(FieldCtxPtr ctx, felem r, int d,
                                             Exec exec = Exec::parallel);

// max_w |closed - brute| plus the atom difference, for the acceptance check.
double radius_distribution_max_error(const RadiusDistribution& closed_form,
                                     const RadiusDistribution& brute);

// Draws concrete k points: a d(k)-class (or the atom) by its total mass,
// then a uniform member of the class.
class RadiusSampler {
 public:
  RadiusSampler(Grid grid, RadiusDistribution dist);

  const RadiusDistribution& dist() const { return dist_; }
  const Grid& grid() const { return grid_; }
  PointIndex draw(Rng& rng) const;

 private:
  Grid grid_;
  RadiusDistribution dist_;
  std::vector<double> cdf_;                        // atom, then classes
  std::vector<std::vector<PointIndex>> members_;   // k != 0 per class
};

std::vector<PointIndex> sample_k(const RadiusSampler& sampler, Rng& rng, std::size_t n);

enum class ChiVerdict { chi_plus, chi_minus, zero_radius, inconclusive };

struct ClassifierReport {
  ChiVerdict verdict = ChiVerdict::inconclusive;
  int kept = 0;
  int discarded = 0;
};

// The chi(r) decision procedure: sample k `reps` times, discard d(k) = 0,
// output r = 0 when both signs of chi(d(k)) appear, else the common sign.
ClassifierReport classify_chi_r(const Grid& grid,
                                const std::function<PointIndex(Rng&)>& draw_k,
                                Rng& rng, int reps);

struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};
// 95% score interval.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct ClassifierSuccess {
  felem r;
  std::uint64_t trials = 0, successes = 0;
  double rate = 0.0;
  WilsonInterval ci;
};

// Monte Carlo success rate of the classifier for every radius.
std::vector<ClassifierSuccess> classifier_success_rates(FieldCtxPtr ctx, int d,
                                                        int reps, int trials,
                                                        std::uint64_t seed,
                                                        Exec exec = Exec::parallel);
std::vector<ClassifierSuccess> classifier_success_rates_ref(FieldCtxPtr ctx, int d,
                                                            int reps, int trials,
                                                            std::uint64_t seed);

// Exact total variation between Pr(.|r) and Pr(.|r'), full enumeration over k.
double total_variation(const RadiusDistribution& a, const RadiusDistribution& b);

struct TvTable {
  std::uint32_t q = 0;
  std::vector<double> tv;  // q x q row-major
  double min_distinct = 1.0;

  double at(felem r, felem r2) const { return tv[static_cast<std::size_t>(r) * q + r2]; }
};

// Full pairwise table from the closed-form distributions (d odd).
TvTable min_pairwise_tv(FieldCtxPtr ctx, int d, Exec exec = Exec::parallel);
TvTable min_pairwise_tv_ref(FieldCtxPtr ctx, int d);

// Final value of the rescaled-cosine lower-bound chain:
// min over r != +-1 of (1/q) sum_s [cos^2(4 pi tr s/p) - cos(4 pi tr s/p)
// cos(4 pi tr rs/p)]; equals 1/2 whenever q > 3.
double rescaled_cosine_chain_min(const FieldCtx& ctx);

struct EvenDimEvidence {
  TvTable table;                 // from brute-force distributions
  double min_distinct_nonzero = 0.0;
  std::vector<double> totals;    // per-r distribution sums (should be 1)
};

// Brute-force distinguishability evidence for even d.
EvenDimEvidence kloosterman_distribution_evidence(FieldCtxPtr ctx, int d_even,
                                                  Exec exec = Exec::parallel);

}  // namespace hsl
