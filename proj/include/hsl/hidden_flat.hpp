#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsl/geometry.hpp"
#include "hsl/linalg.hpp"
#include "hsl/rng.hpp"

namespace hsl {

// Spectral data of the unit-sphere adjacency walk on F_q^d. Eigenvectors are
// the Fourier modes; the eigenvalue at k depends only on d(k), with the k=0
// eigenvalue (|S_1|) replaced by 0 in the modified operator.
struct WalkSpec {
  FieldCtxPtr ctx;
  int dim = 0;
  double lambda0 = 0.0;                // |S_1|, the removed eigenvalue
  std::vector<double> eigen_by_class;  // lambda at d(k) = w, k != 0
  double max_imag = 0.0;               // residual imaginary part, diagnostic
};

WalkSpec build_walk(FieldCtxPtr ctx, int d);

// t = 1/sqrt(q^{d-1} ln q).
double default_walk_time(const FieldCtx& ctx, int d);

// exp(-i A t) on the modified operator, applied as Fourier, phase, inverse
// Fourier; exactly unitary up to roundoff.
StateVector walk_evolve(const StateVector& v, const WalkSpec& spec, double t);

// Dense matrix route for the same evolution, the test oracle: builds the
// adjacency matrix explicitly, removes the uniform-mode eigenvalue, and
// exponentiates through a full eigendecomposition.
StateVector walk_evolve_dense(const StateVector& v, const WalkSpec& spec, double t);

// |S_r + center> as a state vector; the one-argument form is the unit sphere.
StateVector prepare_sphere_state(const Grid& grid, PointIndex center, felem r);
inline StateVector prepare_sphere_state(const Grid& grid, PointIndex center) {
  return prepare_sphere_state(grid, center, grid.ctx()->one());
}

// One mixture component of rho_H: h drawn uniformly from the flat.
StateVector prepare_rho_h_sample(const Flat& flat, Rng& rng);

// Output distribution of measuring exp(-i A t)|S_1 + 0>; distributions for
// other components are translates of this one.
std::vector<double> walked_output_distribution(const WalkSpec& spec, double t);

struct WalkMeasurementStats {
  double on_flat_mass = 0.0;        // exact aggregate probability of hitting H
  double max_off_flat = 0.0;        // exact max single-point probability off H
  std::vector<std::uint64_t> hist;  // empirical counts per point (shots > 0)
};

// Exact statistics of the Lemma-walk measurement plus an empirical histogram.
WalkMeasurementStats measure_walked_state(const Flat& flat, const WalkSpec& spec,
                                          double t, Rng& rng, int shots);

// Sample points from the walked-and-measured mixture over H.
std::vector<PointIndex> sample_walked_points(const Flat& flat, const WalkSpec& spec,
                                             double t, Rng& rng, int shots);

struct ReconstructionResult {
  std::optional<Flat> flat;
  std::uint64_t support = 0;  // samples (with multiplicity) on the flat
};

// Finds a flat of dimension dim_guess containing at least 4(dim_guess+1)
// samples, by spanning subsets of distinct sample points; ties broken by
// support, then canonical form. Failure is a value (empty optional);
// exceeding subset_cap throws ResourceCapError.
ReconstructionResult reconstruct_flat(const Grid& grid,
                                      std::span<const PointIndex> samples,
                                      int dim_guess,
                                      std::uint64_t subset_cap = 10000000);

struct HfcConfig {
  int shots = 200;
  double time = 0.0;  // 0 = default_walk_time
  int max_dim = -1;   // -1 = ambient dimension
  std::uint64_t subset_cap = 10000000;
};

struct HfcReport {
  std::optional<Flat> recovered;
  bool success = false;     // recovered == secret
  bool wrong_flat = false;  // recovered something that is not the secret
  int dim_found = -1;
  int shots = 0;
  std::uint64_t support = 0;
  double accept_threshold = 0.0;
};

// Full pipeline: sample, then reconstruct with dimension escalation. A
// dim-g candidate is accepted when its support reaches both 4(g+1) and half
// the walk lemma's on-flat band (shots/(2 ln q)); smaller flats (heavy single
// points of H, say) fail the mass test and trigger escalation.
HfcReport hfc_end_to_end(const Flat& secret, const WalkSpec& spec,
                         const HfcConfig& cfg, Rng& rng);

}  // namespace hsl
