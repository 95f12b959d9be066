#pragma once

#include "mmt/harmonic.hpp"
#include "mmt/map_slice.hpp"
#include "mmt/moduli.hpp"

namespace mmt {

/// Resamples a slice through the lattice identification of a PSL(2, Z)
/// element: the new mark is p.tau and the samples are an exact index
/// permutation of the old ones (square grids only), so energy and area are
/// unchanged up to summation order.
MapSlice resample_mark_equivalent(const MapSlice& u, const ModuliPoint& p);

/// Energy E(u, B(x, r)) for every node x at once, by FFT convolution of the
/// energy density with the disk indicator.
RealField ball_energy_field(const MapSlice& u, double radius);

struct ConcentrationField {
  RealField radii;  // largest dyadic radius with ball energy <= eps1, per node
  double cap = 0.0;
};

/// Per-node energy concentration radii r(x) = sup { r : E(u, B(x,r)) <= eps1 },
/// searched over dyadic radii and capped at the torus diameter.
ConcentrationField concentration_radii(const MapSlice& u, double eps1, int levels = 12);

struct BubbleInfo {
  double ca = 0.0, cb = 0.0;          // concentration center
  std::vector<double> scales;         // r_n(x_i) across the sequence
  double energy = 0.0;                // energy of the bubble region
  std::vector<BubbleInfo> children;   // recursive bubbles found after rescaling
};

struct BubbleTree {
  bool has_body = true;
  double body_energy = 0.0;
  std::vector<BubbleInfo> bubbles;
  double residual_neck_energy = 0.0;
  double total_energy = 0.0;
  /// |body + sum(bubbles) + neck - total| / max(total, eps): exact node
  /// partition makes this roundoff-small.
  double accounting_residual = 0.0;
};

struct BubbleOptions {
  int coarse_stride = 2;      // trend detection on every stride-th node
  double shrink_factor = 0.25;  // r_last < shrink_factor * r_first marks a trend
  int max_depth = 0;          // 0 = derive from total energy / eps1
  std::size_t window_grid = 64;
  double window_halfwidth = 4.0;  // rescaled window covers |y| <= halfwidth
};

/// Bubble detection across a sequence of slices: nodes whose concentration
/// radii shrink monotonically to below shrink_factor of their first value are
/// clustered into centers; the last slice is rescaled about each center and
/// the detection recurses on the window.  Region partition of the last slice
/// gives the energy accounting.
BubbleTree extract_bubbles(const std::vector<MapSlice>& sequence, double eps1,
                           const BubbleOptions& opt = {});

/// Annulus around (center_a, center_b) with radii [e^{-t_max}, e^{-t_min}],
/// viewed as the cylinder C_{t_min, t_max} with unit theta period.
struct CylinderRegion {
  double center_a = 0.5;
  double center_b = 0.5;
  double t_min = 0.0;
  double t_max = 1.0;
  std::size_t n_theta = 128;
  std::size_t n_t = 0;  // 0 = derived from the chart aspect
};

struct NeckReport {
  double e_total = 0.0;   // cylinder-chart energy 1/2 int |u_t|^2 + |u_theta|^2
  double e_theta = 0.0;   // 1/2 int |u_theta|^2
  double ratio = 0.0;     // e_theta / e_total
  double defect_lower_bound = 0.0;  // (1/8) int (|u_t|^2 - |u_theta|^2)
};

/// Log-polar resampling of the slice on the cylinder chart (spectral sampling,
/// chart Jacobian handled analytically, so the energy is chart-invariant).
NeckReport neck_report(const MapSlice& u, const CylinderRegion& region);

struct AlmostHarmonicResult {
  bool ok = true;
  double worst_ratio = 0.0;
  Ball worst_ball;
  std::size_t samples_used = 0;
};

/// Samples disjoint ball collections inside the annulus, replaces on B/8 and
/// checks int_{B/8} |grad u - grad v|^2 <= nu int_C |grad u|^2 for all samples.
AlmostHarmonicResult nu_almost_harmonic_check(const MapSlice& u, const TargetManifold& n,
                                              const CylinderRegion& region, double nu,
                                              int samples, std::uint64_t seed = 2024,
                                              const ReplaceOptions& opt = {});

/// Area-measure comparison over a fixed family of Gaussian test functions on
/// ambient space, normalized by the total areas; a simplified stand-in for
/// the varifold distance.
double varifold_distance_simplified(const MapSlice& u, const MapSlice& v, int test_count);

}  // namespace mmt
