#pragma once

#include "mmt/metric.hpp"
#include "mmt/spectral.hpp"

namespace mmt {

/// Output of the periodic Beltrami solve.  The forward map
///   w(z) = A (z + g0 zbar + s(z) - s(0)),  s doubly periodic, zero mean,
/// solves w_zbar = mu w_z and maps the square torus carrying the metric onto
/// the flat marked torus {1, tau}.  The affine factor A = 1/(1 + g0) pins the
/// normalization triple: w(0) = 0, the period 1 maps to 1, and the period i
/// maps to tau (so the inverse h sends 0 -> 0, 1 -> 1, tau -> i).
struct UniformizationResult {
  Lattice mark;            // tau = i (1 - g0) / (1 + g0)
  ComplexField w_grid;     // forward map sampled on the source grid
  ComplexField h_grid;     // inverse map on the tau-side grid (filled by invert_map)
  complexd g0_mean{};      // zero mode of mu (1 + h)
  complexd scale_a{};      // affine factor A
  double residual = 0.0;   // ||w_zbar - mu w_z||_2 / ||w_z||_2
  double conformal_defect = 0.0;  // E(h) - Area(h), filled by uniformize
  double cr2_residual = 0.0;      // inverse-equation residual, filled by invert_map
  int iterations = 0;
  double contraction_max = 0.0;   // worst successive-change ratio seen
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double last_change)
      : std::runtime_error(what), last_change(last_change) {}
  double last_change;
};

/// Fixed-point solve of the periodic Beltrami equation w_zbar = mu w_z:
/// iterates h <- beurling(P0[mu (1 + h)]) where h plays the role of s_z and
/// P0 removes the mean.  Contraction rate <= sup|mu| (unit-modulus multiplier
/// composed with multiplication by mu), up to aliasing.
UniformizationResult solve_periodic_beltrami(const BeltramiField& mu,
                                             const SolverOptions& opt = {});

/// Numerical inverse h of the forward map by graph inversion: each forward
/// cell is rasterized onto the tau-side grid with inverse-bilinear local
/// coordinates.  Fills result.h_grid (values in the unit square of T^2_0,
/// stored as x + i y wrapped to [0,1)^2) and reports the finite-difference
/// residual of h_wbar = -mu(h(w)) conj(h_w).
void invert_map(const BeltramiField& mu, UniformizationResult& result);

/// regularize -> metric_to_beltrami -> solve_periodic_beltrami -> invert_map,
/// then the conformal defect E(h) - Area(h) of h: T^2_tau -> T^2_g.
UniformizationResult uniformize(const MetricField& g, double delta, double tol,
                                int max_iter = 10000);

/// Solves both coefficients and measures how far apart the resulting maps
/// are; property tests drive ||mu_a - mu_b||_inf -> 0 through this.
struct ContinuityReport {
  double d_sup_w = 0.0;    // sup distance of forward maps
  double d_sup_h = 0.0;    // sup torus distance of inverse maps
  double d_l2_grad = 0.0;  // L2 distance of inverse-map gradients
};
ContinuityReport continuity_probe(const BeltramiField& mu_a, const BeltramiField& mu_b,
                                  const SolverOptions& opt = {});

/// Energy and area of the sampled inverse map h: T^2_tau -> (T^2_0, g); the
/// defect E - Area vanishes exactly when h is conformal.
struct MapFunctionals {
  double energy = 0.0;
  double area = 0.0;
};
MapFunctionals inverse_map_functionals(const UniformizationResult& r, const MetricField& g);

/// Discrete Jacobian |w_z|^2 - |w_zbar|^2 of the forward map, nodewise minimum.
double min_forward_jacobian(const BeltramiField& mu, const UniformizationResult& r);

}  // namespace mmt
