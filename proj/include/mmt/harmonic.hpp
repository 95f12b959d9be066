#pragma once

#include <array>
#include <optional>

#include "mmt/constants.hpp"
#include "mmt/map_slice.hpp"

namespace mmt {

struct ReplaceResult {
  MapSlice slice;
  bool converged = false;
  int sweeps = 0;
  double max_move = 0.0;
  double el_residual = 0.0;   // max interior |tangential gradient| / diagonal
  double energy_before = 0.0;
  double energy_after = 0.0;
};

struct ReplaceOptions {
  double tol = kDefaultReplaceTol;
  int max_sweeps = kDefaultReplaceMaxSweeps;
  double eps1 = kDefaultEps1;
};

/// dE/du_i (per component) and the diagonal entry of the discrete energy's
/// quadratic form at one node; the local solves and the EL residual are built
/// from exactly these quantities.
struct LocalForm {
  std::vector<double> gradient;
  double diagonal = 0.0;
};
LocalForm energy_local_form(const MapSlice& u, std::size_t node);

/// Energy-minimizing replacement of u inside the ball collection with the
/// boundary (everything outside the balls, plus frozen nodes) held fixed.
/// Projected nonlinear Gauss-Seidel with red-black ordering and a monotone
/// line search, so E never increases and nodes outside the balls are
/// bit-identical.  Requires energy(u, balls) <= eps1.
ReplaceResult harmonic_replace(const MapSlice& u, const TargetManifold& n,
                               const BallCollection& balls, const ReplaceOptions& opt = {});

/// H(u, B1, B2) = H(H(u, B1), B2).
ReplaceResult harmonic_replace_iterated(const MapSlice& u, const TargetManifold& n,
                                        const BallCollection& b1, const BallCollection& b2,
                                        const ReplaceOptions& opt = {});

/// (E(u) - E(v)) - 1/2 E(u - v) over the region; nonnegative up to tolerance
/// when v is the small-energy replacement of u there.
double energy_gap_defect(const MapSlice& u, const MapSlice& v,
                         const std::vector<std::uint8_t>* region = nullptr);

struct ContinuityProbeReport {
  double energy_gap = 0.0;   // |E(w1) - E(w2)| on the ball
  double c0_dist = 0.0;      // ||u1 - u2||_C0
  double grad_dist = 0.0;    // ||grad u1 - grad u2||_L2
  double bound_shape = 0.0;  // c0 * E + grad * sqrt(E), E = E(u1,B) + E(u2,B)
};
ContinuityProbeReport replacement_continuity_probe(const MapSlice& u1, const MapSlice& u2,
                                                   const TargetManifold& n, const Ball& ball,
                                                   const ReplaceOptions& opt = {});

/// Courant-Lebesgue radius selection: the discrete circle integral of
/// |grad u|^2 is minimized over r in [3R/4, R]; the returned r obeys
/// int_{dB_r} |grad u|^2 <= (9/r) int_{B_R} |grad u|^2.
struct CourantLebesgueResult {
  double radius = 0.0;
  double boundary_energy = 0.0;  // circle integral of |grad u|^2
  double ball_energy = 0.0;      // int_{B_R} |grad u|^2 (no 1/2)
};
CourantLebesgueResult courant_lebesgue_radius(const MapSlice& u, const Ball& outer);

/// Collar construction between two boundary loops on dB_R that agree at some
/// node: radial interpolation in ambient space followed by projection, on an
/// annulus of width rho_eff <= rho chosen so the measured energy follows the
/// bound sqrt(I_f + I_g) * sqrt(I_{f-g}) (I_* = loop Dirichlet integrals).
struct CollarResult {
  std::size_t n_r = 0;
  std::size_t n_theta = 0;
  std::vector<double> w;  // ring-major, n_r * n_theta * dim
  double rho_eff = 0.0;
  double energy = 0.0;  // int |grad w|^2 over the collar
  double bound = 0.0;   // sqrt(I_f + I_g) * sqrt(I_{f-g})
};
CollarResult collar_interpolate(std::span<const double> f, std::span<const double> g,
                                std::size_t dim, double R, double rho,
                                const TargetManifold& n, double max_gap2 = 1.0);

/// Dyadic candidate family for the maximal-energy-decrease search: one ball
/// per candidate, centers on a coarse sublattice, radii base / 2^level.
std::vector<BallCollection> dyadic_ball_family(const Grid& g, std::size_t centers_per_axis = 4,
                                               int levels = 3, double base_radius = 0.0);

/// Dyadic lattice family extended with candidates centered on the strongest
/// Dirichlet-density nodes, so localized non-harmonic structure is reachable
/// even on strongly anisotropic marked tori.
std::vector<BallCollection> density_adapted_family(const MapSlice& u,
                                                   std::size_t centers_per_axis = 16,
                                                   int levels = 6,
                                                   std::size_t density_centers = 32);

struct MaxDecreaseResult {
  double e_value = 0.0;
  BallCollection argmax;
  bool family_empty = true;  // no admissible candidate had E(u, B) <= epsilon
};

/// Approximates e_eps(u) = sup over admissible collections of
/// E(u) - E(H(u, B/2)); a lower bound of the true supremum since the family
/// is finite.
MaxDecreaseResult max_energy_decrease(const MapSlice& u, const TargetManifold& n, double epsilon,
                                      const std::vector<BallCollection>& family,
                                      const ReplaceOptions& opt = {});

/// All six energies of the repeated-replacement comparison, with the scaled
/// copies mu B2 for mu in {1/8, 1/4, 1/2}.
struct ComparisonReport {
  double e_u = 0.0;
  double e_h1 = 0.0;      // E[H(u, B1)]
  double e_h12 = 0.0;     // E[H(u, B1, B2)]
  double e_half2 = 0.0;   // E[H(u, B2/2)]
  std::array<double, 3> mu = {0.125, 0.25, 0.5};
  std::array<double, 3> e_2mu2 = {0.0, 0.0, 0.0};    // E[H(u, 2 mu B2)]
  std::array<double, 3> e_h1_mu2 = {0.0, 0.0, 0.0};  // E[H(u, B1, mu B2)]
};
ComparisonReport comparison_probe(const MapSlice& u, const TargetManifold& n,
                                  const BallCollection& b1, const BallCollection& b2,
                                  const ReplaceOptions& opt = {});

}  // namespace mmt
