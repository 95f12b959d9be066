#pragma once

#include <span>

#include "mmt/balls.hpp"
#include "mmt/field.hpp"
#include "mmt/spectral.hpp"
#include "mmt/target.hpp"

namespace mmt {

/// Sampled map from a marked torus (grid.lattice carries the mark) into a
/// target manifold embedded in R^d.  Disk-domain maps are represented as
/// torus maps whose nodes outside the disk are frozen.
struct MapSlice {
  Grid grid;
  std::size_t dim = 0;
  std::vector<double> values;         // node-major, dim per node
  std::vector<std::uint8_t> frozen;   // empty means no frozen nodes

  MapSlice() = default;
  MapSlice(const Grid& g, std::size_t d) : grid(g), dim(d), values(g.size() * d, 0.0) {}

  double* node(std::size_t i) { return values.data() + i * dim; }
  const double* node(std::size_t i) const { return values.data() + i * dim; }
  double* node(std::size_t r, std::size_t c) { return node(grid.index(r, c)); }
  const double* node(std::size_t r, std::size_t c) const { return node(grid.index(r, c)); }
  bool is_frozen(std::size_t i) const { return !frozen.empty() && frozen[i]; }

  static MapSlice constant(const Grid& g, std::span<const double> point);

  void project_all(const TargetManifold& n);
  double max_off_manifold(const TargetManifold& n) const;
};

/// Pointwise derivative pair (u_u, u_v) w.r.t. the conformal coordinate of
/// the mark: d/du = d/da, d/dv = (d/db - tau1 d/da)/tau2, with fourth-order
/// central differences on the periodic grid.
struct SliceGradient {
  std::vector<double> du;  // node-major, dim per node
  std::vector<double> dv;
};
SliceGradient slice_gradient(const MapSlice& u);

struct RegionEnergy {
  double value = 0.0;
  bool empty_region = false;
};

/// Dirichlet energy 1/2 sum (|u_u|^2 + |u_v|^2) * cell_area, restricted to a
/// node mask when one is given.
RegionEnergy region_energy(const MapSlice& u, const std::vector<std::uint8_t>* region);
double energy(const MapSlice& u);
double energy(const MapSlice& u, const BallCollection& region);

/// Mapping area: sum sqrt(|u_u|^2 |u_v|^2 - (u_u . u_v)^2) * cell_area.
double area(const MapSlice& u);
double area(const MapSlice& u, const std::vector<std::uint8_t>* region);

/// Quadratic (unconstrained) energy of the difference u - v; used by the
/// energy-gap and property-(*) checks.
double difference_energy(const MapSlice& u, const MapSlice& v,
                         const std::vector<std::uint8_t>* region = nullptr);

/// Pointwise |grad u|^2 (no 1/2, no cell weight); for circle integrals and
/// concentration scans.
RealField dirichlet_density(const MapSlice& u);

/// Nodewise maximum distance between two slices with the same grid.
double sup_distance(const MapSlice& u, const MapSlice& v);
/// L2 norm of the gradient difference.
double gradient_l2_distance(const MapSlice& u, const MapSlice& v);

/// Spectral (trigonometric) evaluation of each component at arbitrary
/// parameter points; exact on band-limited slices.
class SliceInterpolant {
 public:
  explicit SliceInterpolant(const MapSlice& u);
  void evaluate(double a, double b, std::span<double> out) const;
  std::size_t dim() const { return spectra_.size(); }

 private:
  std::vector<SpectralField> spectra_;
};

}  // namespace mmt
