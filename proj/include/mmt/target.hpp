#pragma once

#include <span>
#include <vector>

#include "mmt/field.hpp"

namespace mmt {

/// Embedded target manifold N in Euclidean d-space with nearest-point
/// projection and tangent projection.
class TargetManifold {
 public:
  enum class Kind { Sphere, FlatTorusProduct, Ellipsoid };

  static TargetManifold sphere(std::size_t ambient_dim, double radius = 1.0);
  /// Product of circles S^1(r_0) x S^1(r_1) x ... in R^{2k}.
  static TargetManifold flat_torus_product(std::vector<double> radii);
  static TargetManifold ellipsoid(std::vector<double> semi_axes);

  std::size_t ambient_dim() const { return dim_; }
  Kind kind() const { return kind_; }

  /// Nearest point on N; throws std::domain_error when the input leaves the
  /// tubular neighborhood where the projection is well defined.
  void project(std::span<const double> x, std::span<double> out) const;
  std::vector<double> project(std::span<const double> x) const;

  /// Orthogonal projection of v onto the tangent space at p (p on N), in place.
  void tangent_project(std::span<const double> p, std::span<double> v) const;

  /// Scale of the target (sphere radius, min circle radius, min semi-axis);
  /// used for tube checks and test-function placement.
  double scale() const { return scale_; }

 private:
  Kind kind_;
  std::size_t dim_;
  std::vector<double> params_;
  double scale_;
};

}  // namespace mmt
