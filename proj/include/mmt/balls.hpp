#pragma once

#include "mmt/field.hpp"

namespace mmt {

/// Ball on a marked torus: center in unit-square (a, b) coordinates, radius
/// measured in the plane metric of the lattice {1, tau}.
struct Ball {
  double ca = 0.0;
  double cb = 0.0;
  double radius = 0.0;
};

/// Finite collection of balls; disjointness is an invariant of the call
/// sites that build collections (checked via pairwise_disjoint).
struct BallCollection {
  std::vector<Ball> balls;

  bool empty() const { return balls.empty(); }
  /// Same centers, radii scaled by mu.
  BallCollection scaled(double mu) const {
    BallCollection out = *this;
    for (Ball& b : out.balls) b.radius *= mu;
    return out;
  }
};

/// Distance between two points of the torus C/{1, tau}, given in (a, b)
/// coordinates; minimum of |da + db tau| over nearest lattice shifts.
double torus_distance(double a0, double b0, double a1, double b1, complexd tau);

bool pairwise_disjoint(const BallCollection& c, complexd tau);

/// Node mask of the collection: a node belongs iff its torus distance to some
/// center is < radius; ties within 1e-12 are excluded.
std::vector<std::uint8_t> collection_mask(const Grid& g, const BallCollection& c);

std::size_t mask_count(const std::vector<std::uint8_t>& mask);

/// Largest radius for which a ball still embeds in the torus (half the
/// shortest lattice vector).
double injectivity_radius(complexd tau);

}  // namespace mmt
