#pragma once

#include "mmt/field.hpp"

namespace mmt {

/// Symmetric 2x2 metric components sampled on the square torus T^2_0
/// (lattice {1, i}); possibly degenerate before regularization.
struct MetricField {
  RealField g11, g12, g22;
  double delta = 0.0;  // regularization already applied

  MetricField() = default;
  explicit MetricField(const Grid& g) : g11(g, 0.0), g12(g, 0.0), g22(g, 0.0) {
    if (!g.lattice.is_square()) {
      throw std::invalid_argument("MetricField: domain must be the square torus {1, i}");
    }
  }

  const Grid& grid() const { return g11.grid; }
  double det(std::size_t i) const { return g11[i] * g22[i] - g12[i] * g12[i]; }

  static MetricField identity(const Grid& g);
  static MetricField constant(const Grid& g, double a11, double a12, double a22);
};

/// Complex dilatation data of a metric: g = lambda * |dz + mu dzbar|^2 with
/// sup|mu| <= bound_k < 1 on non-degenerate metrics.
struct BeltramiField {
  ComplexField mu;
  RealField lambda;
  double bound_k = 0.0;

  const Grid& grid() const { return mu.grid; }
};

/// g' = g + delta * g0 with g0 the identity metric; det(g') >= delta^2.
MetricField regularize(const MetricField& g, double delta);

/// Nodewise closed form
///   mu     = (g11 - g22 + 2i g12) / (g11 + g22 + 2 sqrt(det g))
///   lambda = (g11 + g22 + 2 sqrt(det g)) / 4.
/// Throws if some node is not positive definite (message carries the node).
BeltramiField metric_to_beltrami(const MetricField& g);

/// Expands lambda * |dz + mu dzbar|^2 back into (g11, g12, g22):
///   g11 = lambda |1 + mu|^2, g12 = 2 lambda Im(mu), g22 = lambda |1 - mu|^2.
MetricField beltrami_to_metric(const BeltramiField& b);

/// Max relative nodewise error of beltrami_to_metric(metric_to_beltrami(g)) vs g.
double reconstruction_error(const MetricField& g, const BeltramiField& b);

}  // namespace mmt
