#include "mmt/metric.hpp"

#include <cmath>

namespace mmt {

MetricField MetricField::identity(const Grid& g) { return constant(g, 1.0, 0.0, 1.0); }

MetricField MetricField::constant(const Grid& g, double a11, double a12, double a22) {
  MetricField m(g);
  for (std::size_t i = 0; i < m.g11.size(); ++i) {
    m.g11[i] = a11;
    m.g12[i] = a12;
    m.g22[i] = a22;
  }
  return m;
}

MetricField regularize(const MetricField& g, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("regularize: delta must be positive, got " +
                                std::to_string(delta));
  }
  MetricField out = g;
  for (std::size_t i = 0; i < out.g11.size(); ++i) {
    out.g11[i] += delta;
    out.g22[i] += delta;
  }
  out.delta = g.delta + delta;
  return out;
}

BeltramiField metric_to_beltrami(const MetricField& g) {
  BeltramiField b;
  b.mu = ComplexField(g.grid());
  b.lambda = RealField(g.grid());
  double k = 0.0;
  for (std::size_t i = 0; i < g.g11.size(); ++i) {
    const double det = g.det(i);
    if (!(g.g11[i] > 0.0) || !(g.g22[i] > 0.0) || !(det > 0.0)) {
      const std::size_t r = i / g.grid().cols, c = i % g.grid().cols;
      throw std::domain_error("metric_to_beltrami: metric not positive definite at node (" +
                              std::to_string(r) + "," + std::to_string(c) +
                              "), det=" + std::to_string(det));
    }
    const double s = std::sqrt(det);
    const double den = g.g11[i] + g.g22[i] + 2.0 * s;
    b.mu[i] = complexd(g.g11[i] - g.g22[i], 2.0 * g.g12[i]) / den;
    b.lambda[i] = den / 4.0;
    k = std::max(k, std::abs(b.mu[i]));
  }
  b.bound_k = k;
  return b;
}

MetricField beltrami_to_metric(const BeltramiField& b) {
  MetricField m(b.grid());
  for (std::size_t i = 0; i < m.g11.size(); ++i) {
    const complexd mu = b.mu[i];
    const double l = b.lambda[i];
    m.g11[i] = l * std::norm(1.0 + mu);
    m.g12[i] = 2.0 * l * mu.imag();
    m.g22[i] = l * std::norm(1.0 - mu);
  }
  return m;
}

double reconstruction_error(const MetricField& g, const BeltramiField& b) {
  const MetricField r = beltrami_to_metric(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.g11.size(); ++i) {
    const double scale = std::max({std::abs(g.g11[i]), std::abs(g.g22[i]), 1e-300});
    worst = std::max(worst, std::abs(r.g11[i] - g.g11[i]) / scale);
    worst = std::max(worst, std::abs(r.g12[i] - g.g12[i]) / scale);
    worst = std::max(worst, std::abs(r.g22[i] - g.g22[i]) / scale);
  }
  return worst;
}

}  // namespace mmt
