#include "mmt/target.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmt {

TargetManifold TargetManifold::sphere(std::size_t ambient_dim, double radius) {
  if (ambient_dim < 2 || !(radius > 0.0)) {
    throw std::invalid_argument("TargetManifold::sphere: need dim >= 2 and radius > 0");
  }
  TargetManifold t;
  t.kind_ = Kind::Sphere;
  t.dim_ = ambient_dim;
  t.params_ = {radius};
  t.scale_ = radius;
  return t;
}

TargetManifold TargetManifold::flat_torus_product(std::vector<double> radii) {
  if (radii.empty()) throw std::invalid_argument("flat_torus_product: no circle radii");
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("flat_torus_product: radii must be positive");
  }
  TargetManifold t;
  t.kind_ = Kind::FlatTorusProduct;
  t.dim_ = 2 * radii.size();
  t.scale_ = *std::min_element(radii.begin(), radii.end());
  t.params_ = std::move(radii);
  return t;
}

TargetManifold TargetManifold::ellipsoid(std::vector<double> semi_axes) {
  if (semi_axes.size() < 2) throw std::invalid_argument("ellipsoid: need >= 2 semi-axes");
  for (double a : semi_axes) {
    if (!(a > 0.0)) throw std::invalid_argument("ellipsoid: semi-axes must be positive");
  }
  TargetManifold t;
  t.kind_ = Kind::Ellipsoid;
  t.dim_ = semi_axes.size();
  t.scale_ = *std::min_element(semi_axes.begin(), semi_axes.end());
  t.params_ = std::move(semi_axes);
  return t;
}

namespace {

double norm2(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace

void TargetManifold::project(std::span<const double> x, std::span<double> out) const {
  switch (kind_) {
    case Kind::Sphere: {
      const double r = params_[0];
      const double n = norm2(x);
      if (n < 0.05 * r) {
        throw std::domain_error("TargetManifold: point too close to the sphere center");
      }
      const double s = r / n;
      for (std::size_t i = 0; i < dim_; ++i) out[i] = x[i] * s;
      return;
    }
    case Kind::FlatTorusProduct: {
      for (std::size_t j = 0; j < params_.size(); ++j) {
        const double r = params_[j];
        const double n = std::hypot(x[2 * j], x[2 * j + 1]);
        if (n < 0.05 * r) {
          throw std::domain_error("TargetManifold: point too close to a circle axis");
        }
        const double s = r / n;
        out[2 * j] = x[2 * j] * s;
        out[2 * j + 1] = x[2 * j + 1] * s;
      }
      return;
    }
    case Kind::Ellipsoid: {
      // x_i = a_i^2 y_i / (a_i^2 + lambda) with the multiplier solving
      // F(lambda) = sum a_i^2 y_i^2 / (a_i^2 + lambda)^2 - 1 = 0.
      double amin2 = params_[0] * params_[0];
      for (double a : params_) amin2 = std::min(amin2, a * a);
      auto F = [&](double lam) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
          const double a2 = params_[i] * params_[i];
          const double t = params_[i] * x[i] / (a2 + lam);
          acc += t * t;
        }
        return acc - 1.0;
      };
      double lo = -amin2 * (1.0 - 1e-12);
      if (F(lo) < 0.0) {
        throw std::domain_error("TargetManifold: ellipsoid projection not well defined here");
      }
      double hi = std::max(1.0, norm2(x));
      hi = hi * hi;
      while (F(hi) > 0.0) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-16 * (amin2 + std::abs(hi))) break;
      }
      const double lam = 0.5 * (lo + hi);
      for (std::size_t i = 0; i < dim_; ++i) {
        const double a2 = params_[i] * params_[i];
        out[i] = a2 * x[i] / (a2 + lam);
      }
      return;
    }
  }
}

std::vector<double> TargetManifold::project(std::span<const double> x) const {
  std::vector<double> out(dim_);
  project(x, out);
  return out;
}

void TargetManifold::tangent_project(std::span<const double> p, std::span<double> v) const {
  switch (kind_) {
    case Kind::Sphere: {
      const double n = norm2(p);
      double dot = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) dot += p[i] * v[i];
      dot /= n * n;
      for (std::size_t i = 0; i < dim_; ++i) v[i] -= dot * p[i];
      return;
    }
    case Kind::FlatTorusProduct: {
      for (std::size_t j = 0; j < params_.size(); ++j) {
        const double px = p[2 * j], py = p[2 * j + 1];
        const double n2 = px * px + py * py;
        const double dot = (px * v[2 * j] + py * v[2 * j + 1]) / n2;
        v[2 * j] -= dot * px;
        v[2 * j + 1] -= dot * py;
      }
      return;
    }
    case Kind::Ellipsoid: {
      std::vector<double> normal(dim_);
      double n2 = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        normal[i] = p[i] / (params_[i] * params_[i]);
        n2 += normal[i] * normal[i];
      }
      double dot = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) dot += normal[i] * v[i];
      dot /= n2;
      for (std::size_t i = 0; i < dim_; ++i) v[i] -= dot * normal[i];
      return;
    }
  }
}

}  // namespace mmt
