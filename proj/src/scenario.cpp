#include "mmt/scenario.hpp"

#include <cmath>

namespace mmt {

TargetManifold make_target(const std::string& name) {
  if (name == "s2") return TargetManifold::sphere(3, 1.0);
  if (name == "s3") return TargetManifold::sphere(4, 1.0);
  if (name == "t2") return TargetManifold::flat_torus_product({1.0, 1.0});
  if (name == "ellipsoid") return TargetManifold::ellipsoid({1.0, 1.2, 0.8});
  throw std::invalid_argument("unknown target '" + name +
                              "' (available: s2, s3, t2, ellipsoid)");
}

namespace {

MapSlice constant_s2(const Grid& g) {
  const std::vector<double> p = {0.0, 0.0, 1.0};
  return MapSlice::constant(g, p);
}

Sweepout build_constant(std::size_t grid, std::size_t time_samples) {
  Sweepout s;
  Grid g(grid, grid);
  for (std::size_t k = 0; k <= time_samples; ++k) s.slices.push_back(constant_s2(g));
  return s;
}

Sweepout build_bump(std::size_t grid, std::size_t time_samples) {
  // Constant family with one time-localized spatial bump; peak slice energy
  // area is calibrated to ~0.3 so tightening needs partial covers over rounds.  The bump
  // pushes along two tangent directions so its image has rank 2 (a rank-1
  // bump would be flattened away by conformal reparametrization alone).
  Sweepout s;
  Grid g(grid, grid);
  TargetManifold n = make_target("s2");

  auto slice_at = [&](double env, double amp) {
    MapSlice u = constant_s2(g);
    if (env <= 0.0) return u;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double a = g.x_of(i % g.cols), b = g.y_of(i / g.cols);
      const double d1 = torus_distance(0.52, 0.5, a, b, g.lattice.tau);
      const double d2 = torus_distance(0.48, 0.52, a, b, g.lattice.tau);
      u.node(i)[0] += amp * env * std::exp(-0.5 * d1 * d1 / (0.08 * 0.08));
      u.node(i)[1] += amp * env * std::exp(-0.5 * d2 * d2 / (0.06 * 0.06));
    }
    u.project_all(n);
    return u;
  };

  // Calibrate on the area so the conformal reparametrization cannot flatten
  // the bump away; ~0.3 of area needs several partial covers to remove.
  double amp = 0.5;
  for (int adjust = 0; adjust < 4; ++adjust) {
    const double a = area(slice_at(1.0, amp));
    if (a < 1e-12) break;
    amp *= std::pow(0.3 / a, 0.3);
  }
  for (std::size_t k = 0; k <= time_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(time_samples);
    const double env =
        std::abs(t - 0.5) < 0.25 ? std::pow(std::cos(kTwoPi * (t - 0.5)), 2) : 0.0;
    s.slices.push_back(slice_at(env, amp));
  }
  return s;
}

// Three-phase sweep of S^3 through a flat torus slice:
//   [0, 1/3]   cap from a constant to the x-frequency circle,
//   [1/3, 2/3] rotate the circle pair through the torus slice at t = 1/2,
//   [2/3, 1]   cap from the y-frequency circle back to a constant.
// The middle slice is (e(px a + qx b), e(py a + qy b))/sqrt(2) for the integer
// frequency matrix [[px, qx], [py, qy]]; only integer matrices give doubly
// periodic maps, so "shearing" the Clifford torus means twisting by such a
// matrix.  (px, qx, py, qy) = (1, 0, 0, 1) is the Clifford torus itself.
Sweepout build_clifford_family(std::size_t grid, std::size_t time_samples, long px, long qx,
                               long py, long qy) {
  Sweepout s;
  Grid g(grid, grid);
  const double fx = static_cast<double>(px), gx = static_cast<double>(qx);
  const double fy = static_cast<double>(py), gy = static_cast<double>(qy);
  for (std::size_t k = 0; k <= time_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(time_samples);
    MapSlice u(g, 4);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double a = g.x_of(i % g.cols);
      const double b = g.y_of(i / g.cols);
      const double phx = kTwoPi * (fx * a + gx * b);
      const double phy = kTwoPi * (fy * a + gy * b);
      double* v = u.node(i);
      if (t <= 1.0 / 3.0) {
        const double alpha = 3.0 * t * kPi / 2.0;
        v[0] = std::cos(alpha);
        v[1] = 0.0;
        v[2] = std::sin(alpha) * std::cos(phx);
        v[3] = std::sin(alpha) * std::sin(phx);
      } else if (t <= 2.0 / 3.0) {
        const double beta = (3.0 * t - 1.0) * kPi / 2.0;
        v[0] = std::sin(beta) * std::cos(phy);
        v[1] = std::sin(beta) * std::sin(phy);
        v[2] = std::cos(beta) * std::cos(phx);
        v[3] = std::cos(beta) * std::sin(phx);
      } else {
        const double gamma = (3.0 * t - 2.0) * kPi / 2.0;
        v[0] = std::cos(gamma) * std::cos(phy);
        v[1] = std::cos(gamma) * std::sin(phy);
        v[2] = std::sin(gamma);
        v[3] = 0.0;
      }
    }
    s.slices.push_back(std::move(u));
  }
  return s;
}

// Family of circle maps sweeping from a constant through the great circle to
// the antipodal constant.  Every slice has zero area and a rank-1 pullback,
// so after regularization the marks run off to the cusp as delta shrinks:
// the case (2) behavior.
Sweepout build_degenerate(std::size_t grid, std::size_t time_samples) {
  Sweepout s;
  Grid g(grid, grid);
  for (std::size_t k = 0; k <= time_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(time_samples);
    const double theta = kPi * t;
    MapSlice u(g, 4);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.x_of(i % g.cols);
      double* v = u.node(i);
      v[0] = std::cos(theta);
      v[1] = 0.0;
      v[2] = std::sin(theta) * std::cos(kTwoPi * x);
      v[3] = std::sin(theta) * std::sin(kTwoPi * x);
    }
    s.slices.push_back(std::move(u));
  }
  return s;
}

}  // namespace

const std::vector<ScenarioSpec>& scenario_library() {
  static const std::vector<ScenarioSpec> lib = {
      {"constant", "s2", "zero-width fixed point", build_constant},
      {"bump", "s2", "bump removed by tightening", build_bump},
      {"clifford", "s3", "width 2 pi^2 at the Clifford slice",
       [](std::size_t g, std::size_t m) { return build_clifford_family(g, m, 1, 0, 0, 1); }},
      {"shear-clifford", "s3", "converged mark 2i (shear-twisted Clifford) at the maximal slice",
       [](std::size_t g, std::size_t m) { return build_clifford_family(g, m, 1, 1, 0, 2); }},
      {"degenerate", "s3", "conformal structures degenerate", build_degenerate},
  };
  return lib;
}

const ScenarioSpec& find_scenario(const std::string& name) {
  for (const ScenarioSpec& s : scenario_library()) {
    if (s.name == name) return s;
  }
  std::string names;
  for (const ScenarioSpec& s : scenario_library()) {
    if (!names.empty()) names += ", ";
    names += s.name;
  }
  throw std::invalid_argument("unknown scenario '" + name + "' (available: " + names + ")");
}

}  // namespace mmt
