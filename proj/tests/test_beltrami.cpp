#include <cmath>

#include "doctest.h"
#include "mmt/beltrami.hpp"
#include "mmt/interp.hpp"
#include "test_util.hpp"

using namespace mmt;
using namespace mmt::testutil;

namespace {

// Independent oracle for the dilatation decomposition: evaluate the quadratic
// form lambda |dz(v) + mu dzbar(v)|^2 on tangent vectors via polarization,
// never through the library's expansion formulas.
struct FormOracle {
  double lambda;
  complexd mu;
  double quad(double vx, double vy) const {
    const complexd dz(vx, vy), dzb(vx, -vy);
    return lambda * std::norm(dz + mu * dzb);
  }
  double g11() const { return quad(1.0, 0.0); }
  double g22() const { return quad(0.0, 1.0); }
  double g12() const { return 0.5 * (quad(1.0, 1.0) - g11() - g22()); }
};

MetricField diag_metric(const Grid& g, double a, double b) {
  return MetricField::constant(g, a, 0.0, b);
}

BeltramiField constant_mu(const Grid& g, complexd mu) {
  BeltramiField b;
  b.mu = ComplexField(g, mu);
  b.lambda = RealField(g, 1.0);
  b.bound_k = std::abs(mu);
  return b;
}

BeltramiField smooth_mu(const Grid& g, double amplitude, std::mt19937_64& rng, long band = 3) {
  ComplexField f = random_bandlimited(g, rng, band, 1.0);
  double peak = sup_norm(f);
  BeltramiField b;
  b.mu = ComplexField(g);
  for (std::size_t i = 0; i < f.size(); ++i) b.mu[i] = f[i] * (amplitude / peak);
  b.lambda = RealField(g, 1.0);
  b.bound_k = amplitude;
  return b;
}

// Evaluates the forward map at an arbitrary source point by interpolating its
// periodic part and rebuilding the affine part analytically.
complexd forward_at(const UniformizationResult& r, complexd z) {
  const Grid& g = r.w_grid.grid;
  ComplexField periodic(g);
  for (std::size_t rr = 0; rr < g.rows; ++rr) {
    for (std::size_t cc = 0; cc < g.cols; ++cc) {
      const complexd node(g.x_of(cc), g.y_of(rr));
      periodic.at(rr, cc) =
          r.w_grid.at(rr, cc) / r.scale_a - node - r.g0_mean * std::conj(node);
    }
  }
  const complexd s = bilinear_periodic(periodic, z.real(), z.imag());
  return r.scale_a * (z + r.g0_mean * std::conj(z) + s);
}

}  // namespace

TEST_CASE("metric_to_beltrami closed forms checked against the form oracle") {
  Grid g(16, 16);

  SUBCASE("identity metric") {
    BeltramiField b = metric_to_beltrami(MetricField::identity(g));
    CHECK(sup_norm(b.mu) < 1e-14);
    CHECK(std::abs(b.lambda[0] - 1.0) < 1e-14);
  }

  SUBCASE("diag(4,1)") {
    BeltramiField b = metric_to_beltrami(diag_metric(g, 4.0, 1.0));
    CHECK(std::abs(b.mu[0] - complexd(1.0 / 3.0, 0.0)) < 1e-13);
    CHECK(std::abs(b.lambda[0] - 2.25) < 1e-13);
    // Oracle: expanding lambda |dz + mu dzbar|^2 must give back (4, 0, 1).
    FormOracle oracle{b.lambda[0], b.mu[0]};
    CHECK(std::abs(oracle.g11() - 4.0) < 1e-12);
    CHECK(std::abs(oracle.g12() - 0.0) < 1e-12);
    CHECK(std::abs(oracle.g22() - 1.0) < 1e-12);
  }

  SUBCASE("pullback of u(x,y) = (x, y + 0.1 sin 2 pi x)") {
    MetricField m(g);
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t c = 0; c < g.cols; ++c) {
        const double d = 0.1 * kTwoPi * std::cos(kTwoPi * g.x_of(c));
        // Du = [[1, 0], [d, 1]] acting on (dx, dy); g = Du^T Du.
        const std::size_t i = g.index(r, c);
        m.g11[i] = 1.0 + d * d;
        m.g12[i] = d;
        m.g22[i] = 1.0;
      }
    }
    BeltramiField b = metric_to_beltrami(m);
    for (std::size_t i = 0; i < m.g11.size(); ++i) {
      FormOracle oracle{b.lambda[i], b.mu[i]};
      const double scale = std::max(m.g11[i], m.g22[i]);
      CHECK(std::abs(oracle.g11() - m.g11[i]) < 1e-10 * scale);
      CHECK(std::abs(oracle.g12() - m.g12[i]) < 1e-10 * scale);
      CHECK(std::abs(oracle.g22() - m.g22[i]) < 1e-10 * scale);
    }
    CHECK(reconstruction_error(m, b) < 1e-10);
    CHECK(b.bound_k < 1.0);
  }

  SUBCASE("degenerate node is rejected with its index") {
    MetricField m = MetricField::identity(g);
    m.g11[g.index(3, 5)] = 0.0;
    CHECK_THROWS_WITH_AS(metric_to_beltrami(m), doctest::Contains("(3,5)"), std::domain_error);
  }
}

TEST_CASE("reconstruction round trip on random SPD metrics") {
  Grid g(8, 8);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    MetricField m(g);
    for (std::size_t i = 0; i < m.g11.size(); ++i) {
      // Random SPD 2x2 via A^T A + eps I.
      const double a = unif(rng), b = unif(rng), c = unif(rng), d = unif(rng);
      m.g11[i] = a * a + c * c + 0.05;
      m.g12[i] = a * b + c * d;
      m.g22[i] = b * b + d * d + 0.05;
    }
    BeltramiField bf = metric_to_beltrami(m);
    CHECK(reconstruction_error(m, bf) < 1e-10);
    CHECK(bf.bound_k < 1.0);
  }
}

TEST_CASE("regularize") {
  Grid g(8, 8);

  SUBCASE("zero metric plus delta") {
    MetricField zero(g);
    MetricField r = regularize(zero, 0.5);
    CHECK(r.g11[0] == 0.5);
    CHECK(r.g22[0] == 0.5);
    CHECK(r.g12[0] == 0.0);
  }

  SUBCASE("additivity on diag(4,1)") {
    MetricField r = regularize(diag_metric(g, 4.0, 1.0), 1.0);
    CHECK(r.g11[0] == 5.0);
    CHECK(r.g22[0] == 2.0);
  }

  SUBCASE("rank-1 curve pullback becomes positive definite") {
    // Pullback of the curve x -> (cos 2 pi x, sin 2 pi x): g = diag(4 pi^2, 0).
    MetricField m(g);
    for (std::size_t i = 0; i < m.g11.size(); ++i) m.g11[i] = 4.0 * kPi * kPi;
    MetricField r = regularize(m, 1e-3);
    for (std::size_t i = 0; i < r.g11.size(); ++i) {
      // Eigenvalues of the 2x2 block, checked nodewise.
      const double tr = r.g11[i] + r.g22[i];
      const double det = r.det(i);
      const double disc = std::sqrt(tr * tr / 4.0 - det);
      CHECK(tr / 2.0 - disc > 0.0);
      CHECK(det >= 1e-6 * (1.0 - 1e-12));
    }
    BeltramiField b = metric_to_beltrami(r);
    CHECK(b.bound_k < 1.0);
  }

  SUBCASE("nonpositive delta rejected") {
    CHECK_THROWS_AS(regularize(MetricField::identity(g), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(regularize(MetricField::identity(g), -1.0), std::invalid_argument);
  }
}

TEST_CASE("solver: mu = 0 gives the identity map and mark i") {
  Grid g(16, 16);
  UniformizationResult r = solve_periodic_beltrami(constant_mu(g, 0.0));
  CHECK(r.iterations == 1);
  CHECK(std::abs(r.mark.tau - complexd(0.0, 1.0)) < 1e-14);
  CHECK(std::abs(r.g0_mean) < 1e-14);
  CHECK(r.residual < 1e-14);
  for (std::size_t rr = 0; rr < g.rows; ++rr) {
    for (std::size_t cc = 0; cc < g.cols; ++cc) {
      CHECK(std::abs(r.w_grid.at(rr, cc) - complexd(g.x_of(cc), g.y_of(rr))) < 1e-13);
    }
  }
}

TEST_CASE("solver: constant mu = 1/3 matches the affine closed form") {
  // Closed form: w = z + mu zbar satisfies the equation; periods 1 + mu and
  // i (1 - mu), so tau = i (1 - mu)/(1 + mu) = i/2 for mu = 1/3.
  for (std::size_t n : {std::size_t{16}, std::size_t{64}}) {
    Grid g(n, n);
    UniformizationResult r = solve_periodic_beltrami(constant_mu(g, complexd(1.0 / 3.0, 0.0)));
    CHECK(std::abs(r.g0_mean - complexd(1.0 / 3.0, 0.0)) < 1e-14);
    CHECK(std::abs(r.mark.tau - complexd(0.0, 0.5)) < 1e-10);
    const complexd A = 1.0 / (1.0 + complexd(1.0 / 3.0, 0.0));
    for (std::size_t rr = 0; rr < g.rows; ++rr) {
      for (std::size_t cc = 0; cc < g.cols; ++cc) {
        const complexd z(g.x_of(cc), g.y_of(rr));
        CHECK(std::abs(r.w_grid.at(rr, cc) - A * (z + std::conj(z) / 3.0)) < 1e-12);
      }
    }
  }
  // Same mark through the metric route diag(4,1).
  Grid g(16, 16);
  BeltramiField b = metric_to_beltrami(diag_metric(g, 4.0, 1.0));
  UniformizationResult r = solve_periodic_beltrami(b);
  CHECK(std::abs(r.mark.tau - complexd(0.0, 0.5)) < 1e-12);
}

TEST_CASE("solver: smooth mu, residual and resolution-doubling stability") {
  auto mu_of = [](const Grid& g) {
    BeltramiField b;
    b.mu = ComplexField(g);
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t c = 0; c < g.cols; ++c) {
        b.mu.at(r, c) = 0.2 * std::polar(1.0, kTwoPi * g.x_of(c));
      }
    }
    b.lambda = RealField(g, 1.0);
    b.bound_k = 0.2;
    return b;
  };
  UniformizationResult r128 = solve_periodic_beltrami(mu_of(Grid(128, 128)));
  UniformizationResult r256 = solve_periodic_beltrami(mu_of(Grid(256, 256)));
  CHECK(r128.residual <= 1e-8);
  CHECK(std::abs(r128.mark.tau - r256.mark.tau) < 1e-8);
}

TEST_CASE("contraction certificate and orientation") {
  Grid g(64, 64);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    BeltramiField b = smooth_mu(g, 0.4, rng);
    UniformizationResult r = solve_periodic_beltrami(b);
    if (r.iterations >= 3) CHECK(r.contraction_max <= b.bound_k + 0.05);
    CHECK(min_forward_jacobian(b, r) > 0.0);
    // Normalization: w(0) = 0 exactly; the periods map to 1 and tau exactly.
    CHECK(std::abs(r.w_grid[0]) < 1e-13);
    CHECK(std::abs(r.scale_a * (1.0 + r.g0_mean) - 1.0) < 1e-13);
    CHECK(std::abs(r.scale_a * complexd(0.0, 1.0) * (1.0 - r.g0_mean) - r.mark.tau) < 1e-13);
  }
}

TEST_CASE("solver preconditions and non-convergence") {
  Grid g(16, 16);
  BeltramiField bad = constant_mu(g, complexd(0.0, 0.0));
  bad.bound_k = 1.0;
  CHECK_THROWS_AS(solve_periodic_beltrami(bad), std::invalid_argument);

  std::mt19937_64 rng(5);
  BeltramiField b = smooth_mu(g, 0.5, rng);
  SolverOptions opt;
  opt.max_iter = 2;
  opt.tol = 1e-14;
  CHECK_THROWS_AS(solve_periodic_beltrami(b, opt), NonConvergenceError);
}

TEST_CASE("invert_map examples") {
  SUBCASE("identity forward map inverts to the identity") {
    Grid g(16, 16);
    BeltramiField b = constant_mu(g, 0.0);
    UniformizationResult r = solve_periodic_beltrami(b);
    invert_map(b, r);
    for (std::size_t rr = 0; rr < g.rows; ++rr) {
      for (std::size_t cc = 0; cc < g.cols; ++cc) {
        const complexd expect(g.x_of(cc), g.y_of(rr));
        CHECK(std::abs(torus_diff(r.h_grid.at(rr, cc), expect)) < 1e-12);
      }
    }
    CHECK(r.cr2_residual < 1e-10);
  }

  SUBCASE("constant mu = 1/3: inverse matches the affine closed form") {
    Grid g(32, 32);
    const double mu = 1.0 / 3.0;
    BeltramiField b = constant_mu(g, complexd(mu, 0.0));
    UniformizationResult r = solve_periodic_beltrami(b);
    invert_map(b, r);
    const Grid& dst = r.h_grid.grid;
    for (std::size_t rr = 0; rr < dst.rows; ++rr) {
      for (std::size_t cc = 0; cc < dst.cols; ++cc) {
        // Target node (a, b) corresponds to the plane point a + b tau.
        const complexd point = complexd(dst.x_of(cc), 0.0) + dst.y_of(rr) * r.mark.tau;
        const complexd P = point / r.scale_a;
        const complexd z = (P - mu * std::conj(P)) / (1.0 - mu * mu);
        const complexd expect(wrap01(z.real()), wrap01(z.imag()));
        CHECK(std::abs(torus_diff(r.h_grid.at(rr, cc), expect)) < 1e-10);
      }
    }
    CHECK(r.cr2_residual <= 1e-6);
  }

  SUBCASE("smooth mu: forward o inverse is the identity within 2 cells") {
    Grid g(64, 64);
    std::mt19937_64 rng(23);
    BeltramiField b = smooth_mu(g, 0.4, rng);
    UniformizationResult r = solve_periodic_beltrami(b);
    invert_map(b, r);
    const Grid& dst = r.h_grid.grid;
    const complexd tau = r.mark.tau;
    const double cell = 2.0 * std::hypot(1.0 / 64.0, std::abs(tau) / 64.0);
    for (std::size_t rr = 0; rr < dst.rows; rr += 3) {
      for (std::size_t cc = 0; cc < dst.cols; cc += 3) {
        const complexd h = r.h_grid.at(rr, cc);
        const complexd w = forward_at(r, h);
        const complexd target = complexd(dst.x_of(cc), 0.0) + dst.y_of(rr) * tau;
        const complexd diff = w - target;
        // Compare modulo the lattice {1, tau}.
        const double bpart = diff.imag() / tau.imag();
        const double apart = diff.real() - bpart * tau.real();
        CHECK(std::abs(complexd(wrap_half(apart), wrap_half(bpart))) < cell);
      }
    }
  }
}

TEST_CASE("uniformize examples") {
  SUBCASE("identity metric") {
    Grid g(32, 32);
    UniformizationResult r = uniformize(MetricField::identity(g), 1e-10, 1e-12);
    CHECK(std::abs(r.mark.tau - complexd(0.0, 1.0)) < 1e-9);
    CHECK(std::abs(r.conformal_defect) < 1e-10);
  }

  SUBCASE("diag(4,1) gives mark i/2") {
    Grid g(64, 64);
    UniformizationResult r = uniformize(diag_metric(g, 4.0, 1.0), 1e-10, 1e-12);
    CHECK(std::abs(r.mark.tau - complexd(0.0, 0.5)) < 1e-8);
  }

  SUBCASE("mark varies continuously along g(t) = diag(1+t, 1)") {
    Grid g(16, 16);
    // Closed form tau(t) = i / sqrt(1 + t); |dtau/dt| <= 1/2.
    complexd prev;
    for (int k = 0; k <= 10; ++k) {
      const double t = 0.1 * static_cast<double>(k);
      UniformizationResult r = uniformize(diag_metric(g, 1.0 + t, 1.0), 1e-10, 1e-12);
      CHECK(std::abs(r.mark.tau - complexd(0.0, 1.0 / std::sqrt(1.0 + t))) < 1e-8);
      if (k > 0) CHECK(std::abs(r.mark.tau - prev) < 0.5 * 0.1 * 1.2);
      prev = r.mark.tau;
    }
  }
}

TEST_CASE("continuity probe") {
  Grid g(32, 32);

  SUBCASE("identical coefficients give near-zero distances") {
    BeltramiField a = constant_mu(g, complexd(0.2, 0.1));
    ContinuityReport rep = continuity_probe(a, a);
    CHECK(rep.d_sup_w < 1e-10);
    CHECK(rep.d_sup_h < 1e-10);
    CHECK(rep.d_l2_grad < 1e-8);
  }

  SUBCASE("constant perturbations decay linearly") {
    double prev = 1e9;
    for (double eps : {0.1, 0.01, 0.001}) {
      BeltramiField a = constant_mu(g, complexd(1.0 / 3.0, 0.0));
      BeltramiField b = constant_mu(g, complexd(1.0 / 3.0 + eps, 0.0));
      ContinuityReport rep = continuity_probe(a, b);
      CHECK(rep.d_sup_w < prev);
      CHECK(rep.d_sup_w / eps < 5.0);  // closed-form affine maps differ by O(eps)
      prev = rep.d_sup_w;
    }
  }

  SUBCASE("smooth perturbation: all three distances decay monotonically") {
    std::mt19937_64 rng(37);
    BeltramiField base = smooth_mu(g, 0.3, rng);
    double prev_w = 1e9, prev_h = 1e9, prev_g = 1e9;
    for (double eps : {0.08, 0.04, 0.02}) {
      BeltramiField pert = base;
      for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) {
          pert.mu.at(r, c) += eps * std::polar(1.0, kTwoPi * g.y_of(r));
        }
      }
      pert.bound_k = sup_norm(pert.mu);
      ContinuityReport rep = continuity_probe(base, pert);
      CHECK(rep.d_sup_w < prev_w);
      CHECK(rep.d_sup_h < prev_h);
      CHECK(rep.d_l2_grad < prev_g);
      prev_w = rep.d_sup_w;
      prev_h = rep.d_sup_h;
      prev_g = rep.d_l2_grad;
    }
  }
}
