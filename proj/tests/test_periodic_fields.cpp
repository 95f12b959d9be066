#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mmt/pgrid.hpp"
#include "mmt/spectral.hpp"
#include "test_util.hpp"

using namespace mmt;
using namespace mmt::testutil;

namespace {

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Independent oracle for the Wirtinger derivatives of a pure mode: apply
// d/dx = 2 pi i m and d/dy = 2 pi i n analytically and combine
// d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2.
complexd oracle_dz_multiplier(long m, long n) {
  const complexd dx(0.0, kTwoPi * static_cast<double>(m));
  const complexd dy(0.0, kTwoPi * static_cast<double>(n));
  return 0.5 * (dx - complexd(0.0, 1.0) * dy);
}
complexd oracle_dzbar_multiplier(long m, long n) {
  const complexd dx(0.0, kTwoPi * static_cast<double>(m));
  const complexd dy(0.0, kTwoPi * static_cast<double>(n));
  return 0.5 * (dx + complexd(0.0, 1.0) * dy);
}

}  // namespace

TEST_CASE("grid shape validation") {
  CHECK_THROWS_AS(Grid(12, 16), std::invalid_argument);
  CHECK_THROWS_AS(Grid(16, 4), std::invalid_argument);
  CHECK_NOTHROW(Grid(8, 8));
  CHECK_THROWS_AS(Lattice(complexd(0.0, -1.0)), std::invalid_argument);
}

TEST_CASE("forward transform: constant field has only the zero mode") {
  Grid g(16, 16);
  ComplexField f(g, complexd(2.5, -1.0));
  SpectralField s = forward_transform(f);
  CHECK(std::abs(s.at(0, 0) - complexd(2.5, -1.0)) < 1e-13);
  double rest = 0.0;
  for (std::size_t i = 1; i < s.coeff.size(); ++i) rest = std::max(rest, std::abs(s.coeff[i]));
  CHECK(rest < 1e-13);
}

TEST_CASE("forward transform: pure mode lands on a single coefficient") {
  Grid g(16, 16);
  ComplexField f = mode_field(g, 1, 0);
  SpectralField s = forward_transform(f);
  // (m, n) = (1, 0): column index 1, row index 0.
  CHECK(std::abs(s.at(0, 1) - 1.0) < 1e-12);
  for (std::size_t kr = 0; kr < g.rows; ++kr) {
    for (std::size_t kc = 0; kc < g.cols; ++kc) {
      if (kr == 0 && kc == 1) continue;
      CHECK(std::abs(s.at(kr, kc)) <= 1e-12);
    }
  }
}

TEST_CASE("transform round trip on random real input") {
  Grid g(32, 16);
  std::mt19937_64 rng(7);
  RealField f = random_real_noise(g, rng);
  ComplexField fc = to_complex(f);
  ComplexField back = inverse_transform(forward_transform(fc));
  double scale = 0.0;
  for (double v : f.samples) scale = std::max(scale, std::abs(v));
  CHECK(max_abs_diff(fc, back) < 1e-12 * scale);
}

TEST_CASE("d_z and d_zbar against the analytic mode oracle") {
  Grid g(16, 16);
  for (const auto [m, n] : {std::pair<long, long>{1, 0}, {0, 1}, {3, -2}, {-4, 5}}) {
    ComplexField f = mode_field(g, m, n);
    ComplexField dz = d_z(f), dzb = d_zbar(f);
    const complexd cz = oracle_dz_multiplier(m, n);
    const complexd czb = oracle_dzbar_multiplier(m, n);
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(std::abs(dz[i] - cz * f[i]) < 1e-11);
      CHECK(std::abs(dzb[i] - czb * f[i]) < 1e-11);
    }
  }
  // Spot values from the multipliers: mode (1,0) gets pi*i for both, mode
  // (0,1) gets pi for d_z and -pi for d_zbar.
  CHECK(std::abs(oracle_dz_multiplier(1, 0) - complexd(0.0, kPi)) < 1e-15);
  CHECK(std::abs(oracle_dzbar_multiplier(1, 0) - complexd(0.0, kPi)) < 1e-15);
  CHECK(std::abs(oracle_dz_multiplier(0, 1) - complexd(kPi, 0.0)) < 1e-15);
  CHECK(std::abs(oracle_dzbar_multiplier(0, 1) - complexd(-kPi, 0.0)) < 1e-15);
}

TEST_CASE("derivatives of a constant vanish") {
  Grid g(8, 8);
  ComplexField f(g, complexd(3.0, 4.0));
  CHECK(sup_norm(d_z(f)) < 1e-13);
  CHECK(sup_norm(d_zbar(f)) < 1e-13);
}

TEST_CASE("dbar_inverse examples") {
  Grid g(16, 16);

  SUBCASE("known antiderivative of pi*i*exp(2*pi*i*x)") {
    ComplexField f = mode_field(g, 1, 0);
    ComplexField rhs(g);
    for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = complexd(0.0, kPi) * f[i];
    // Oracle: forward-apply d_zbar to the candidate antiderivative.
    CHECK(max_abs_diff(d_zbar(f), rhs) < 1e-11);
    ComplexField s = dbar_inverse(rhs);
    CHECK(max_abs_diff(s, f) < 1e-10);
  }

  SUBCASE("zero maps to zero") {
    ComplexField z(g);
    CHECK(sup_norm(dbar_inverse(z)) == 0.0);
  }

  SUBCASE("right inverse on random zero-mean fields") {
    std::mt19937_64 rng(11);
    ComplexField f = random_bandlimited(g, rng, 5, 1.0, /*zero_mean=*/true);
    f = remove_mean(f);
    ComplexField s = dbar_inverse(f);
    CHECK(std::abs(s.mean()) < 1e-12);
    CHECK(max_abs_diff(d_zbar(s), f) < 1e-10);
  }

  SUBCASE("nonzero mean is rejected with the offending value") {
    ComplexField f(g, complexd(0.5, 0.0));
    CHECK_THROWS_WITH_AS(dbar_inverse(f), doctest::Contains("mean"), std::invalid_argument);
  }
}

TEST_CASE("beurling examples and defining identity") {
  Grid g(16, 16);

  ComplexField fx = mode_field(g, 1, 0);
  CHECK(max_abs_diff(beurling(fx), fx) < 1e-12);

  ComplexField fy = mode_field(g, 0, 1);
  ComplexField neg = fy;
  for (auto& v : neg.samples) v = -v;
  CHECK(max_abs_diff(beurling(fy), neg) < 1e-12);

  // Oracle: beurling == d_z o dbar_inverse on zero-mean fields.
  std::mt19937_64 rng(3);
  ComplexField u = random_bandlimited(g, rng, 4, 1.0, /*zero_mean=*/true);
  u = remove_mean(u);
  CHECK(max_abs_diff(beurling(u), d_z(dbar_inverse(u))) < 1e-10);
  // Defining identity: beurling(d_zbar u) = d_z u.
  CHECK(max_abs_diff(beurling(d_zbar(u)), d_z(u)) < 1e-10);
}

TEST_CASE("beurling is an L2 isometry on zero-mean fields") {
  Grid g(32, 32);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    ComplexField f = random_bandlimited(g, rng, 9, 2.0, true);
    f = remove_mean(f);
    const double before = l2_norm(f);
    const double after = l2_norm(beurling(f));
    CHECK(std::abs(after - before) < 1e-12 * std::max(1.0, before));
  }
}

TEST_CASE("d_z and d_zbar commute on band-limited fields") {
  Grid g(32, 32);
  std::mt19937_64 rng(23);
  ComplexField f = random_bandlimited(g, rng, 6);
  ComplexField ab = d_z(d_zbar(f));
  ComplexField ba = d_zbar(d_z(f));
  CHECK(l2_distance(ab, ba) < 1e-10 * std::max(1.0, l2_norm(f)));
}

TEST_CASE("for real fields d_zbar is the conjugate of d_z") {
  Grid g(32, 32);
  std::mt19937_64 rng(29);
  RealField f = random_real_bandlimited(g, rng, 7);
  ComplexField fc = to_complex(f);
  ComplexField dz = d_z(fc), dzb = d_zbar(fc);
  double worst = 0.0;
  for (std::size_t i = 0; i < fc.size(); ++i) {
    worst = std::max(worst, std::abs(dzb[i] - std::conj(dz[i])));
  }
  double scale = std::max(1.0, sup_norm(dz));
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("PGRID1 exact byte layout") {
  Grid g(8, 8, Lattice(complexd(0.25, 2.0)));
  RealField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
  const auto path = std::filesystem::temp_directory_path() / "mmt_layout.pgrid";
  write_pgrid(path, to_pgrid(f));

  std::ifstream is(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 8 + 3 * 4 + 2 * 8 + 64 * 8);
  CHECK(std::memcmp(bytes.data(), "PGRID1\0\0", 8) == 0);
  std::uint32_t rows, cols, comps;
  std::memcpy(&rows, bytes.data() + 8, 4);
  std::memcpy(&cols, bytes.data() + 12, 4);
  std::memcpy(&comps, bytes.data() + 16, 4);
  CHECK(rows == 8);
  CHECK(cols == 8);
  CHECK(comps == 1);
  double tre, tim, first, last;
  std::memcpy(&tre, bytes.data() + 20, 8);
  std::memcpy(&tim, bytes.data() + 28, 8);
  std::memcpy(&first, bytes.data() + 36, 8);
  std::memcpy(&last, bytes.data() + 36 + 63 * 8, 8);
  CHECK(tre == 0.25);
  CHECK(tim == 2.0);
  CHECK(first == 0.0);
  CHECK(last == 63.0);
  std::filesystem::remove(path);
}

TEST_CASE("PGRID1 round trip is bit identical") {
  Grid g(16, 32, Lattice(complexd(-0.5, 0.75)));
  std::mt19937_64 rng(31);
  VectorField v(g, 3);
  std::normal_distribution<double> gauss;
  for (double& x : v.data) x = gauss(rng);
  const auto path = std::filesystem::temp_directory_path() / "mmt_roundtrip.pgrid";
  write_pgrid(path, to_pgrid(v));
  PGrid back = read_pgrid(path);
  VectorField w = pgrid_to_vector(back);
  CHECK(w.grid.rows == 16);
  CHECK(w.grid.cols == 32);
  CHECK(w.grid.lattice.tau == g.lattice.tau);
  REQUIRE(w.data.size() == v.data.size());
  CHECK(std::memcmp(w.data.data(), v.data.data(), v.data.size() * sizeof(double)) == 0);
  std::filesystem::remove(path);
}
