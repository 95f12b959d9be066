#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmt {

using complexd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// A rank-2 lattice {omega1, omega2} in C, normalized so omega1 == 1 and
/// omega2 = tau with Im(tau) > 0.  The quotient C/lattice is the marked
/// torus carrying this tau.
struct Lattice {
  complexd tau{0.0, 1.0};

  Lattice() = default;
  explicit Lattice(complexd t) : tau(t) {
    if (!(tau.imag() > 0.0)) {
      throw std::invalid_argument("Lattice: Im(tau) must be positive, got " +
                                  std::to_string(tau.imag()));
    }
  }

  static Lattice square() { return Lattice(complexd(0.0, 1.0)); }
  bool is_square() const { return tau == complexd(0.0, 1.0); }
};

inline bool is_pow2(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

/// Sampling layout shared by all periodic fields: rows x cols nodes over the
/// fundamental parallelogram, row r / col c at parameter (x, y) = (c/cols, r/rows).
/// No duplicated seam row/column; index arithmetic wraps.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Lattice lattice;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, Lattice lat = Lattice())
      : rows(r), cols(c), lattice(lat) {
    if (rows < 8 || cols < 8 || !is_pow2(rows) || !is_pow2(cols)) {
      throw std::invalid_argument("Grid: rows/cols must be powers of two >= 8, got " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  std::size_t size() const { return rows * cols; }
  std::size_t index(std::size_t r, std::size_t c) const { return r * cols + c; }
  std::size_t wrap_index(long r, long c) const {
    long rr = r % static_cast<long>(rows);
    long cc = c % static_cast<long>(cols);
    if (rr < 0) rr += static_cast<long>(rows);
    if (cc < 0) cc += static_cast<long>(cols);
    return static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc);
  }
  double x_of(std::size_t c) const { return static_cast<double>(c) / static_cast<double>(cols); }
  double y_of(std::size_t r) const { return static_cast<double>(r) / static_cast<double>(rows); }
  double cell_area_param() const { return 1.0 / static_cast<double>(rows * cols); }

  bool same_shape(const Grid& o) const { return rows == o.rows && cols == o.cols; }
};

/// Doubly periodic sampled scalar field (real or complex samples).
template <typename T>
struct Field {
  Grid grid;
  std::vector<T> samples;

  Field() = default;
  explicit Field(const Grid& g, T fill = T{}) : grid(g), samples(g.size(), fill) {}

  T& at(std::size_t r, std::size_t c) { return samples[grid.index(r, c)]; }
  const T& at(std::size_t r, std::size_t c) const { return samples[grid.index(r, c)]; }
  T& operator[](std::size_t i) { return samples[i]; }
  const T& operator[](std::size_t i) const { return samples[i]; }
  std::size_t size() const { return samples.size(); }

  T mean() const {
    T acc{};
    for (const T& v : samples) acc += v;
    return acc / static_cast<double>(samples.size());
  }
};

using RealField = Field<double>;
using ComplexField = Field<complexd>;

inline ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = complexd(f[i], 0.0);
  return out;
}

inline RealField real_part(const ComplexField& f) {
  RealField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

double l2_norm(const ComplexField& f);
double l2_norm(const RealField& f);
double sup_norm(const ComplexField& f);
double l2_distance(const ComplexField& a, const ComplexField& b);

/// d-vector-valued samples on a grid, stored node-major (d components per node).
struct VectorField {
  Grid grid;
  std::size_t dim = 0;
  std::vector<double> data;

  VectorField() = default;
  VectorField(const Grid& g, std::size_t d) : grid(g), dim(d), data(g.size() * d, 0.0) {}

  double* node(std::size_t i) { return data.data() + i * dim; }
  const double* node(std::size_t i) const { return data.data() + i * dim; }
  double* node(std::size_t r, std::size_t c) { return node(grid.index(r, c)); }
  const double* node(std::size_t r, std::size_t c) const { return node(grid.index(r, c)); }
};

}  // namespace mmt
