#pragma once

#include <cmath>

#include "mmt/field.hpp"

namespace mmt {

/// Wraps into [0, 1).
inline double wrap01(double x) {
  double y = x - std::floor(x);
  return y < 1.0 ? y : 0.0;
}

/// Wraps into [-1/2, 1/2); nearest-representative difference on the unit circle.
inline double wrap_half(double x) { return x - std::round(x); }

/// Nearest-representative difference of two unit-square torus points (stored
/// as x + i y); the result is the lift of b - a with both coordinates in
/// [-1/2, 1/2).
inline complexd torus_diff(complexd b, complexd a) {
  return {wrap_half(b.real() - a.real()), wrap_half(b.imag() - a.imag())};
}

template <typename T>
T bilinear_periodic(const Field<T>& f, double x, double y) {
  const double fx = wrap01(x) * static_cast<double>(f.grid.cols);
  const double fy = wrap01(y) * static_cast<double>(f.grid.rows);
  const long c0 = static_cast<long>(std::floor(fx));
  const long r0 = static_cast<long>(std::floor(fy));
  const double sx = fx - static_cast<double>(c0);
  const double sy = fy - static_cast<double>(r0);
  const T v00 = f.samples[f.grid.wrap_index(r0, c0)];
  const T v01 = f.samples[f.grid.wrap_index(r0, c0 + 1)];
  const T v10 = f.samples[f.grid.wrap_index(r0 + 1, c0)];
  const T v11 = f.samples[f.grid.wrap_index(r0 + 1, c0 + 1)];
  return v00 * ((1.0 - sx) * (1.0 - sy)) + v01 * (sx * (1.0 - sy)) +
         v10 * ((1.0 - sx) * sy) + v11 * (sx * sy);
}

}  // namespace mmt
