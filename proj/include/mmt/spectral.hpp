#pragma once

#include <span>

#include "mmt/field.hpp"

namespace mmt {

/// Discrete Fourier coefficients of a PeriodicField, indexed by the integer
/// frequency pair (m, n): basis mode (m, n) is exp(2*pi*i*(m*x + n*y)) on the
/// unit-square parameter domain.  Stored in FFT layout, same shape as the
/// originating field; coefficient (kr, kc) carries n = signed(kr, rows),
/// m = signed(kc, cols) with the signed range [-N/2, N/2).
struct SpectralField {
  Grid grid;
  std::vector<complexd> coeff;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), coeff(g.size(), complexd{}) {}

  complexd& at(std::size_t kr, std::size_t kc) { return coeff[kr * grid.cols + kc]; }
  const complexd& at(std::size_t kr, std::size_t kc) const { return coeff[kr * grid.cols + kc]; }

  static long signed_freq(std::size_t k, std::size_t n) {
    return k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
  }
};

SpectralField forward_transform(const ComplexField& f);
ComplexField inverse_transform(const SpectralField& s);

/// Wirtinger derivatives d/dz and d/dzbar, z = x + i*y, as exact Fourier
/// multipliers pi*(n + i*m) and pi*(-n + i*m).
ComplexField d_z(const ComplexField& f);
ComplexField d_zbar(const ComplexField& f);

/// Right inverse of d_zbar on zero-mean fields (modewise division).
/// Precondition: |mean(f)| <= mean_tol; result has zero mean.
ComplexField dbar_inverse(const ComplexField& f, double mean_tol = 1e-10);

/// Periodic Beurling-type multiplier (n + i*m)/(-n + i*m); the zero mode is
/// annihilated.  Equals d_z o dbar_inverse on zero-mean fields and has unit
/// modulus on every other mode, so it is an L2 isometry there.
ComplexField beurling(const ComplexField& f);

/// Subtracts the mean (projection onto zero-mean fields).
ComplexField remove_mean(const ComplexField& f);

/// Evaluates the trigonometric interpolant of f at arbitrary parameter points
/// (x, y); exact for the sampled band.  Cost O(points * rows * cols).
void spectral_evaluate(const SpectralField& s, std::span<const double> xs,
                       std::span<const double> ys, std::span<complexd> out);
complexd spectral_evaluate_one(const SpectralField& s, double x, double y);

/// Evaluates several same-shape spectra at one point, sharing phase tables.
void spectral_evaluate_shared(std::span<const SpectralField> fields, double x, double y,
                              std::span<complexd> out);

}  // namespace mmt
