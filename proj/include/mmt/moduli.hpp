#pragma once

#include <array>
#include <optional>
#include <string>

#include "mmt/field.hpp"

namespace mmt {

/// A mark reduced to the fundamental domain M1 of PSL(2, Z):
/// |Re tau| <= 1/2, |tau| >= 1, with the boundary convention
/// Re tau in (-1/2, 1/2] and Re tau >= 0 when |tau| = 1.
struct ModuliPoint {
  complexd tau;
  std::string word;                     // generators applied: T, T-, S
  std::array<long, 4> matrix{1, 0, 0, 1};  // row-major [[a, b], [c, d]], det 1

  complexd apply_matrix(complexd z) const {
    const complexd num = static_cast<double>(matrix[0]) * z + static_cast<double>(matrix[1]);
    const complexd den = static_cast<double>(matrix[2]) * z + static_cast<double>(matrix[3]);
    return num / den;
  }
};

bool in_fundamental_domain(complexd tau, double eps = 1e-12);

/// Gauss reduction: repeat { shift Re into (-1/2, 1/2]; invert when |tau| < 1 }
/// until the mark lies in M1; boundary ties resolved per the convention above.
ModuliPoint reduce_to_fundamental_domain(complexd tau);

struct SequenceVerdict {
  enum class Kind { Converged, Degenerate, Inconclusive } kind;
  complexd limit{};               // for Converged
  std::vector<complexd> reduced;  // reduced marks, in input order
};

struct ClassifyOptions {
  double blowup_threshold = 50.0;  // reduced Im above this, with a monotone trend
  int trend_window = 5;
  double cauchy_tol = 1e-2;
};

/// Degenerate iff the reduced imaginary parts blow up with a monotone trend;
/// converged when the reduced tail is Cauchy; otherwise inconclusive.
SequenceVerdict classify_sequence(const std::vector<complexd>& taus,
                                  const ClassifyOptions& opt = {});

}  // namespace mmt
