#pragma once

namespace mmt {

// Small-energy threshold for harmonic replacement (target-dependent in
// principle; calibrated empirically for the unit sphere and flat-torus
// targets used here).
inline constexpr double kDefaultEps1 = 0.5;
// eps0 = eps1 / 12 per the tightening construction.
inline constexpr double kDefaultEps0 = kDefaultEps1 / 12.0;
// Sacks-Uhlenbeck threshold placeholder; the only contract is eps1 < eps_su.
inline constexpr double kDefaultEpsSU = 1.0;

inline constexpr double kDefaultReplaceTol = 1e-7;
inline constexpr int kDefaultReplaceMaxSweeps = 20000;

}  // namespace mmt
