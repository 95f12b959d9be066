#include "mmt/balls.hpp"

#include <cmath>

#include "mmt/interp.hpp"

namespace mmt {

double torus_distance(double a0, double b0, double a1, double b1, complexd tau) {
  const double da = wrap_half(a1 - a0);
  const double db = wrap_half(b1 - b0);
  double best = std::numeric_limits<double>::infinity();
  for (int s1 = -1; s1 <= 1; ++s1) {
    for (int s2 = -1; s2 <= 1; ++s2) {
      const complexd v = complexd(da + s1, 0.0) + (db + s2) * tau;
      best = std::min(best, std::abs(v));
    }
  }
  return best;
}

bool pairwise_disjoint(const BallCollection& c, complexd tau) {
  for (std::size_t i = 0; i < c.balls.size(); ++i) {
    for (std::size_t j = i + 1; j < c.balls.size(); ++j) {
      const double d = torus_distance(c.balls[i].ca, c.balls[i].cb, c.balls[j].ca,
                                      c.balls[j].cb, tau);
      if (d <= c.balls[i].radius + c.balls[j].radius) return false;
    }
  }
  return true;
}

std::vector<std::uint8_t> collection_mask(const Grid& g, const BallCollection& c) {
  std::vector<std::uint8_t> mask(g.size(), 0);
  const complexd tau = g.lattice.tau;
  for (const Ball& b : c.balls) {
    if (b.radius <= 0.0) continue;
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t cc = 0; cc < g.cols; ++cc) {
        const double d = torus_distance(b.ca, b.cb, g.x_of(cc), g.y_of(r), tau);
        if (d < b.radius && std::abs(d - b.radius) > 1e-12) mask[g.index(r, cc)] = 1;
      }
    }
  }
  return mask;
}

std::size_t mask_count(const std::vector<std::uint8_t>& mask) {
  std::size_t n = 0;
  for (std::uint8_t m : mask) n += m;
  return n;
}

double injectivity_radius(complexd tau) {
  double best = std::numeric_limits<double>::infinity();
  for (int s1 = -2; s1 <= 2; ++s1) {
    for (int s2 = -2; s2 <= 2; ++s2) {
      if (s1 == 0 && s2 == 0) continue;
      best = std::min(best, std::abs(complexd(s1, 0.0) + static_cast<double>(s2) * tau));
    }
  }
  return 0.5 * best;
}

}  // namespace mmt
