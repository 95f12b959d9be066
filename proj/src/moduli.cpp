#include "mmt/moduli.hpp"
#include <cstdio>

#include <cmath>
#include <stdexcept>

namespace mmt {

bool in_fundamental_domain(complexd tau, double eps) {
  if (!(tau.imag() > 0.0)) return false;
  const double re = tau.real();
  const double mod = std::abs(tau);
  if (re <= -0.5 - eps || re > 0.5 + eps) return false;
  if (mod < 1.0 - eps) return false;
  if (std::abs(mod - 1.0) <= eps && re < -eps) return false;
  return true;
}

ModuliPoint reduce_to_fundamental_domain(complexd tau) {
  if (!(tau.imag() > 0.0)) {
    throw std::invalid_argument("reduce_to_fundamental_domain: Im(tau) must be positive");
  }
  ModuliPoint p;
  p.tau = tau;
  auto compose_left = [&](long a, long b, long c, long d) {
    // matrix <- [[a,b],[c,d]] * matrix
    const std::array<long, 4> m = p.matrix;
    p.matrix = {a * m[0] + b * m[2], a * m[1] + b * m[3], c * m[0] + d * m[2],
                c * m[1] + d * m[3]};
  };
  // The same tolerance must drive the S-step and the membership test, or
  // marks on the |tau| = 1 shell cycle forever.
  constexpr double kEps = 1e-12;
  const complexd input = tau;
  for (int step = 0; step < 10000; ++step) {
    // Shift Re into (-1/2, 1/2].
    const double n = std::ceil(p.tau.real() - 0.5 - 1e-15);
    if (n != 0.0) {
      p.tau -= n;
      const long ln = static_cast<long>(n);
      compose_left(1, -ln, 0, 1);
      for (long k = 0; k < std::labs(ln); ++k) p.word += (ln > 0) ? "T-" : "T";
    }
    const double mod = std::abs(p.tau);
    if (mod < 1.0 - kEps || (std::abs(mod - 1.0) <= kEps && p.tau.real() < -kEps)) {
      p.tau = -1.0 / p.tau;
      compose_left(0, -1, 1, 0);
      p.word += "S";
      continue;
    }
    if (in_fundamental_domain(p.tau, kEps)) return p;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "reduce_to_fundamental_domain: no convergence for tau = %.17g + %.17gi "
                "(reached %.17g + %.17gi)",
                input.real(), input.imag(), p.tau.real(), p.tau.imag());
  throw std::runtime_error(buf);
}

SequenceVerdict classify_sequence(const std::vector<complexd>& taus, const ClassifyOptions& opt) {
  if (taus.empty()) {
    throw std::invalid_argument("classify_sequence: empty mark sequence");
  }
  SequenceVerdict v;
  v.reduced.reserve(taus.size());
  for (complexd t : taus) v.reduced.push_back(reduce_to_fundamental_domain(t).tau);

  const std::size_t n = v.reduced.size();
  const std::size_t window = std::min<std::size_t>(n, static_cast<std::size_t>(opt.trend_window));
  bool monotone_up = window >= 2;
  for (std::size_t i = n - window; i + 1 < n; ++i) {
    if (!(v.reduced[i + 1].imag() >= v.reduced[i].imag())) monotone_up = false;
  }
  if (v.reduced.back().imag() > opt.blowup_threshold && monotone_up) {
    v.kind = SequenceVerdict::Kind::Degenerate;
    return v;
  }

  double spread = 0.0;
  for (std::size_t i = n - window; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      spread = std::max(spread, std::abs(v.reduced[i] - v.reduced[j]));
    }
  }
  if (spread <= opt.cauchy_tol) {
    v.kind = SequenceVerdict::Kind::Converged;
    complexd acc{};
    for (std::size_t i = n - window; i < n; ++i) acc += v.reduced[i];
    v.limit = acc / static_cast<double>(window);
    return v;
  }
  v.kind = SequenceVerdict::Kind::Inconclusive;
  return v;
}

}  // namespace mmt
