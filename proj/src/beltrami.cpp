#include "mmt/beltrami.hpp"

#include <array>
#include <cmath>

#include "mmt/interp.hpp"

namespace mmt {

namespace {

ComplexField mu_times_one_plus(const ComplexField& mu, const ComplexField& h) {
  ComplexField out(mu.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu[i] * (1.0 + h[i]);
  return out;
}

}  // namespace

UniformizationResult solve_periodic_beltrami(const BeltramiField& b, const SolverOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("solve_periodic_beltrami: tol must be > 0");
  if (b.bound_k >= 1.0) {
    throw std::invalid_argument("solve_periodic_beltrami: sup|mu| = " +
                                std::to_string(b.bound_k) + " >= 1");
  }
  const Grid& g = b.grid();
  ComplexField h(g);
  double prev_change = -1.0;
  double contraction_max = 0.0;
  int iterations = 0;
  bool converged = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    ComplexField t = mu_times_one_plus(b.mu, h);
    ComplexField h_next = beurling(remove_mean(t));
    const double change = l2_distance(h_next, h);
    if (prev_change > 1e-300) {
      contraction_max = std::max(contraction_max, change / prev_change);
    }
    h = std::move(h_next);
    prev_change = change;
    iterations = it;
    if (change < opt.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergenceError("solve_periodic_beltrami: no convergence after " +
                                  std::to_string(opt.max_iter) +
                                  " iterations, last change " + std::to_string(prev_change),
                              prev_change);
  }

  UniformizationResult res;
  ComplexField t = mu_times_one_plus(b.mu, h);
  res.g0_mean = t.mean();
  ComplexField phi = remove_mean(t);
  res.scale_a = 1.0 / (1.0 + res.g0_mean);
  res.mark = Lattice(complexd(0.0, 1.0) * (1.0 - res.g0_mean) / (1.0 + res.g0_mean));
  res.iterations = iterations;
  res.contraction_max = contraction_max;

  // Assemble w = A (z + g0 zbar + s - s(0)) with s = dbar_inverse(phi).
  ComplexField s = dbar_inverse(phi, 1e-8);
  const complexd s0 = s.samples[0];
  res.w_grid = ComplexField(g);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      const complexd z(g.x_of(c), g.y_of(r));
      res.w_grid.at(r, c) =
          res.scale_a * (z + res.g0_mean * std::conj(z) + s.at(r, c) - s0);
    }
  }

  // Residual of the assembled map: w_z = A (1 + beurling(phi)), w_zbar = A (g0 + phi).
  ComplexField hb = beurling(phi);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const complexd wz = 1.0 + hb[i];
    const complexd wzb = res.g0_mean + phi[i];
    num += std::norm(wzb - b.mu[i] * wz);
    den += std::norm(wz);
  }
  res.residual = std::sqrt(num / den);
  return res;
}

double min_forward_jacobian(const BeltramiField& b, const UniformizationResult& r) {
  // J = |w_z|^2 - |w_zbar|^2 up to |A|^2; evaluated spectrally on the source side.
  ComplexField w_unscaled = r.w_grid;
  for (std::size_t i = 0; i < w_unscaled.size(); ++i) w_unscaled[i] /= r.scale_a;
  // Remove the non-periodic part z + g0 zbar before transforming.
  const Grid& g = b.grid();
  for (std::size_t rr = 0; rr < g.rows; ++rr) {
    for (std::size_t cc = 0; cc < g.cols; ++cc) {
      const complexd z(g.x_of(cc), g.y_of(rr));
      w_unscaled.at(rr, cc) -= z + r.g0_mean * std::conj(z);
    }
  }
  ComplexField sz = d_z(w_unscaled), szb = d_zbar(w_unscaled);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double j = std::norm(1.0 + sz[i]) - std::norm(r.g0_mean + szb[i]);
    worst = std::min(worst, j);
  }
  return worst * std::norm(r.scale_a);
}

namespace {

// (a, b) coordinates of a point w in the {1, tau} parallelogram: w = a + b tau.
inline complexd ab_of(complexd w, complexd tau) {
  const double bcoord = w.imag() / tau.imag();
  return {w.real() - bcoord * tau.real(), bcoord};
}

// Inverse bilinear coordinates of p in the quad q00 + s e1 + t e2 + s t e3.
bool invert_bilinear(complexd q00, complexd e1, complexd e2, complexd e3, complexd p,
                     double& s, double& t) {
  s = 0.5;
  t = 0.5;
  for (int it = 0; it < 12; ++it) {
    const complexd f = q00 + s * e1 + t * e2 + (s * t) * e3 - p;
    const complexd js = e1 + t * e3;
    const complexd jt = e2 + s * e3;
    const double det = js.real() * jt.imag() - js.imag() * jt.real();
    if (std::abs(det) < 1e-300) return false;
    const double ds = (f.real() * jt.imag() - f.imag() * jt.real()) / det;
    const double dt = (js.real() * f.imag() - js.imag() * f.real()) / det;
    s -= ds;
    t -= dt;
    if (std::abs(ds) + std::abs(dt) < 1e-14) break;
  }
  const double eps = 1e-9;
  return s >= -eps && s <= 1.0 + eps && t >= -eps && t <= 1.0 + eps;
}

}  // namespace

void invert_map(const BeltramiField& b, UniformizationResult& res) {
  const Grid& src = b.grid();
  const complexd tau = res.mark.tau;
  const Grid dst(src.rows, src.cols, res.mark);
  const double ha = 1.0 / static_cast<double>(dst.cols);
  const double hb = 1.0 / static_cast<double>(dst.rows);
  const double hx = 1.0 / static_cast<double>(src.cols);
  const double hy = 1.0 / static_cast<double>(src.rows);

  // Forward graph in (a, b) coordinates, wrapped per node.
  std::vector<complexd> ab(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) ab[i] = ab_of(res.w_grid[i], tau);

  res.h_grid = ComplexField(dst);
  std::vector<unsigned char> filled(dst.size(), 0);

  // Cells with strongly negative orientation are genuine foldovers; cells
  // with tiny cross products are degenerate at grid level and are skipped
  // (their targets come from the neighbor fill).
  const double cell = hx * hy;
  const double fold_floor = -0.25 * cell;
  const double skip_floor = 1e-10 * cell;
  for (std::size_t r = 0; r < src.rows; ++r) {
    for (std::size_t c = 0; c < src.cols; ++c) {
      const complexd q00 = ab[src.index(r, c)];
      auto lift = [&](std::size_t rr, std::size_t cc) {
        const complexd q = ab[src.wrap_index(static_cast<long>(rr), static_cast<long>(cc))];
        return q00 + torus_diff(q, q00);
      };
      const complexd q10 = lift(r, c + 1);   // +x
      const complexd q01 = lift(r + 1, c);   // +y
      complexd q11 = ab[src.wrap_index(static_cast<long>(r) + 1, static_cast<long>(c) + 1)];
      q11 = q00 + torus_diff(q11, q00);
      const complexd e1 = q10 - q00, e2 = q01 - q00, e3 = q11 - q10 - q01 + q00;

      const double cross = e1.real() * e2.imag() - e1.imag() * e2.real();
      if (cross < fold_floor) {
        throw std::domain_error("invert_map: foldover (non-positive Jacobian) at source node (" +
                                std::to_string(r) + "," + std::to_string(c) + ")");
      }
      if (cross < skip_floor) continue;

      double amin = q00.real(), amax = q00.real();
      double bmin = q00.imag(), bmax = q00.imag();
      for (const complexd& q : {q10, q01, q11}) {
        amin = std::min(amin, q.real());
        amax = std::max(amax, q.real());
        bmin = std::min(bmin, q.imag());
        bmax = std::max(bmax, q.imag());
      }
      const long ka0 = static_cast<long>(std::ceil(amin / ha - 1e-12));
      const long ka1 = static_cast<long>(std::floor(amax / ha + 1e-12));
      const long kb0 = static_cast<long>(std::ceil(bmin / hb - 1e-12));
      const long kb1 = static_cast<long>(std::floor(bmax / hb + 1e-12));
      for (long kb = kb0; kb <= kb1; ++kb) {
        for (long ka = ka0; ka <= ka1; ++ka) {
          const std::size_t di = dst.wrap_index(kb, ka);
          if (filled[di]) continue;
          const complexd p(static_cast<double>(ka) * ha, static_cast<double>(kb) * hb);
          double s, t;
          if (!invert_bilinear(q00, e1, e2, e3, p, s, t)) continue;
          res.h_grid[di] = complexd(wrap01((static_cast<double>(c) + s) * hx),
                                    wrap01((static_cast<double>(r) + t) * hy));
          filled[di] = 1;
        }
      }
    }
  }

  // Fallback fill for nodes missed by rasterization ties.
  std::size_t missing = 0;
  for (bool again = true; again;) {
    again = false;
    missing = 0;
    for (std::size_t r = 0; r < dst.rows; ++r) {
      for (std::size_t c = 0; c < dst.cols; ++c) {
        const std::size_t i = dst.index(r, c);
        if (filled[i]) continue;
        static constexpr std::array<std::array<long, 2>, 4> nb = {
            {{0, 1}, {0, -1}, {1, 0}, {-1, 0}}};
        bool done = false;
        for (const auto& d : nb) {
          const std::size_t j =
              dst.wrap_index(static_cast<long>(r) + d[0], static_cast<long>(c) + d[1]);
          if (!filled[j]) continue;
          res.h_grid[i] = complexd(wrap01(res.h_grid[j].real()), wrap01(res.h_grid[j].imag()));
          filled[i] = 2;
          done = true;
          break;
        }
        if (!done) {
          ++missing;
          again = true;
        }
      }
    }
    if (missing == dst.size()) {
      throw std::runtime_error("invert_map: rasterization produced no coverage");
    }
  }

  // Residual of h_wbar = -mu(h(w)) conj(h_w) by central differences on the
  // tau-side grid (differences unwrapped on the torus).
  const complexd tbar = std::conj(tau);
  const complexd denom = tbar - tau;
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < dst.rows; ++r) {
    for (std::size_t c = 0; c < dst.cols; ++c) {
      const complexd hc = res.h_grid.at(r, c);
      const complexd dxp = torus_diff(res.h_grid[dst.wrap_index(r, static_cast<long>(c) + 1)], hc);
      const complexd dxm = torus_diff(res.h_grid[dst.wrap_index(r, static_cast<long>(c) - 1)], hc);
      const complexd dyp = torus_diff(res.h_grid[dst.wrap_index(static_cast<long>(r) + 1, c)], hc);
      const complexd dym = torus_diff(res.h_grid[dst.wrap_index(static_cast<long>(r) - 1, c)], hc);
      const complexd h_a = (dxp - dxm) / (2.0 * ha);
      const complexd h_b = (dyp - dym) / (2.0 * hb);
      const complexd h_w = (tbar * h_a - h_b) / denom;
      const complexd h_wb = (h_b - tau * h_a) / denom;
      const complexd mu_at_h = bilinear_periodic(b.mu, hc.real(), hc.imag());
      num += std::norm(h_wb + mu_at_h * std::conj(h_w));
      den += std::norm(h_w);
    }
  }
  res.cr2_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
}

MapFunctionals inverse_map_functionals(const UniformizationResult& r, const MetricField& g) {
  const Grid& dst = r.h_grid.grid;
  const complexd tau = r.mark.tau;
  const double tau1 = tau.real(), tau2 = tau.imag();
  const double ha = 1.0 / static_cast<double>(dst.cols);
  const double hb = 1.0 / static_cast<double>(dst.rows);
  const double cell = tau2 * ha * hb;

  MapFunctionals out;
  for (std::size_t rr = 0; rr < dst.rows; ++rr) {
    for (std::size_t cc = 0; cc < dst.cols; ++cc) {
      const complexd hc = r.h_grid.at(rr, cc);
      // Fourth-order central differences of the unwrapped graph.
      auto sample = [&](long dr, long dc) {
        return torus_diff(r.h_grid[dst.wrap_index(static_cast<long>(rr) + dr,
                                                  static_cast<long>(cc) + dc)],
                          hc);
      };
      const complexd h_a =
          (8.0 * (sample(0, 1) - sample(0, -1)) - (sample(0, 2) - sample(0, -2))) / (12.0 * ha);
      const complexd h_b =
          (8.0 * (sample(1, 0) - sample(-1, 0)) - (sample(2, 0) - sample(-2, 0))) / (12.0 * hb);
      // Conformal coordinates on T^2_tau: d/du = d/da, d/dv = (d/db - tau1 d/da)/tau2.
      const complexd h_u = h_a;
      const complexd h_v = (h_b - tau1 * h_a) / tau2;

      const double g11 = bilinear_periodic(g.g11, hc.real(), hc.imag());
      const double g12 = bilinear_periodic(g.g12, hc.real(), hc.imag());
      const double g22 = bilinear_periodic(g.g22, hc.real(), hc.imag());
      auto quad = [&](complexd p, complexd q) {
        return g11 * p.real() * q.real() + g12 * (p.real() * q.imag() + p.imag() * q.real()) +
               g22 * p.imag() * q.imag();
      };
      const double E = quad(h_u, h_u), F = quad(h_u, h_v), G = quad(h_v, h_v);
      out.energy += 0.5 * (E + G) * cell;
      out.area += std::sqrt(std::max(0.0, E * G - F * F)) * cell;
    }
  }
  return out;
}

UniformizationResult uniformize(const MetricField& g, double delta, double tol, int max_iter) {
  const MetricField reg = regularize(g, delta);
  const BeltramiField b = metric_to_beltrami(reg);
  SolverOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  UniformizationResult res = solve_periodic_beltrami(b, opt);
  invert_map(b, res);
  const MapFunctionals mf = inverse_map_functionals(res, reg);
  res.conformal_defect = mf.energy - mf.area;
  return res;
}

ContinuityReport continuity_probe(const BeltramiField& mu_a, const BeltramiField& mu_b,
                                  const SolverOptions& opt) {
  UniformizationResult ra = solve_periodic_beltrami(mu_a, opt);
  UniformizationResult rb = solve_periodic_beltrami(mu_b, opt);
  invert_map(mu_a, ra);
  invert_map(mu_b, rb);

  ContinuityReport rep;
  for (std::size_t i = 0; i < ra.w_grid.size(); ++i) {
    rep.d_sup_w = std::max(rep.d_sup_w, std::abs(ra.w_grid[i] - rb.w_grid[i]));
  }
  // Inverses are compared through the shared (a, b) parametrization of their
  // marked tori, with torus distance on values.
  const Grid& dst = ra.h_grid.grid;
  const double ha = 1.0 / static_cast<double>(dst.cols);
  const double hbs = 1.0 / static_cast<double>(dst.rows);
  double grad_acc = 0.0;
  for (std::size_t r = 0; r < dst.rows; ++r) {
    for (std::size_t c = 0; c < dst.cols; ++c) {
      const std::size_t i = dst.index(r, c);
      rep.d_sup_h = std::max(rep.d_sup_h, std::abs(torus_diff(ra.h_grid[i], rb.h_grid[i])));
      auto grad = [&](const ComplexField& h) {
        const complexd hc = h[i];
        const complexd da =
            torus_diff(h[dst.wrap_index(r, static_cast<long>(c) + 1)], hc) / ha;
        const complexd db =
            torus_diff(h[dst.wrap_index(static_cast<long>(r) + 1, c)], hc) / hbs;
        return std::make_pair(da, db);
      };
      const auto [daa, dba] = grad(ra.h_grid);
      const auto [dab, dbb] = grad(rb.h_grid);
      grad_acc += std::norm(daa - dab) + std::norm(dba - dbb);
    }
  }
  rep.d_l2_grad = std::sqrt(grad_acc / static_cast<double>(dst.size()));
  return rep;
}

}  // namespace mmt
