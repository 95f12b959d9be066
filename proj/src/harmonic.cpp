#include "mmt/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "mmt/interp.hpp"

namespace mmt {

namespace {

// Discrete energy as the quadratic form E = 1/2 u^T L u per component with
//   L = w (A Da^T Da + B Db^T Db + C (Da^T Db + Db^T Da)),
// Da, Db the fourth-order central differences and
//   A = 1 + tau1^2/tau2^2, B = 1/tau2^2, C = -tau1/tau2^2
// from |u_u|^2 + |u_v|^2 with u_v = (Db u - tau1 Da u)/tau2.
struct FormStencil {
  const Grid& grid;
  double A, B, C, w;
  double inv12a, inv12b;
  double diag;  // L_ii
  // conv(ca, ca) at offsets -4..4 in units of (1/(12 h))^2.
  static constexpr std::array<double, 9> kConv2 = {1.0,  -16.0, 64.0,  16.0, -130.0,
                                                   16.0, 64.0,  -16.0, 1.0};
  // Derivative stencil at offsets -2..2 in units of 1/(12 h).
  static constexpr std::array<double, 5> kD1 = {1.0, -8.0, 0.0, 8.0, -1.0};

  explicit FormStencil(const Grid& g) : grid(g) {
    const double tau1 = g.lattice.tau.real(), tau2 = g.lattice.tau.imag();
    const double ha = 1.0 / static_cast<double>(g.cols);
    const double hb = 1.0 / static_cast<double>(g.rows);
    A = 1.0 + tau1 * tau1 / (tau2 * tau2);
    B = 1.0 / (tau2 * tau2);
    C = -tau1 / (tau2 * tau2);
    w = tau2 * ha * hb;
    inv12a = 1.0 / (12.0 * ha);
    inv12b = 1.0 / (12.0 * hb);
    diag = w * 130.0 * (A * inv12a * inv12a + B * inv12b * inv12b);
  }

  // (L u)_i for every component, written into s (length dim).
  void gradient(const MapSlice& u, long r, long c, double* s) const {
    const std::size_t dim = u.dim;
    for (std::size_t k = 0; k < dim; ++k) s[k] = 0.0;
    // A Da^2 + B Db^2 parts.
    for (int o = -4; o <= 4; ++o) {
      const double c2 = kConv2[static_cast<std::size_t>(o + 4)];
      if (o == 0) continue;
      const double* ua = u.node(grid.wrap_index(r, c + o));
      const double* ub = u.node(grid.wrap_index(r + o, c));
      const double fa = A * inv12a * inv12a * c2;
      const double fb = B * inv12b * inv12b * c2;
      for (std::size_t k = 0; k < dim; ++k) s[k] += fa * ua[k] + fb * ub[k];
    }
    {
      const double* uc = u.node(grid.wrap_index(r, c));
      const double f0 = (A * inv12a * inv12a + B * inv12b * inv12b) * kConv2[4];
      for (std::size_t k = 0; k < dim; ++k) s[k] += f0 * uc[k];
    }
    // Cross term 2 C Da Db.
    if (C != 0.0) {
      for (int ka = -2; ka <= 2; ++ka) {
        if (ka == 0) continue;
        for (int kb = -2; kb <= 2; ++kb) {
          if (kb == 0) continue;
          const double f = 2.0 * C * kD1[static_cast<std::size_t>(ka + 2)] * inv12a *
                           kD1[static_cast<std::size_t>(kb + 2)] * inv12b;
          const double* un = u.node(grid.wrap_index(r + kb, c + ka));
          for (std::size_t k = 0; k < dim; ++k) s[k] += f * un[k];
        }
      }
    }
    // (L u)_i = -w (A Da^2 + B Db^2 + 2C DaDb) u.
    for (std::size_t k = 0; k < dim; ++k) s[k] *= -w;
  }
};

}  // namespace

LocalForm energy_local_form(const MapSlice& u, std::size_t node) {
  const FormStencil form(u.grid);
  LocalForm out;
  out.gradient.resize(u.dim);
  out.diagonal = form.diag;
  form.gradient(u, static_cast<long>(node / u.grid.cols), static_cast<long>(node % u.grid.cols),
                out.gradient.data());
  return out;
}

ReplaceResult harmonic_replace(const MapSlice& u0, const TargetManifold& n,
                               const BallCollection& balls, const ReplaceOptions& opt) {
  if (u0.dim != n.ambient_dim()) {
    throw std::invalid_argument("harmonic_replace: slice dimension does not match target");
  }
  const Grid& g = u0.grid;
  auto mask = collection_mask(g, balls);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (u0.is_frozen(i)) mask[i] = 0;
  }

  ReplaceResult out;
  out.energy_before = energy(u0);

  const double ball_energy = region_energy(u0, &mask).value;
  if (ball_energy > opt.eps1) {
    throw std::domain_error("harmonic_replace: energy on collection is " +
                            std::to_string(ball_energy) + " > eps1 = " +
                            std::to_string(opt.eps1));
  }

  std::vector<std::size_t> order;
  for (int color = 0; color < 2; ++color) {
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t c = 0; c < g.cols; ++c) {
        if (mask[g.index(r, c)] && static_cast<int>((r + c) % 2) == color) {
          order.push_back(g.index(r, c));
        }
      }
    }
  }

  out.slice = u0;
  if (order.empty()) {
    out.converged = true;
    out.energy_after = out.energy_before;
    return out;
  }

  MapSlice& u = out.slice;
  const FormStencil form(g);
  const std::size_t dim = u.dim;
  std::vector<double> s(dim), m(dim), cand(dim), trial(dim);

  int stalled = 0;
  const double stall_scale = 1e-16 * std::max(1.0, out.energy_before);
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double max_move = 0.0;
    double sweep_drop = 0.0;
    for (std::size_t i : order) {
      const long r = static_cast<long>(i / g.cols), c = static_cast<long>(i % g.cols);
      form.gradient(u, r, c, s.data());
      double* ui = u.node(i);
      for (std::size_t k = 0; k < dim; ++k) m[k] = ui[k] - s[k] / form.diag;
      double best_de = 0.0;
      bool accepted = false;
      double t = 1.0;
      for (int tries = 0; tries < 24; ++tries) {
        for (std::size_t k = 0; k < dim; ++k) trial[k] = ui[k] + t * (m[k] - ui[k]);
        bool ok = true;
        try {
          n.project(trial, cand);
        } catch (const std::domain_error&) {
          ok = false;
        }
        if (ok) {
          double de = 0.0, move2 = 0.0;
          for (std::size_t k = 0; k < dim; ++k) {
            const double d = cand[k] - ui[k];
            de += s[k] * d + 0.5 * form.diag * d * d;
            move2 += d * d;
          }
          if (de <= 0.0) {
            best_de = de;
            accepted = true;
            max_move = std::max(max_move, std::sqrt(move2));
            std::copy(cand.begin(), cand.end(), ui);
            break;
          }
        }
        t *= 0.5;
      }
      if (accepted) sweep_drop -= best_de;
    }
    out.sweeps = sweep;
    out.max_move = max_move;
    if (max_move < opt.tol) {
      out.converged = true;
      break;
    }
    if (sweep_drop < stall_scale) {
      if (++stalled >= 2) {
        out.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }

  // Constrained Euler-Lagrange residual: tangential part of (L u)_i.
  std::vector<double> tan(dim);
  double worst = 0.0;
  for (std::size_t i : order) {
    const long r = static_cast<long>(i / g.cols), c = static_cast<long>(i % g.cols);
    form.gradient(u, r, c, s.data());
    std::copy(s.begin(), s.end(), tan.begin());
    n.tangent_project(std::span<const double>(u.node(i), dim), tan);
    double t2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) t2 += tan[k] * tan[k];
    worst = std::max(worst, std::sqrt(t2));
  }
  out.el_residual = worst / form.diag;
  out.energy_after = energy(u);
  return out;
}

ReplaceResult harmonic_replace_iterated(const MapSlice& u, const TargetManifold& n,
                                        const BallCollection& b1, const BallCollection& b2,
                                        const ReplaceOptions& opt) {
  ReplaceResult first = harmonic_replace(u, n, b1, opt);
  ReplaceResult second = harmonic_replace(first.slice, n, b2, opt);
  second.energy_before = first.energy_before;
  second.converged = first.converged && second.converged;
  return second;
}

double energy_gap_defect(const MapSlice& u, const MapSlice& v,
                         const std::vector<std::uint8_t>* region) {
  const double eu = region_energy(u, region).value;
  const double ev = region_energy(v, region).value;
  return (eu - ev) - 0.5 * difference_energy(u, v, region);
}

ContinuityProbeReport replacement_continuity_probe(const MapSlice& u1, const MapSlice& u2,
                                                   const TargetManifold& n, const Ball& ball,
                                                   const ReplaceOptions& opt) {
  BallCollection coll;
  coll.balls = {ball};
  ReplaceResult w1 = harmonic_replace(u1, n, coll, opt);
  ReplaceResult w2 = harmonic_replace(u2, n, coll, opt);
  ContinuityProbeReport rep;
  const auto mask = collection_mask(u1.grid, coll);
  const double e1 = region_energy(w1.slice, &mask).value;
  const double e2 = region_energy(w2.slice, &mask).value;
  rep.energy_gap = std::abs(e1 - e2);
  rep.c0_dist = sup_distance(u1, u2);
  rep.grad_dist = gradient_l2_distance(u1, u2);
  const double e_sum = region_energy(u1, &mask).value + region_energy(u2, &mask).value;
  rep.bound_shape = rep.c0_dist * e_sum + rep.grad_dist * std::sqrt(e_sum);
  return rep;
}

CourantLebesgueResult courant_lebesgue_radius(const MapSlice& u, const Ball& outer) {
  const Grid& g = u.grid;
  const complexd tau = g.lattice.tau;
  if (outer.radius > injectivity_radius(tau)) {
    throw std::domain_error("courant_lebesgue_radius: ball of radius " +
                            std::to_string(outer.radius) + " does not embed in the torus");
  }
  const RealField density = dirichlet_density(u);
  const double w = tau.imag() * g.cell_area_param();

  BallCollection coll;
  coll.balls = {outer};
  const auto mask = collection_mask(g, coll);
  double ball_int = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) ball_int += density[i] * w;
  }

  const complexd center_plane = complexd(outer.ca, 0.0) + outer.cb * tau;
  constexpr int kRadii = 33;
  constexpr int kArc = 256;
  CourantLebesgueResult best;
  best.ball_energy = ball_int;
  double best_val = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kRadii; ++j) {
    const double r =
        outer.radius * (0.75 + 0.25 * static_cast<double>(j) / static_cast<double>(kRadii - 1));
    double circ = 0.0;
    for (int k = 0; k < kArc; ++k) {
      const double theta = kTwoPi * static_cast<double>(k) / kArc;
      const complexd p = center_plane + std::polar(r, theta);
      const double bcoord = p.imag() / tau.imag();
      const double acoord = p.real() - bcoord * tau.real();
      circ += bilinear_periodic(density, acoord, bcoord);
    }
    circ *= kTwoPi * r / kArc;
    if (circ < best_val) {
      best_val = circ;
      best.radius = r;
      best.boundary_energy = circ;
    }
  }
  return best;
}

CollarResult collar_interpolate(std::span<const double> f, std::span<const double> g,
                                std::size_t dim, double R, double rho,
                                const TargetManifold& n, double max_gap2) {
  if (dim == 0 || f.size() != g.size() || f.size() % dim != 0) {
    throw std::invalid_argument("collar_interpolate: inconsistent loop buffers");
  }
  if (!(rho > 0.0) || rho > 0.5 * R) {
    throw std::invalid_argument("collar_interpolate: need rho in (0, R/2]");
  }
  const std::size_t K = f.size() / dim;
  const double dtheta = kTwoPi / static_cast<double>(K);

  // Agreement node.
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = f[k * dim + c] - g[k * dim + c];
      d2 += d * d;
    }
    min_gap = std::min(min_gap, d2);
  }
  if (min_gap > 1e-16 * n.scale() * n.scale()) {
    throw std::domain_error("collar_interpolate: loops agree at no node");
  }

  // Loop Dirichlet integrals I = int |d loop / d theta|^2 d theta.
  auto loop_integral = [&](auto&& value) {
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t kp = (k + 1) % K, km = (k + K - 1) % K;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = (value(kp, c) - value(km, c)) / (2.0 * dtheta);
        acc += d * d;
      }
    }
    return acc * dtheta;
  };
  const double i_f = loop_integral([&](std::size_t k, std::size_t c) { return f[k * dim + c]; });
  const double i_g = loop_integral([&](std::size_t k, std::size_t c) { return g[k * dim + c]; });
  const double i_fg = loop_integral(
      [&](std::size_t k, std::size_t c) { return f[k * dim + c] - g[k * dim + c]; });
  if (i_fg > max_gap2) {
    throw std::domain_error("collar_interpolate: boundary energy difference " +
                            std::to_string(i_fg) + " above configured bound");
  }

  CollarResult out;
  out.n_theta = K;
  out.bound = std::sqrt(i_f + i_g) * std::sqrt(i_fg);
  out.rho_eff = rho * std::min(1.0, std::sqrt(i_fg / (i_f + i_g + 1e-300)));
  if (out.rho_eff < 1e-14 * R) {
    out.rho_eff = 0.0;
    out.n_r = 1;
    out.w.assign(f.begin(), f.end());
    out.energy = 0.0;
    return out;
  }

  const double arc_step = R * dtheta;
  out.n_r = std::max<std::size_t>(3, static_cast<std::size_t>(out.rho_eff / arc_step) + 2);
  out.w.assign(out.n_r * K * dim, 0.0);
  std::vector<double> buf(dim), proj(dim);
  for (std::size_t j = 0; j < out.n_r; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(out.n_r - 1);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t c = 0; c < dim; ++c) {
        buf[c] = (1.0 - t) * g[k * dim + c] + t * f[k * dim + c];
      }
      try {
        n.project(buf, proj);
      } catch (const std::domain_error&) {
        throw std::domain_error(
            "collar_interpolate: interpolant leaves the tubular neighborhood of the target");
      }
      std::copy(proj.begin(), proj.end(), out.w.begin() + (j * K + k) * dim);
    }
  }

  // Cell-based energy in polar coordinates (dr^2 + r^2 dtheta^2).
  const double dr = out.rho_eff / static_cast<double>(out.n_r - 1);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < out.n_r; ++j) {
    const double rmid = R - out.rho_eff + dr * (static_cast<double>(j) + 0.5);
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t kp = (k + 1) % K;
      const double* w00 = out.w.data() + (j * K + k) * dim;
      const double* w01 = out.w.data() + (j * K + kp) * dim;
      const double* w10 = out.w.data() + ((j + 1) * K + k) * dim;
      const double* w11 = out.w.data() + ((j + 1) * K + kp) * dim;
      double wr2 = 0.0, wt2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double wr = 0.5 * ((w10[c] - w00[c]) + (w11[c] - w01[c])) / dr;
        const double wt = 0.5 * ((w01[c] - w00[c]) + (w11[c] - w10[c])) / dtheta;
        wr2 += wr * wr;
        wt2 += wt * wt;
      }
      acc += (wr2 + wt2 / (rmid * rmid)) * rmid * dr * dtheta;
    }
  }
  out.energy = acc;
  return out;
}

std::vector<BallCollection> dyadic_ball_family(const Grid& g, std::size_t centers_per_axis,
                                               int levels, double base_radius) {
  const complexd tau = g.lattice.tau;
  if (base_radius <= 0.0) base_radius = 0.9 * injectivity_radius(tau);
  std::vector<BallCollection> family;
  for (std::size_t i = 0; i < centers_per_axis; ++i) {
    for (std::size_t j = 0; j < centers_per_axis; ++j) {
      for (int l = 0; l < levels; ++l) {
        Ball b;
        b.ca = static_cast<double>(i) / static_cast<double>(centers_per_axis);
        b.cb = static_cast<double>(j) / static_cast<double>(centers_per_axis);
        b.radius = base_radius / static_cast<double>(1 << l);
        BallCollection c;
        c.balls = {b};
        family.push_back(std::move(c));
      }
    }
  }
  return family;
}

std::vector<BallCollection> density_adapted_family(const MapSlice& u,
                                                   std::size_t centers_per_axis, int levels,
                                                   std::size_t density_centers) {
  const Grid& g = u.grid;
  std::vector<BallCollection> family = dyadic_ball_family(g, centers_per_axis, levels);
  if (density_centers == 0) return family;

  const RealField density = dirichlet_density(u);
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });

  const double base = 0.9 * injectivity_radius(g.lattice.tau);
  const double min_sep = base / static_cast<double>(1 << (levels - 1));
  std::vector<std::pair<double, double>> picked;
  for (std::size_t i : order) {
    if (picked.size() >= density_centers) break;
    const double ca = g.x_of(i % g.cols), cb = g.y_of(i / g.cols);
    bool far = true;
    for (const auto& [pa, pb] : picked) {
      if (torus_distance(ca, cb, pa, pb, g.lattice.tau) < min_sep) {
        far = false;
        break;
      }
    }
    if (!far) continue;
    picked.emplace_back(ca, cb);
    for (int l = 0; l < levels; ++l) {
      Ball b;
      b.ca = ca;
      b.cb = cb;
      b.radius = base / static_cast<double>(1 << l);
      BallCollection c;
      c.balls = {b};
      family.push_back(std::move(c));
    }
  }
  return family;
}

MaxDecreaseResult max_energy_decrease(const MapSlice& u, const TargetManifold& n, double epsilon,
                                      const std::vector<BallCollection>& family,
                                      const ReplaceOptions& opt) {
  MaxDecreaseResult out;
  const double e_u = energy(u);
  ReplaceOptions local = opt;
  local.eps1 = std::max(opt.eps1, epsilon);
  for (const BallCollection& coll : family) {
    if (coll.empty()) continue;
    if (energy(u, coll) > epsilon) continue;
    const BallCollection half = coll.scaled(0.5);
    if (mask_count(collection_mask(u.grid, half)) == 0) continue;
    out.family_empty = false;
    ReplaceResult rep = harmonic_replace(u, n, half, local);
    const double drop = e_u - rep.energy_after;
    if (drop > out.e_value) {
      out.e_value = drop;
      out.argmax = coll;
    }
  }
  return out;
}

ComparisonReport comparison_probe(const MapSlice& u, const TargetManifold& n,
                                  const BallCollection& b1, const BallCollection& b2,
                                  const ReplaceOptions& opt) {
  for (const BallCollection* b : {&b1, &b2}) {
    const double e = energy(u, *b);
    if (e > opt.eps1 / 3.0) {
      throw std::domain_error("comparison_probe: E(u, B_i) = " + std::to_string(e) +
                              " exceeds eps1/3 = " + std::to_string(opt.eps1 / 3.0));
    }
  }
  ComparisonReport rep;
  rep.e_u = energy(u);
  ReplaceResult h1 = harmonic_replace(u, n, b1, opt);
  rep.e_h1 = h1.energy_after;
  rep.e_h12 = harmonic_replace(h1.slice, n, b2, opt).energy_after;
  rep.e_half2 = harmonic_replace(u, n, b2.scaled(0.5), opt).energy_after;
  for (std::size_t i = 0; i < rep.mu.size(); ++i) {
    rep.e_2mu2[i] = harmonic_replace(u, n, b2.scaled(2.0 * rep.mu[i]), opt).energy_after;
    rep.e_h1_mu2[i] = harmonic_replace(h1.slice, n, b2.scaled(rep.mu[i]), opt).energy_after;
  }
  return rep;
}

}  // namespace mmt
