#include "mmt/bubbling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mmt/interp.hpp"
#include "mmt/spectral.hpp"

namespace mmt {

MapSlice resample_mark_equivalent(const MapSlice& u, const ModuliPoint& p) {
  const Grid& g = u.grid;
  if (g.rows != g.cols) {
    throw std::invalid_argument("resample_mark_equivalent: square grids only");
  }
  const long n = static_cast<long>(g.rows);
  const long a = p.matrix[0], b = p.matrix[1], c = p.matrix[2], d = p.matrix[3];
  MapSlice out(Grid(g.rows, g.cols, Lattice(p.tau)), u.dim);
  out.frozen = u.frozen;
  for (long rp = 0; rp < n; ++rp) {      // b' index
    for (long cp = 0; cp < n; ++cp) {    // a' index
      // (a, b) = (d a' + b b', c a' + a b') mod 1: an index permutation.
      const std::size_t src = g.wrap_index(c * cp + a * rp, d * cp + b * rp);
      const std::size_t dst = g.index(static_cast<std::size_t>(rp), static_cast<std::size_t>(cp));
      std::copy(u.node(src), u.node(src) + u.dim, out.node(dst));
    }
  }
  return out;
}

RealField ball_energy_field(const MapSlice& u, double radius) {
  const Grid& g = u.grid;
  const double w = g.lattice.tau.imag() * g.cell_area_param();
  const RealField density = dirichlet_density(u);
  ComplexField val(g), ind(g);
  for (std::size_t i = 0; i < g.size(); ++i) val[i] = complexd(0.5 * density[i] * w, 0.0);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      const double dist = torus_distance(0.0, 0.0, g.x_of(c), g.y_of(r), g.lattice.tau);
      const bool in = dist < radius && std::abs(dist - radius) > 1e-12;
      ind.at(r, c) = complexd(in ? 1.0 : 0.0, 0.0);
    }
  }
  // Correlation by the convolution theorem; the disk is symmetric, so the
  // coefficient product needs no conjugation.
  SpectralField sv = forward_transform(val), si = forward_transform(ind);
  const double scale = static_cast<double>(g.size());
  for (std::size_t i = 0; i < sv.coeff.size(); ++i) sv.coeff[i] *= si.coeff[i] * scale;
  ComplexField conv = inverse_transform(sv);
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = conv[i].real();
  return out;
}

namespace {

double torus_diameter(const Grid& g) {
  double worst = 0.0;
  for (std::size_t r = 0; r < g.rows; r += 2) {
    for (std::size_t c = 0; c < g.cols; c += 2) {
      worst = std::max(worst, torus_distance(0.0, 0.0, g.x_of(c), g.y_of(r), g.lattice.tau));
    }
  }
  return worst;
}

}  // namespace

ConcentrationField concentration_radii(const MapSlice& u, double eps1, int levels) {
  if (!(eps1 > 0.0)) throw std::invalid_argument("concentration_radii: eps1 must be positive");
  const Grid& g = u.grid;
  ConcentrationField out;
  out.cap = torus_diameter(g);
  out.radii = RealField(g, 0.0);
  std::vector<std::uint8_t> assigned(g.size(), 0);
  double radius = out.cap;
  for (int level = 0; level < levels; ++level) {
    const RealField e = ball_energy_field(u, radius);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!assigned[i] && e[i] <= eps1) {
        out.radii[i] = radius;
        assigned[i] = 1;
      }
    }
    radius *= 0.5;
  }
  // Positive floor for nodes whose smallest dyadic ball still exceeds eps1.
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!assigned[i]) out.radii[i] = radius;
  }
  return out;
}

namespace {

struct Center {
  std::size_t node;
  double ca, cb;
};

std::vector<Center> cluster_trend_nodes(const Grid& g, const std::vector<std::size_t>& nodes,
                                        const RealField& r_last, int stride) {
  std::vector<Center> centers;
  std::vector<std::uint8_t> visited(g.size(), 0);
  std::vector<std::uint8_t> marked(g.size(), 0);
  for (std::size_t i : nodes) marked[i] = 1;
  for (std::size_t seed : nodes) {
    if (visited[seed]) continue;
    // BFS over the stride sublattice.
    std::vector<std::size_t> stack = {seed};
    visited[seed] = 1;
    std::size_t best = seed;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      if (r_last[cur] < r_last[best]) best = cur;
      const long r = static_cast<long>(cur / g.cols), c = static_cast<long>(cur % g.cols);
      for (int dr = -2; dr <= 2; ++dr) {
        for (int dc = -2; dc <= 2; ++dc) {
          const std::size_t nb = g.wrap_index(r + dr * stride, c + dc * stride);
          if (marked[nb] && !visited[nb]) {
            visited[nb] = 1;
            stack.push_back(nb);
          }
        }
      }
    }
    centers.push_back({best, g.x_of(best % g.cols), g.y_of(best / g.cols)});
  }
  return centers;
}

}  // namespace

BubbleTree extract_bubbles(const std::vector<MapSlice>& sequence, double eps1,
                           const BubbleOptions& opt) {
  if (sequence.size() < 3) {
    throw std::invalid_argument(
        "extract_bubbles: need at least 3 slices to estimate radius trends");
  }
  for (const MapSlice& s : sequence) {
    if (!s.grid.same_shape(sequence.front().grid) || s.dim != sequence.front().dim) {
      throw std::invalid_argument("extract_bubbles: slices must share shape and target");
    }
  }
  const MapSlice& last = sequence.back();
  const Grid& g = last.grid;

  std::vector<ConcentrationField> fields;
  fields.reserve(sequence.size());
  for (const MapSlice& s : sequence) fields.push_back(concentration_radii(s, eps1));

  BubbleTree tree;
  tree.total_energy = energy(last);

  // Radius-trend nodes on the stride sublattice.
  std::vector<std::size_t> trend_nodes;
  const int stride = std::max(1, opt.coarse_stride);
  for (std::size_t r = 0; r < g.rows; r += static_cast<std::size_t>(stride)) {
    for (std::size_t c = 0; c < g.cols; c += static_cast<std::size_t>(stride)) {
      const std::size_t i = g.index(r, c);
      bool monotone = true;
      for (std::size_t n = 0; n + 1 < fields.size(); ++n) {
        if (fields[n + 1].radii[i] > fields[n].radii[i] * 1.0000001) monotone = false;
      }
      if (monotone && fields.back().radii[i] < opt.shrink_factor * fields.front().radii[i]) {
        trend_nodes.push_back(i);
      }
    }
  }

  const std::vector<Center> centers =
      cluster_trend_nodes(g, trend_nodes, fields.back().radii, stride);

  int max_depth = opt.max_depth;
  if (max_depth <= 0) {
    max_depth = std::min(4, static_cast<int>(std::ceil(tree.total_energy / eps1)));
  }

  if (centers.empty()) {
    tree.body_energy = tree.total_energy;
    tree.accounting_residual = 0.0;
    return tree;
  }

  // Region partition of the last slice: bubble disks, neck annuli, body rest.
  std::vector<double> rho_out(centers.size()), rho_in(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double sep = fields.back().cap;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (j == i) continue;
      sep = std::min(sep, torus_distance(centers[i].ca, centers[i].cb, centers[j].ca,
                                         centers[j].cb, g.lattice.tau));
    }
    rho_out[i] = std::min(0.5 * sep, 0.25 * fields.back().cap);
    rho_in[i] = std::min(2.0 * fields.back().radii[centers[i].node], 0.5 * rho_out[i]);
    rho_in[i] = std::max(rho_in[i], 2.0 / static_cast<double>(g.cols));
  }

  std::vector<std::uint8_t> bubble_mask(g.size(), 0), neck_mask(g.size(), 0);
  std::vector<std::vector<std::uint8_t>> per_bubble(centers.size(),
                                                    std::vector<std::uint8_t>(g.size(), 0));
  for (std::size_t node = 0; node < g.size(); ++node) {
    const double a = g.x_of(node % g.cols), b = g.y_of(node / g.cols);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double d = torus_distance(a, b, centers[i].ca, centers[i].cb, g.lattice.tau);
      if (d < rho_in[i]) {
        per_bubble[i][node] = 1;
        bubble_mask[node] = 1;
        break;
      }
      if (d < rho_out[i]) {
        neck_mask[node] = 1;
        break;
      }
    }
  }

  tree.residual_neck_energy = region_energy(last, &neck_mask).value;
  double bubbles_total = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    BubbleInfo info;
    info.ca = centers[i].ca;
    info.cb = centers[i].cb;
    for (const ConcentrationField& f : fields) info.scales.push_back(f.radii[centers[i].node]);
    info.energy = region_energy(last, &per_bubble[i]).value;
    bubbles_total += info.energy;

    // Recurse on the rescaled window around the center.
    if (max_depth > 1) {
      std::vector<MapSlice> window_seq;
      const std::size_t wg = opt.window_grid;
      Grid window_grid(wg, wg);
      const double tau1 = g.lattice.tau.real(), tau2 = g.lattice.tau.imag();
      const complexd center_plane =
          complexd(centers[i].ca, 0.0) + centers[i].cb * g.lattice.tau;
      for (std::size_t nslice = 0; nslice < sequence.size(); ++nslice) {
        const double scale = fields[nslice].radii[centers[i].node];
        const SliceInterpolant interp(sequence[nslice]);
        MapSlice wslice(window_grid, last.dim);
        std::vector<double> val(last.dim);
        for (std::size_t node = 0; node < window_grid.size(); ++node) {
          const double ya = (window_grid.x_of(node % wg) - 0.5) * 2.0 * opt.window_halfwidth;
          const double yb = (window_grid.y_of(node / wg) - 0.5) * 2.0 * opt.window_halfwidth;
          const complexd p = center_plane + scale * complexd(ya, yb);
          const double bb = p.imag() / tau2;
          const double aa = p.real() - bb * tau1;
          interp.evaluate(wrap01(aa), wrap01(bb), val);
          std::copy(val.begin(), val.end(), wslice.node(node));
        }
        window_seq.push_back(std::move(wslice));
      }
      BubbleOptions child_opt = opt;
      child_opt.max_depth = max_depth - 1;
      BubbleTree child = extract_bubbles(window_seq, eps1, child_opt);
      // Keep only children strictly inside the window (away from the seam).
      for (const BubbleInfo& cb : child.bubbles) {
        const double da = std::abs(cb.ca - 0.5), db = std::abs(cb.cb - 0.5);
        if (da < 0.25 && db < 0.25) info.children.push_back(cb);
      }
    }
    tree.bubbles.push_back(std::move(info));
  }

  std::vector<std::uint8_t> body_mask(g.size(), 0);
  for (std::size_t node = 0; node < g.size(); ++node) {
    body_mask[node] = (!bubble_mask[node] && !neck_mask[node]) ? 1 : 0;
  }
  tree.body_energy = region_energy(last, &body_mask).value;
  tree.has_body = true;
  const double sum = tree.body_energy + bubbles_total + tree.residual_neck_energy;
  tree.accounting_residual =
      std::abs(sum - tree.total_energy) / std::max(tree.total_energy, 1e-300);
  return tree;
}

NeckReport neck_report(const MapSlice& u, const CylinderRegion& region) {
  if (!(region.t_max > region.t_min)) {
    throw std::invalid_argument("neck_report: need t_max > t_min");
  }
  const Grid& g = u.grid;
  const double r_outer = std::exp(-region.t_min);
  if (r_outer > injectivity_radius(g.lattice.tau)) {
    throw std::domain_error("neck_report: annulus of outer radius " + std::to_string(r_outer) +
                            " exits the fundamental domain");
  }
  const std::size_t n_theta = region.n_theta;
  const std::size_t n_t =
      region.n_t > 0
          ? region.n_t
          : std::max<std::size_t>(
                8, static_cast<std::size_t>((region.t_max - region.t_min) /
                                            (kTwoPi / static_cast<double>(n_theta))));
  const double dt = (region.t_max - region.t_min) / static_cast<double>(n_t);
  const double dphi = kTwoPi / static_cast<double>(n_theta);

  const double tau1 = g.lattice.tau.real(), tau2 = g.lattice.tau.imag();
  const complexd center_plane = complexd(region.center_a, 0.0) + region.center_b * g.lattice.tau;
  const SliceInterpolant interp(u);

  // Chart samples w(t_k, phi_j), rows = t, cols = phi.
  std::vector<double> chart((n_t + 1) * n_theta * u.dim);
  std::vector<double> val(u.dim);
  for (std::size_t k = 0; k <= n_t; ++k) {
    const double t = region.t_min + dt * static_cast<double>(k);
    const double radius = std::exp(-t);
    for (std::size_t j = 0; j < n_theta; ++j) {
      const double phi = dphi * static_cast<double>(j);
      const complexd p = center_plane + std::polar(radius, phi);
      const double bb = p.imag() / tau2;
      const double aa = p.real() - bb * tau1;
      interp.evaluate(wrap01(aa), wrap01(bb), val);
      std::copy(val.begin(), val.end(), chart.begin() + ((k * n_theta + j) * u.dim));
    }
  }

  NeckReport rep;
  double i_t = 0.0, i_phi = 0.0;
  for (std::size_t k = 0; k < n_t; ++k) {
    for (std::size_t j = 0; j < n_theta; ++j) {
      const std::size_t jp = (j + 1) % n_theta;
      const double* w00 = chart.data() + ((k * n_theta + j) * u.dim);
      const double* w01 = chart.data() + ((k * n_theta + jp) * u.dim);
      const double* w10 = chart.data() + (((k + 1) * n_theta + j) * u.dim);
      const double* w11 = chart.data() + (((k + 1) * n_theta + jp) * u.dim);
      for (std::size_t c = 0; c < u.dim; ++c) {
        const double ut = 0.5 * ((w10[c] - w00[c]) + (w11[c] - w01[c])) / dt;
        const double up = 0.5 * ((w01[c] - w00[c]) + (w11[c] - w10[c])) / dphi;
        i_t += ut * ut * dt * dphi;
        i_phi += up * up * dt * dphi;
      }
    }
  }
  rep.e_total = 0.5 * (i_t + i_phi);
  rep.e_theta = 0.5 * i_phi;
  rep.ratio = rep.e_total > 0.0 ? rep.e_theta / rep.e_total : 0.0;
  rep.defect_lower_bound = (i_t - i_phi) / 8.0;
  return rep;
}

AlmostHarmonicResult nu_almost_harmonic_check(const MapSlice& u, const TargetManifold& n,
                                              const CylinderRegion& region, double nu,
                                              int samples, std::uint64_t seed,
                                              const ReplaceOptions& opt) {
  const Grid& g = u.grid;
  const complexd tau = g.lattice.tau;
  const double r_in = std::exp(-region.t_max), r_out = std::exp(-region.t_min);

  // Cylinder total int |grad u|^2 via the annulus node mask.
  std::vector<std::uint8_t> annulus(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = torus_distance(region.center_a, region.center_b, g.x_of(i % g.cols),
                                    g.y_of(i / g.cols), tau);
    annulus[i] = (d > r_in && d < r_out) ? 1 : 0;
  }
  const double cyl_integral = 2.0 * region_energy(u, &annulus).value;

  AlmostHarmonicResult out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double h = 1.0 / static_cast<double>(g.cols);
  for (int trial = 0;
       trial < 10 * samples && out.samples_used < static_cast<std::size_t>(samples); ++trial) {
    // A ball inside the annulus: center at distance d from the annulus
    // center, radius below both gap distances.
    const double d = r_in + (r_out - r_in) * unif(rng);
    const double ang = kTwoPi * unif(rng);
    const double max_r = 0.9 * std::min(d - r_in, r_out - d);
    if (max_r < 2.0 * h) continue;
    const complexd c_plane = complexd(region.center_a, 0.0) + region.center_b * tau +
                             std::polar(d, ang);
    Ball ball;
    ball.cb = c_plane.imag() / tau.imag();
    ball.ca = c_plane.real() - ball.cb * tau.real();
    ball.radius = (2.0 * h) + unif(rng) * (max_r - 2.0 * h);
    BallCollection coll;
    coll.balls = {ball};
    const BallCollection eighth = coll.scaled(1.0 / 8.0);
    if (mask_count(collection_mask(g, eighth)) == 0) continue;
    ReplaceOptions local = opt;
    local.eps1 = std::max(opt.eps1, energy(u, eighth) + 1.0);
    ReplaceResult r = harmonic_replace(u, n, eighth, local);
    const double dd = 2.0 * difference_energy(u, r.slice);
    const double ratio = cyl_integral > 0.0 ? dd / cyl_integral : 0.0;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_ball = ball;
    }
    ++out.samples_used;
  }
  out.ok = out.worst_ratio <= nu;
  return out;
}

double varifold_distance_simplified(const MapSlice& u, const MapSlice& v, int test_count) {
  if (u.dim != v.dim) {
    throw std::invalid_argument("varifold_distance_simplified: targets differ");
  }
  double scale = 0.0;
  for (const MapSlice* s : {&u, &v}) {
    for (std::size_t i = 0; i < s->grid.size(); ++i) {
      double n2 = 0.0;
      for (std::size_t c = 0; c < s->dim; ++c) n2 += s->node(i)[c] * s->node(i)[c];
      scale = std::max(scale, std::sqrt(n2));
    }
  }
  if (scale <= 0.0) scale = 1.0;
  const double sigma = 0.5 * scale;

  // Fixed deterministic family of Gaussian bumps in ambient space.
  std::mt19937_64 rng(9001);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> centers;
  for (int k = 0; k < test_count; ++k) {
    std::vector<double> p(u.dim);
    double n2 = 0.0;
    for (double& x : p) {
      x = gauss(rng);
      n2 += x * x;
    }
    const double s = scale / std::max(std::sqrt(n2), 1e-12);
    for (double& x : p) x *= s;
    centers.push_back(std::move(p));
  }

  auto integrals = [&](const MapSlice& s) {
    const SliceGradient grad = slice_gradient(s);
    const double w = s.grid.lattice.tau.imag() * s.grid.cell_area_param();
    std::vector<double> acc(centers.size(), 0.0);
    double total_area = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      const double* du = grad.du.data() + i * s.dim;
      const double* dv = grad.dv.data() + i * s.dim;
      double e = 0.0, f = 0.0, gg = 0.0;
      for (std::size_t c = 0; c < s.dim; ++c) {
        e += du[c] * du[c];
        f += du[c] * dv[c];
        gg += dv[c] * dv[c];
      }
      const double da = std::sqrt(std::max(0.0, e * gg - f * f)) * w;
      total_area += da;
      if (da == 0.0) continue;
      for (std::size_t k = 0; k < centers.size(); ++k) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < s.dim; ++c) {
          const double d = s.node(i)[c] - centers[k][c];
          d2 += d * d;
        }
        acc[k] += std::exp(-0.5 * d2 / (sigma * sigma)) * da;
      }
    }
    return std::make_pair(acc, total_area);
  };

  const auto [iu, area_u] = integrals(u);
  const auto [iv, area_v] = integrals(v);
  double worst = 0.0;
  for (std::size_t k = 0; k < iu.size(); ++k) worst = std::max(worst, std::abs(iu[k] - iv[k]));
  const double denom = area_u + area_v;
  return denom > 0.0 ? worst / denom : 0.0;
}

}  // namespace mmt
