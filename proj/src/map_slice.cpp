#include "mmt/map_slice.hpp"

#include <cmath>

namespace mmt {

MapSlice MapSlice::constant(const Grid& g, std::span<const double> point) {
  MapSlice u(g, point.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t c = 0; c < point.size(); ++c) u.node(i)[c] = point[c];
  }
  return u;
}

void MapSlice::project_all(const TargetManifold& n) {
  std::vector<double> buf(dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    n.project(std::span<const double>(node(i), dim), buf);
    std::copy(buf.begin(), buf.end(), node(i));
  }
}

double MapSlice::max_off_manifold(const TargetManifold& n) const {
  std::vector<double> buf(dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    n.project(std::span<const double>(node(i), dim), buf);
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) d2 += (buf[c] - node(i)[c]) * (buf[c] - node(i)[c]);
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

SliceGradient slice_gradient(const MapSlice& u) {
  const Grid& g = u.grid;
  const double tau1 = g.lattice.tau.real(), tau2 = g.lattice.tau.imag();
  const double ha = 1.0 / static_cast<double>(g.cols);
  const double hb = 1.0 / static_cast<double>(g.rows);
  SliceGradient out;
  out.du.assign(u.values.size(), 0.0);
  out.dv.assign(u.values.size(), 0.0);
  for (std::size_t r = 0; r < g.rows; ++r) {
    const long rl = static_cast<long>(r);
    for (std::size_t c = 0; c < g.cols; ++c) {
      const long cl = static_cast<long>(c);
      const double* xp1 = u.node(g.wrap_index(rl, cl + 1));
      const double* xm1 = u.node(g.wrap_index(rl, cl - 1));
      const double* xp2 = u.node(g.wrap_index(rl, cl + 2));
      const double* xm2 = u.node(g.wrap_index(rl, cl - 2));
      const double* yp1 = u.node(g.wrap_index(rl + 1, cl));
      const double* ym1 = u.node(g.wrap_index(rl - 1, cl));
      const double* yp2 = u.node(g.wrap_index(rl + 2, cl));
      const double* ym2 = u.node(g.wrap_index(rl - 2, cl));
      double* du = out.du.data() + g.index(r, c) * u.dim;
      double* dv = out.dv.data() + g.index(r, c) * u.dim;
      for (std::size_t k = 0; k < u.dim; ++k) {
        const double da = (8.0 * (xp1[k] - xm1[k]) - (xp2[k] - xm2[k])) / (12.0 * ha);
        const double db = (8.0 * (yp1[k] - ym1[k]) - (yp2[k] - ym2[k])) / (12.0 * hb);
        du[k] = da;
        dv[k] = (db - tau1 * da) / tau2;
      }
    }
  }
  return out;
}

RegionEnergy region_energy(const MapSlice& u, const std::vector<std::uint8_t>* region) {
  const Grid& g = u.grid;
  const double w = g.lattice.tau.imag() * g.cell_area_param();
  const SliceGradient grad = slice_gradient(u);
  RegionEnergy out;
  bool any = false;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (region && !(*region)[i]) continue;
    any = true;
    const double* du = grad.du.data() + i * u.dim;
    const double* dv = grad.dv.data() + i * u.dim;
    for (std::size_t k = 0; k < u.dim; ++k) acc += du[k] * du[k] + dv[k] * dv[k];
  }
  out.value = 0.5 * acc * w;
  out.empty_region = region && !any;
  return out;
}

double energy(const MapSlice& u) { return region_energy(u, nullptr).value; }

double energy(const MapSlice& u, const BallCollection& region) {
  const auto mask = collection_mask(u.grid, region);
  return region_energy(u, &mask).value;
}

double area(const MapSlice& u, const std::vector<std::uint8_t>* region) {
  const Grid& g = u.grid;
  const double w = g.lattice.tau.imag() * g.cell_area_param();
  const SliceGradient grad = slice_gradient(u);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (region && !(*region)[i]) continue;
    const double* du = grad.du.data() + i * u.dim;
    const double* dv = grad.dv.data() + i * u.dim;
    double e = 0.0, f = 0.0, gg = 0.0;
    for (std::size_t k = 0; k < u.dim; ++k) {
      e += du[k] * du[k];
      f += du[k] * dv[k];
      gg += dv[k] * dv[k];
    }
    acc += std::sqrt(std::max(0.0, e * gg - f * f));
  }
  return acc * w;
}

double area(const MapSlice& u) { return area(u, nullptr); }

double difference_energy(const MapSlice& u, const MapSlice& v,
                         const std::vector<std::uint8_t>* region) {
  if (!u.grid.same_shape(v.grid) || u.dim != v.dim) {
    throw std::invalid_argument("difference_energy: incompatible slices");
  }
  MapSlice d = u;
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= v.values[i];
  return region_energy(d, region).value;
}

RealField dirichlet_density(const MapSlice& u) {
  const SliceGradient grad = slice_gradient(u);
  RealField out(u.grid);
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    const double* du = grad.du.data() + i * u.dim;
    const double* dv = grad.dv.data() + i * u.dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < u.dim; ++k) acc += du[k] * du[k] + dv[k] * dv[k];
    out[i] = acc;
  }
  return out;
}

double sup_distance(const MapSlice& u, const MapSlice& v) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.dim; ++k) {
      const double d = u.node(i)[k] - v.node(i)[k];
      d2 += d * d;
    }
    worst = std::max(worst, d2);
  }
  return std::sqrt(worst);
}

double gradient_l2_distance(const MapSlice& u, const MapSlice& v) {
  return std::sqrt(2.0 * difference_energy(u, v, nullptr));
}

SliceInterpolant::SliceInterpolant(const MapSlice& u) {
  spectra_.reserve(u.dim);
  for (std::size_t k = 0; k < u.dim; ++k) {
    ComplexField comp(u.grid);
    for (std::size_t i = 0; i < u.grid.size(); ++i) comp[i] = complexd(u.node(i)[k], 0.0);
    spectra_.push_back(forward_transform(comp));
  }
}

void SliceInterpolant::evaluate(double a, double b, std::span<double> out) const {
  std::vector<complexd> vals(spectra_.size());
  spectral_evaluate_shared(spectra_, a, b, vals);
  for (std::size_t k = 0; k < spectra_.size(); ++k) out[k] = vals[k].real();
}

}  // namespace mmt
