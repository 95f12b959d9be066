#include "mmt/sweepout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mmt/interp.hpp"
#include "mmt/threading.hpp"

namespace mmt {

std::vector<double> Sweepout::energies() const {
  std::vector<double> out(slices.size());
  for (std::size_t k = 0; k < slices.size(); ++k) out[k] = energy(slices[k]);
  return out;
}

std::vector<double> Sweepout::areas() const {
  std::vector<double> out(slices.size());
  for (std::size_t k = 0; k < slices.size(); ++k) out[k] = area(slices[k]);
  return out;
}

double Sweepout::max_energy() const {
  double m = 0.0;
  for (const MapSlice& s : slices) m = std::max(m, energy(s));
  return m;
}

double Sweepout::max_area() const {
  double m = 0.0;
  for (const MapSlice& s : slices) m = std::max(m, area(s));
  return m;
}

double Sweepout::continuity_measure() const {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < slices.size(); ++k) {
    const MapSlice& a = slices[k];
    const MapSlice& b = slices[k + 1];
    if (!a.grid.same_shape(b.grid) || a.dim != b.dim) continue;
    worst = std::max(worst, sup_distance(a, b) + gradient_l2_distance(a, b));
  }
  return worst;
}

// The constant patch must span several cells to survive mollification and
// to keep the Beltrami coefficient resolvable, and the mollifier must stay
// well below the patch scale; both are therefore floored by the grid step.
double effective_patch_radius(const SmoothingOptions& opt, const Grid& g) {
  const double h = std::max(1.0 / static_cast<double>(g.cols), 1.0 / static_cast<double>(g.rows));
  return std::max(opt.patch_radius, 5.0 * h);
}

double effective_width(const SmoothingOptions& opt, const Grid& g) {
  if (opt.width <= 0.0) return 0.0;
  const double h = std::max(1.0 / static_cast<double>(g.cols), 1.0 / static_cast<double>(g.rows));
  return std::max(opt.width, 0.75 * h);
}

Sweepout smooth_sweepout(const Sweepout& s, const TargetManifold& n,
                         const SmoothingOptions& opt, SmoothingReport* report) {
  if (opt.width < 0.0) throw std::invalid_argument("smooth_sweepout: width must be >= 0");
  Sweepout out = s;
  if (report) {
    report->energy_change.assign(s.slices.size(), 0.0);
    report->max_sup_change = 0.0;
  }
  for (std::size_t k = 1; k + 1 < s.slices.size(); ++k) {
    MapSlice& u = out.slices[k];
    const double e_before = energy(u);
    const Grid& g = u.grid;

    if (opt.apply_patch && opt.patch_radius > 0.0) {
      // Blend to the patch mean on the configured disk so the slice is
      // constant on a small region (and hence not harmonic unless constant).
      const double patch_r = effective_patch_radius(opt, g);
      std::vector<double> mean(u.dim, 0.0);
      double count = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = torus_distance(opt.patch_ca, opt.patch_cb, g.x_of(i % g.cols),
                                        g.y_of(i / g.cols), g.lattice.tau);
        if (d < 0.5 * patch_r) {
          for (std::size_t c = 0; c < u.dim; ++c) mean[c] += u.node(i)[c];
          count += 1.0;
        }
      }
      if (count > 0.0) {
        for (double& v : mean) v /= count;
        n.project(mean, mean);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double d = torus_distance(opt.patch_ca, opt.patch_cb, g.x_of(i % g.cols),
                                          g.y_of(i / g.cols), g.lattice.tau);
          if (d >= patch_r) continue;
          const double q = d / patch_r;
          // chi = 1 on the inner half of the disk, smoothly 0 at the rim.
          const double chi = q <= 0.5 ? 1.0 : std::pow(std::cos(kPi * (q - 0.5)), 2);
          for (std::size_t c = 0; c < u.dim; ++c) {
            u.node(i)[c] = (1.0 - chi) * u.node(i)[c] + chi * mean[c];
          }
        }
      }
    }

    const double width = effective_width(opt, g);
    if (width > 0.0) {
      // Heat-kernel multiplier exp(-2 pi^2 width^2 (m^2 + n^2)) per component.
      for (std::size_t comp = 0; comp < u.dim; ++comp) {
        ComplexField f(g);
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = complexd(u.node(i)[comp], 0.0);
        SpectralField sp = forward_transform(f);
        for (std::size_t kr = 0; kr < g.rows; ++kr) {
          const double fn = static_cast<double>(SpectralField::signed_freq(kr, g.rows));
          for (std::size_t kc = 0; kc < g.cols; ++kc) {
            const double fm = static_cast<double>(SpectralField::signed_freq(kc, g.cols));
            sp.at(kr, kc) *=
                std::exp(-2.0 * kPi * kPi * width * width * (fm * fm + fn * fn));
          }
        }
        ComplexField back = inverse_transform(sp);
        for (std::size_t i = 0; i < g.size(); ++i) u.node(i)[comp] = back[i].real();
      }
    }

    u.project_all(n);
    if (report) {
      report->energy_change[k] = energy(u) - e_before;
      report->max_sup_change = std::max(report->max_sup_change, sup_distance(u, s.slices[k]));
    }
  }
  return out;
}

namespace {

MetricField pullback_metric(const MapSlice& u) {
  // Plain parameter derivatives U_a, U_b recovered from the conformal pair.
  const SliceGradient grad = slice_gradient(u);
  const double tau1 = u.grid.lattice.tau.real(), tau2 = u.grid.lattice.tau.imag();
  MetricField m(Grid(u.grid.rows, u.grid.cols));
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    const double* du = grad.du.data() + i * u.dim;
    const double* dv = grad.dv.data() + i * u.dim;
    double aa = 0.0, ab = 0.0, bb = 0.0;
    for (std::size_t c = 0; c < u.dim; ++c) {
      const double ua = du[c];
      const double ub = tau1 * du[c] + tau2 * dv[c];
      aa += ua * ua;
      ab += ua * ub;
      bb += ub * ub;
    }
    m.g11[i] = aa;
    m.g12[i] = ab;
    m.g22[i] = bb;
  }
  return m;
}

}  // namespace

complexd measure_mark(const MapSlice& u, double delta, const SmoothingOptions& patch,
                      double solver_tol, int solver_max_iter) {
  MetricField g = pullback_metric(u);
  if (patch.apply_patch && patch.patch_radius > 0.0) {
    const Grid& grid = u.grid;
    const double patch_r = effective_patch_radius(patch, grid);
    const double r_in = 1.6 * patch_r;
    const double r_out = 2.6 * patch_r;
    double m11 = 0.0, m12 = 0.0, m22 = 0.0, count = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = torus_distance(patch.patch_ca, patch.patch_cb, grid.x_of(i % grid.cols),
                                      grid.y_of(i / grid.cols), grid.lattice.tau);
      if (d >= r_in && d < r_out) {
        m11 += g.g11[i];
        m12 += g.g12[i];
        m22 += g.g22[i];
        count += 1.0;
      }
    }
    if (count > 0.0) {
      m11 /= count;
      m12 /= count;
      m22 /= count;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = torus_distance(patch.patch_ca, patch.patch_cb, grid.x_of(i % grid.cols),
                                        grid.y_of(i / grid.cols), grid.lattice.tau);
        if (d < r_in) {
          g.g11[i] = m11;
          g.g12[i] = m12;
          g.g22[i] = m22;
        }
      }
    }
  }
  SolverOptions sopt;
  sopt.tol = solver_tol;
  sopt.max_iter = solver_max_iter;
  const BeltramiField b = metric_to_beltrami(regularize(g, delta));
  return solve_periodic_beltrami(b, sopt).mark.tau;
}

Sweepout reparametrize_conformal(const Sweepout& s, const TargetManifold& n,
                                 const ReparametrizeOptions& opt, ReparametrizeReport* report) {
  Sweepout out = s;
  if (report) {
    report->defect.assign(s.slices.size(), 0.0);
    report->marks.resize(s.slices.size());
    for (std::size_t k = 0; k < s.slices.size(); ++k) {
      report->marks[k] = s.slices[k].grid.lattice.tau;
    }
  }
  if (s.slices.size() < 3) return out;
  std::vector<std::string> failures(s.slices.size());
  parallel_for(s.slices.size() - 2, opt.threads, [&](std::size_t idx) {
    const std::size_t k = idx + 1;  // endpoints preserved bit-identically
    const MapSlice& u = s.slices[k];
    try {
      const MetricField g = pullback_metric(u);
      UniformizationResult uni = uniformize(g, opt.delta, opt.solver_tol, opt.solver_max_iter);
      const Grid& dst = uni.h_grid.grid;
      MapSlice v(dst, u.dim);
      const SliceInterpolant interp(u);
      std::vector<double> val(u.dim);
      for (std::size_t i = 0; i < dst.size(); ++i) {
        const complexd h = uni.h_grid[i];
        interp.evaluate(h.real(), h.imag(), val);
        std::copy(val.begin(), val.end(), v.node(i));
      }
      v.project_all(n);
      out.slices[k] = std::move(v);
      if (report) {
        report->defect[k] = energy(out.slices[k]) - area(out.slices[k]);
        report->marks[k] = uni.mark.tau;
      }
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < failures.size(); ++k) {
    if (!failures[k].empty()) {
      throw std::runtime_error("reparametrize_conformal: slice " + std::to_string(k) + ": " +
                               failures[k]);
    }
  }
  return out;
}

std::size_t CoveringSchedule::active_count(std::size_t time_index) const {
  std::size_t n = 0;
  for (const CoveringEntry& e : entries) {
    if (time_index < e.tent.size() && e.tent[time_index] > 0.0) ++n;
  }
  return n;
}

CoveringSchedule build_covering(const Sweepout& s, const TargetManifold& n,
                                const CoveringOptions& opt) {
  CoveringSchedule schedule;
  const std::size_t m = s.slices.size();
  if (m < 3) return schedule;
  const std::vector<double> e = s.energies();
  const double w_max = *std::max_element(e.begin(), e.end());
  if (w_max <= 1e-12) return schedule;

  std::vector<std::size_t> region;  // I = { t : E >= W/2 }, interior times only
  for (std::size_t k = 1; k + 1 < m; ++k) {
    if (e[k] >= 0.5 * w_max) region.push_back(k);
  }
  if (region.empty()) return schedule;

  std::vector<double> e_quarter(m, -1.0), e_eighth(m, -1.0);
  std::vector<BallCollection> argmax(m);
  auto decrease_at = [&](std::size_t k, double eps, bool keep_argmax) {
    MaxDecreaseResult r = max_energy_decrease(
        s.slices[k], n, eps,
        density_adapted_family(s.slices[k], opt.family_centers, opt.family_levels),
        opt.replace);
    if (keep_argmax) argmax[k] = r.argmax;
    return r.family_empty ? 0.0 : r.e_value;
  };

  struct Interval {
    std::size_t lo, hi, center;
  };
  std::vector<Interval> intervals;
  std::vector<std::uint8_t> seeded(m, 0);
  for (std::size_t k : region) {
    if (seeded[k]) continue;
    if (e_quarter[k] < 0.0) e_quarter[k] = decrease_at(k, opt.eps1 / 4.0, true);
    const double floor = opt.noise_floor_rel * e[k] + 1e-14;
    if (e_quarter[k] <= floor) {
      throw std::domain_error("build_covering: slice " + std::to_string(k) +
                              " is discretely harmonic (max energy decrease " +
                              std::to_string(e_quarter[k]) + ")");
    }
    // Grow while the factor-2 bound e_{eps/2}(s) <= 2 e_eps(k) and the
    // collection-energy bound hold at the fresh samples of the doubled
    // interval.
    std::size_t w = 0;
    auto ok_at = [&](long t) {
      if (t < 1 || t + 1 >= static_cast<long>(m)) return true;  // clipped ends
      const std::size_t ts = static_cast<std::size_t>(t);
      if (energy(s.slices[ts], argmax[k]) > opt.eps1 / 3.0) return false;
      if (e_eighth[ts] < 0.0) e_eighth[ts] = decrease_at(ts, opt.eps1 / 8.0, false);
      return e_eighth[ts] <= 2.0 * e_quarter[k];
    };
    while (w + 1 <= m / 4) {
      const long wn = static_cast<long>(w) + 1;
      const long kc = static_cast<long>(k);
      if (!(ok_at(kc - 2 * wn) && ok_at(kc - wn) && ok_at(kc + wn) && ok_at(kc + 2 * wn))) break;
      w = static_cast<std::size_t>(wn);
    }
    const std::size_t lo = k >= w + 1 ? k - w : 1;
    const std::size_t hi = std::min(m - 2, k + w);
    intervals.push_back({lo, hi, k});
    for (std::size_t t = lo; t <= hi; ++t) seeded[t] = 1;
  }

  // Greedy minimal subcover of the region, then trim cores to be disjoint;
  // tents extend into the gaps, so at most two are active at any time.
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> chosen;
  std::size_t cursor = 0;
  while (cursor < region.size()) {
    const std::size_t point = region[cursor];
    std::size_t best = intervals.size();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      if (intervals[i].lo <= point && point <= intervals[i].hi) {
        if (best == intervals.size() || intervals[i].hi > intervals[best].hi) best = i;
      }
    }
    if (best == intervals.size()) {
      chosen.push_back({point, point, point});
      ++cursor;
      continue;
    }
    chosen.push_back(intervals[best]);
    while (cursor < region.size() && region[cursor] <= intervals[best].hi) ++cursor;
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < chosen.size(); ++i) {
    if (chosen[i + 1].lo <= chosen[i].hi) {
      const std::size_t mid = (chosen[i + 1].lo + chosen[i].hi) / 2;
      chosen[i].hi = mid;
      chosen[i + 1].lo = std::min(mid + 1, chosen[i + 1].hi);
    }
  }

  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const Interval& iv = chosen[i];
    if (argmax[iv.center].empty() && e_quarter[iv.center] < 0.0) {
      e_quarter[iv.center] = decrease_at(iv.center, opt.eps1 / 4.0, true);
    }
    const std::size_t core_w = iv.hi - iv.lo + 1;
    std::size_t ext_l = core_w, ext_r = core_w;
    if (i > 0 && iv.lo > chosen[i - 1].hi) ext_l = std::min(ext_l, (iv.lo - chosen[i - 1].hi) / 2);
    if (i + 1 < chosen.size() && chosen[i + 1].lo > iv.hi) {
      ext_r = std::min(ext_r, (chosen[i + 1].lo - iv.hi) / 2);
    }
    CoveringEntry entry;
    entry.collection = argmax[iv.center];
    entry.center_time = iv.center;
    entry.tent.assign(m, 0.0);
    for (std::size_t t = 1; t + 1 < m; ++t) {
      double r = 0.0;
      if (t >= iv.lo && t <= iv.hi) {
        r = 1.0;
      } else if (t < iv.lo && ext_l > 0 && iv.lo - t <= ext_l) {
        r = 1.0 - static_cast<double>(iv.lo - t) / static_cast<double>(ext_l + 1);
      } else if (t > iv.hi && ext_r > 0 && t - iv.hi <= ext_r) {
        r = 1.0 - static_cast<double>(t - iv.hi) / static_cast<double>(ext_r + 1);
      }
      // Collection-energy invariant wherever the tent is positive.
      if (r > 0.0 && energy(s.slices[t], entry.collection.scaled(r)) > opt.eps1 / 3.0) {
        r = 0.0;
      }
      entry.tent[t] = r;
    }
    schedule.entries.push_back(std::move(entry));
  }

  for (std::size_t t = 0; t < m; ++t) {
    if (schedule.active_count(t) > 2) {
      throw std::logic_error("build_covering: more than two active tents at time " +
                             std::to_string(t));
    }
  }
  return schedule;
}

Sweepout tighten(const Sweepout& s, const TargetManifold& n, const CoveringSchedule& schedule,
                 const ReplaceOptions& opt, TighteningReport* report, int threads) {
  Sweepout out = s;
  TighteningReport local;
  local.energy_before = s.energies();
  local.continuity_before = s.continuity_measure();

  std::size_t best_k = 0, best_t = 0;
  double best_drop = -1.0;
  for (std::size_t k = 0; k < schedule.entries.size(); ++k) {
    const CoveringEntry& entry = schedule.entries[k];
    std::vector<double> drops(out.slices.size(), 0.0);
    parallel_for(out.slices.size(), threads, [&](std::size_t t) {
      if (t >= entry.tent.size() || entry.tent[t] <= 0.0) return;
      const BallCollection scaled = entry.collection.scaled(entry.tent[t]);
      ReplaceResult r = harmonic_replace(out.slices[t], n, scaled, opt);
      drops[t] = r.energy_before - r.energy_after;
      out.slices[t] = std::move(r.slice);
    });
    for (std::size_t t = 0; t < drops.size(); ++t) {
      if (drops[t] > best_drop) {
        best_drop = drops[t];
        best_k = k;
        best_t = t;
      }
    }
  }

  local.energy_after = out.energies();
  local.continuity_after = out.continuity_measure();
  local.max_before = *std::max_element(local.energy_before.begin(), local.energy_before.end());
  local.max_after = *std::max_element(local.energy_after.begin(), local.energy_after.end());

  // Homotopy surrogate: sample the shrink family r -> frac * r at the
  // strongest replacement and record the deformation step sizes.
  if (best_drop > 0.0 && !schedule.entries.empty()) {
    const CoveringEntry& entry = schedule.entries[best_k];
    const MapSlice& base = s.slices[best_t];
    MapSlice prev = base;
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      const BallCollection scaled = entry.collection.scaled(frac * entry.tent[best_t]);
      ReplaceResult r = harmonic_replace(base, n, scaled, opt);
      local.homotopy_steps.push_back(sup_distance(prev, r.slice) +
                                     gradient_l2_distance(prev, r.slice));
      prev = std::move(r.slice);
    }
  }

  if (report) *report = std::move(local);
  return out;
}

PropertyStarResult verify_property_star(const MapSlice& slice, const TargetManifold& n,
                                        double eps0, int sample_count, std::uint64_t seed,
                                        const ReplaceOptions& opt) {
  PropertyStarResult out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const complexd tau = slice.grid.lattice.tau;
  const double inj = injectivity_radius(tau);
  const double h = std::max(1.0 / static_cast<double>(slice.grid.cols),
                            1.0 / static_cast<double>(slice.grid.rows));
  for (int trial = 0;
       trial < 8 * sample_count && out.samples_used < static_cast<std::size_t>(sample_count);
       ++trial) {
    const int count = 1 + static_cast<int>(rng() % 3);
    BallCollection coll;
    bool ok = true;
    for (int b = 0; b < count && ok; ++b) {
      Ball ball;
      ball.ca = unif(rng);
      ball.cb = unif(rng);
      ball.radius = (4.0 * h) + unif(rng) * std::max(0.25 * inj - 4.0 * h, 0.0);
      coll.balls.push_back(ball);
      ok = pairwise_disjoint(coll, tau);
    }
    if (!ok) continue;
    if (energy(slice, coll) > eps0) continue;
    const BallCollection eighth = coll.scaled(1.0 / 8.0);
    if (mask_count(collection_mask(slice.grid, eighth)) == 0) continue;
    ReplaceOptions local = opt;
    local.eps1 = std::max(opt.eps1, eps0);
    ReplaceResult r = harmonic_replace(slice, n, eighth, local);
    const double d = 2.0 * difference_energy(slice, r.slice);
    out.worst_integral = std::max(out.worst_integral, d);
    ++out.samples_used;
  }
  return out;
}

DriveHistory minmax_drive(const Sweepout& initial, const TargetManifold& n,
                          const DriveOptions& opt) {
  DriveHistory history;
  // The initial family is mollified and patched once up front, so the first
  // recorded round already starts from the perturbed configuration.
  Sweepout current = smooth_sweepout(initial, n, opt.smoothing);
  SmoothingOptions round_smoothing = opt.smoothing;
  if (opt.smooth_first_round_only) {
    round_smoothing.apply_patch = false;
    round_smoothing.width = 0.0;
  }
  double delta = opt.delta0;
  for (int round = 1; round <= opt.rounds; ++round) {
    current = smooth_sweepout(current, n, round_smoothing);

    ReparametrizeOptions repar = opt.repar;
    repar.delta = delta;
    repar.threads = opt.threads;
    ReparametrizeReport rep_report;
    current = reparametrize_conformal(current, n, repar, &rep_report);

    CoveringSchedule schedule = build_covering(current, n, opt.covering);
    TighteningReport tight_report;
    current = tighten(current, n, schedule, opt.covering.replace, &tight_report, opt.threads);

    for (std::size_t t = 0; t < tight_report.energy_after.size(); ++t) {
      if (tight_report.energy_after[t] >
          tight_report.energy_before[t] + 1e-8 * std::max(1.0, tight_report.energy_before[t])) {
        throw std::logic_error("minmax_drive: tighten increased the energy of slice " +
                               std::to_string(t));
      }
    }

    DriveRound row;
    row.round = round;
    row.delta = delta;
    const std::vector<double> energies = current.energies();
    const std::vector<double> areas = current.areas();
    const std::size_t arg = static_cast<std::size_t>(
        std::max_element(energies.begin(), energies.end()) - energies.begin());
    row.max_energy = energies[arg];
    row.max_area = *std::max_element(areas.begin(), areas.end());
    row.gap = row.max_energy - row.max_area;
    row.max_defect = *std::max_element(rep_report.defect.begin(), rep_report.defect.end());
    row.tighten_drop = tight_report.max_before - tight_report.max_after;
    row.argmax_mark =
        measure_mark(current.slices[arg], delta, opt.smoothing, opt.repar.solver_tol,
                     opt.repar.solver_max_iter);
    row.argmax_slice = current.slices[arg];
    PropertyStarResult star =
        verify_property_star(current.slices[arg], n, kDefaultEps0, opt.star_samples,
                             opt.seed + static_cast<std::uint64_t>(round), opt.covering.replace);
    row.worst_property_star = star.worst_integral;
    history.rounds.push_back(row);

    delta *= opt.delta_halving;
  }
  history.final = std::move(current);
  return history;
}

}  // namespace mmt
