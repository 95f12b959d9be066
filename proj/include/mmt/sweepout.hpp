#pragma once

#include <functional>

#include "mmt/beltrami.hpp"
#include "mmt/harmonic.hpp"
#include "mmt/map_slice.hpp"

namespace mmt {

enum class EndpointKind { ConstantMap, CircleMap };

/// Discrete sweepout: slices over the uniform time grid t_k = k/M, each slice
/// carrying its mark in grid.lattice.  Endpoint slices are constant maps (or
/// circle maps) and are preserved bit-identically by every operation.
struct Sweepout {
  std::vector<MapSlice> slices;
  EndpointKind endpoint_start = EndpointKind::ConstantMap;
  EndpointKind endpoint_end = EndpointKind::ConstantMap;

  std::size_t steps() const { return slices.empty() ? 0 : slices.size() - 1; }
  double time_of(std::size_t k) const {
    return static_cast<double>(k) / static_cast<double>(steps());
  }

  std::vector<double> energies() const;
  std::vector<double> areas() const;
  double max_energy() const;
  double max_area() const;

  /// Adjacent-slice continuity measure: max over k of sup distance plus
  /// gradient L2 distance (discrete stand-in for continuity in t).
  double continuity_measure() const;
};

struct SmoothingOptions {
  double width = 0.0;        // Gaussian mollifier width; 0 = no mollification
  double patch_radius = 0.05;
  double patch_ca = 0.25;
  double patch_cb = 0.25;
  bool apply_patch = true;
};

struct SmoothingReport {
  std::vector<double> energy_change;  // per slice
  double max_sup_change = 0.0;
};

/// Per-slice mollification by a periodic Gaussian kernel followed by
/// projection to N, then a blend to the local mean on a small disk so no
/// nonconstant slice stays harmonic.  Endpoints untouched.
Sweepout smooth_sweepout(const Sweepout& s, const TargetManifold& n,
                         const SmoothingOptions& opt, SmoothingReport* report = nullptr);

struct ReparametrizeOptions {
  double delta = 1e-2;
  double solver_tol = 1e-10;
  int solver_max_iter = 10000;
  int threads = 1;
};

struct ReparametrizeReport {
  std::vector<double> defect;  // per-slice E - Area after reparametrization
  std::vector<complexd> marks;
};

/// Almost-conformal reparametrization: per slice, pull back the metric,
/// regularize by delta, uniformize, and compose the slice with the conformal
/// map onto the new marked grid.  The defect E - Area per slice follows the
/// C sqrt(delta) envelope as delta decreases.
Sweepout reparametrize_conformal(const Sweepout& s, const TargetManifold& n,
                                 const ReparametrizeOptions& opt,
                                 ReparametrizeReport* report = nullptr);

struct CoveringEntry {
  BallCollection collection;
  std::size_t center_time = 0;
  std::vector<double> tent;  // r_j sampled on the time grid, in [0, 1]
};

struct CoveringSchedule {
  std::vector<CoveringEntry> entries;
  /// Number of entries with r_j(t) > 0; the covering invariant caps it at 2.
  std::size_t active_count(std::size_t time_index) const;
};

struct CoveringOptions {
  double eps1 = kDefaultEps1;
  double noise_floor_rel = 1e-9;  // harmonic-slice detection level
  std::size_t family_centers = 16;
  int family_levels = 6;
  ReplaceOptions replace;
};

/// Builds the tent schedule over I = { t : E(t) >= max E / 2 }: per sampled
/// time an argmax collection from the maximal-energy-decrease search, time
/// intervals grown while the empirical factor-2 bound e_{eps/2}(s) <=
/// 2 e_eps(t) holds, pruned to a covering with overlap at most two.
CoveringSchedule build_covering(const Sweepout& s, const TargetManifold& n,
                                const CoveringOptions& opt);

struct TighteningReport {
  std::vector<double> energy_before;
  std::vector<double> energy_after;
  double max_before = 0.0;
  double max_after = 0.0;
  double continuity_before = 0.0;
  double continuity_after = 0.0;
  std::vector<double> homotopy_steps;  // continuity of the shrink family
};

/// Sequential per-slice harmonic replacement on r_k(t) B_k for k = 1..m;
/// energies never increase and nodes outside the collections are untouched.
Sweepout tighten(const Sweepout& s, const TargetManifold& n, const CoveringSchedule& schedule,
                 const ReplaceOptions& opt, TighteningReport* report = nullptr,
                 int threads = 1);

struct PropertyStarResult {
  double worst_integral = 0.0;  // max sampled int |grad rho - grad v|^2
  std::size_t samples_used = 0;
};

/// Mark of a slice measured from its pullback metric.  The disk around the
/// smoothing patch is inpainted with the surrounding ring average first, so
/// the constant-patch perturbation does not bias the conformal class
/// estimate.
complexd measure_mark(const MapSlice& u, double delta, const SmoothingOptions& patch,
                      double solver_tol = 1e-10, int solver_max_iter = 10000);

/// Samples ball collections with E(slice, B) <= eps0, replaces on B/8 and
/// measures the W12 distance integral of property (*).
PropertyStarResult verify_property_star(const MapSlice& slice, const TargetManifold& n,
                                        double eps0, int sample_count, std::uint64_t seed,
                                        const ReplaceOptions& opt = {});

struct DriveOptions {
  int rounds = 5;
  double delta0 = 1e-2;
  double delta_halving = 0.5;
  // Mollification and the constant patch run once, up front: the cut region
  // stays non-harmonic through the rounds, while re-smoothing every round
  // would keep flattening a drifting sliver and re-damping high frequencies.
  bool smooth_first_round_only = true;
  SmoothingOptions smoothing;
  CoveringOptions covering;
  ReparametrizeOptions repar;
  int star_samples = 8;
  std::uint64_t seed = 12345;
  int threads = 1;
};

struct DriveRound {
  int round = 0;
  double delta = 0.0;
  double max_energy = 0.0;
  double max_area = 0.0;
  double gap = 0.0;                  // maxE - maxArea
  double worst_property_star = 0.0;
  double max_defect = 0.0;           // max per-slice E - Area after reparametrization
  double tighten_drop = 0.0;         // max slice energy drop in this round
  complexd argmax_mark{};            // mark at the maximal-energy slice
  MapSlice argmax_slice;             // copy of the maximal-energy slice
};

struct DriveHistory {
  std::vector<DriveRound> rounds;
  Sweepout final;
};

/// Full tightening driver: smooth -> reparametrize(delta_n) -> build_covering
/// -> tighten per round, with per-round maxima recorded.
DriveHistory minmax_drive(const Sweepout& initial, const TargetManifold& n,
                          const DriveOptions& opt);

}  // namespace mmt
