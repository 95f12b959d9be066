#pragma once

#include <filesystem>
#include <string>

#include "mmt/constants.hpp"

namespace mmt {

/// Pipeline configuration; loadable from a key = value text file with
/// unknown keys rejected.
struct Config {
  std::size_t grid = 64;
  std::size_t time_samples = 64;
  double eps1 = kDefaultEps1;
  double eps0 = -1.0;  // defaults to eps1 / 12 when unset
  double eps_su = kDefaultEpsSU;
  double delta0 = 1e-2;
  double delta_halving = 0.5;
  int rounds = 5;
  double solver_tol = 1e-10;
  int solver_max_iter = 10000;
  double replace_tol = 1e-7;
  int replace_max_sweeps = 20000;
  double noise_floor_rel = 1e-9;
  double mollify_width = 0.012;
  double patch_radius = 0.06;
  double patch_ca = 0.25;
  double patch_cb = 0.25;
  int star_samples = 6;
  int threads = 1;
  std::uint64_t seed = 12345;
  double degenerate_threshold = 50.0;
  double continuity_coeff = 0.1;
  std::string target = "s3";
  std::string scenario = "clifford";
  std::string out_dir = "out";

  /// Applies eps0 defaulting and checks the invariants (eps1 < eps_su, all
  /// tolerances positive).  Throws std::invalid_argument on violation.
  void finalize();
};

Config parse_config_text(const std::string& text);
Config load_config(const std::filesystem::path& path);
/// One key = value per line, full double precision.
std::string config_to_text(const Config& c);

}  // namespace mmt
