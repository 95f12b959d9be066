#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmt/pgrid.hpp"
#include "mmt/pipeline.hpp"

namespace {

using namespace mmt;

MetricField metric_from_pgrid(const std::filesystem::path& path) {
  PGrid g = read_pgrid(path);
  if (g.components != 3) {
    throw std::runtime_error("uniformize: metric file must have 3 components (g11, g12, g22)");
  }
  MetricField m(Grid(g.rows, g.cols, Lattice(g.tau)));
  for (std::size_t i = 0; i < m.g11.size(); ++i) {
    m.g11[i] = g.data[3 * i];
    m.g12[i] = g.data[3 * i + 1];
    m.g22[i] = g.data[3 * i + 2];
  }
  return m;
}

BallCollection balls_from_json(const std::string& text) {
  BallCollection coll;
  const nlohmann::json j = nlohmann::json::parse(text);
  for (const auto& item : j) {
    Ball b;
    b.ca = item.at("ca").get<double>();
    b.cb = item.at("cb").get<double>();
    b.radius = item.at("radius").get<double>();
    coll.balls.push_back(b);
  }
  return coll;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream os(out_path);
    os << text << "\n";
  }
}

int run_uniformize(const std::string& metric_path, double delta, double tol,
                   const std::string& out_path, const std::string& dump_h,
                   const std::string& dump_w) {
  MetricField m = metric_from_pgrid(metric_path);
  UniformizationResult r = uniformize(m, delta, tol);
  nlohmann::json j = {{"tau_re", r.mark.tau.real()},
                      {"tau_im", r.mark.tau.imag()},
                      {"residual", r.residual},
                      {"conformal_defect", r.conformal_defect},
                      {"iterations", r.iterations},
                      {"cr2_residual", r.cr2_residual},
                      {"contraction", r.contraction_max}};
  if (!dump_h.empty()) write_pgrid(dump_h, to_pgrid(r.h_grid));
  if (!dump_w.empty()) write_pgrid(dump_w, to_pgrid(r.w_grid));
  emit(j.dump(2), out_path);
  return 0;
}

int run_replace(const std::string& map_path, const std::string& target_name,
                const std::string& balls_json, double tol, const std::string& out_map,
                const std::string& out_path) {
  PGrid g = read_pgrid(map_path);
  VectorField vf = pgrid_to_vector(g);
  MapSlice u(vf.grid, vf.dim);
  u.values = std::move(vf.data);
  TargetManifold n = make_target(target_name);
  if (n.ambient_dim() != u.dim) {
    throw std::runtime_error("replace: map has " + std::to_string(u.dim) +
                             " components but target lives in R^" +
                             std::to_string(n.ambient_dim()));
  }
  BallCollection coll = balls_from_json(balls_json);
  ReplaceOptions opt;
  opt.tol = tol;
  ReplaceResult r = harmonic_replace(u, n, coll, opt);
  const double defect = energy_gap_defect(u, r.slice);
  nlohmann::json j = {{"energy_before", r.energy_before},
                      {"energy_after", r.energy_after},
                      {"gap", r.energy_before - r.energy_after},
                      {"defect", defect},
                      {"converged", r.converged},
                      {"sweeps", r.sweeps}};
  if (!out_map.empty()) {
    VectorField out_vf(r.slice.grid, r.slice.dim);
    out_vf.data = r.slice.values;
    write_pgrid(out_map, to_pgrid(out_vf));
  }
  emit(j.dump(2), out_path);
  return 0;
}

int run_tighten(const Config& base, const std::string& sweepout_dir, int rounds,
                const std::string& out_dir) {
  std::string target_name;
  Sweepout s = load_sweepout(sweepout_dir, &target_name);
  TargetManifold n = make_target(target_name);
  Config config = base;
  config.rounds = rounds;
  DriveOptions opt = drive_options_from_config(config);
  DriveHistory history = minmax_drive(s, n, opt);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(std::filesystem::path(out_dir) / "history.csv");
    os << history_to_csv(history);
  }
  save_sweepout(std::filesystem::path(out_dir) / "final", history.final, target_name);
  std::cout << history_to_csv(history);
  return 0;
}

int run_analyze(const Config& base, const std::string& slices_dir, double eps1,
                const std::string& out_path) {
  Sweepout s = load_sweepout(slices_dir);
  std::vector<complexd> marks;
  for (const MapSlice& slice : s.slices) marks.push_back(slice.grid.lattice.tau);
  AnalysisReport report = analyze_slices(s.slices, marks, eps1, base.degenerate_threshold);
  emit(analysis_to_json(report), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"min-max minimal torus toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string out;
  auto* threads_opt = app.add_option("--threads", threads, "worker thread count");
  auto* seed_opt = app.add_option("--seed", seed, "seed for the Monte Carlo probes");
  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--out", out, "output directory or file");

  auto* uni = app.add_subcommand("uniformize", "uniformize a metric given as a PGRID1 file");
  std::string metric_path, dump_h, dump_w;
  double uni_delta = 1e-10, uni_tol = 1e-10;
  uni->add_option("--metric", metric_path, "3-component PGRID1 metric (g11, g12, g22)")
      ->required();
  uni->add_option("--delta", uni_delta, "regularization delta");
  uni->add_option("--tol", uni_tol, "solver tolerance");
  uni->add_option("--dump-h", dump_h, "write the inverse map as PGRID1");
  uni->add_option("--dump-w", dump_w, "write the forward map as PGRID1");

  auto* rep = app.add_subcommand("replace", "harmonic replacement on a ball collection");
  std::string map_path, target_name = "s2", balls_json = "[]", out_map;
  double rep_tol = 1e-7;
  rep->add_option("--map", map_path, "PGRID1 map file")->required();
  rep->add_option("--target", target_name, "target manifold (s2, s3, t2, ellipsoid)");
  rep->add_option("--balls", balls_json, "JSON list of balls [{ca, cb, radius}, ...]")
      ->required();
  rep->add_option("--tol", rep_tol, "relaxation tolerance");
  rep->add_option("--out-map", out_map, "write the replaced map as PGRID1");

  auto* tig = app.add_subcommand("tighten", "run tightening rounds on a stored sweepout");
  std::string sweepout_dir;
  int tig_rounds = 5;
  tig->add_option("--sweepout", sweepout_dir, "sweepout directory (manifest + slices)")
      ->required();
  tig->add_option("--rounds", tig_rounds, "number of rounds");

  auto* ana = app.add_subcommand("analyze-bubbles", "classify marks and extract bubbles");
  std::string slices_dir;
  double ana_eps1 = kDefaultEps1;
  ana->add_option("--slices", slices_dir, "sweepout directory (manifest + slices)")->required();
  ana->add_option("--eps1", ana_eps1, "energy concentration threshold");

  auto* runcmd = app.add_subcommand("run", "run a named scenario through the full pipeline");
  std::string scenario_name;
  runcmd->add_option("--scenario", scenario_name, "scenario name")->required();

  auto* sc = app.add_subcommand("scenarios", "list available scenarios");

  // Global flags are accepted after the subcommand as well.
  for (CLI::App* sub : {uni, rep, tig, ana, runcmd, sc}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    Config config;
    if (!config_path.empty()) config = load_config(config_path);
    if (threads_opt->count() > 0) config.threads = threads;
    if (seed_opt->count() > 0) config.seed = seed;
    if (!out.empty()) config.out_dir = out;
    config.finalize();

    if (uni->parsed()) {
      return run_uniformize(metric_path, uni_delta, uni_tol, out, dump_h, dump_w);
    }
    if (rep->parsed()) {
      return run_replace(map_path, target_name, balls_json, rep_tol, out_map, out);
    }
    if (tig->parsed()) {
      return run_tighten(config, sweepout_dir, tig_rounds, out.empty() ? "tighten_out" : out);
    }
    if (ana->parsed()) {
      return run_analyze(config, slices_dir, ana_eps1, out);
    }
    if (runcmd->parsed()) {
      config.scenario = scenario_name;
      PipelineResult result = run_pipeline(config);
      std::cout << history_to_csv(result.history);
      std::cout << "outputs written to " << result.out_dir.string() << "\n";
      return 0;
    }
    if (sc->parsed()) {
      for (const ScenarioSpec& s : scenario_library()) {
        std::cout << s.name << " (target " << s.target_name << "): " << s.expected_outcome
                  << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
