#include "mmt/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmt/pgrid.hpp"

namespace mmt {

namespace {

std::string endpoint_name(EndpointKind k) {
  return k == EndpointKind::ConstantMap ? "constant" : "circle";
}

EndpointKind endpoint_from_name(const std::string& s) {
  if (s == "constant") return EndpointKind::ConstantMap;
  if (s == "circle") return EndpointKind::CircleMap;
  throw std::runtime_error("manifest: unknown endpoint kind '" + s + "'");
}

std::string slice_filename(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "slice_%04zu.pgrid", k);
  return buf;
}

}  // namespace

void save_sweepout(const std::filesystem::path& dir, const Sweepout& s,
                   const std::string& target_name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "manifest.txt");
  if (!os) throw std::runtime_error("save_sweepout: cannot write manifest in " + dir.string());
  os.precision(17);
  os << "target = " << target_name << "\n";
  os << "slices = " << s.slices.size() << "\n";
  os << "endpoint_start = " << endpoint_name(s.endpoint_start) << "\n";
  os << "endpoint_end = " << endpoint_name(s.endpoint_end) << "\n";
  for (std::size_t k = 0; k < s.slices.size(); ++k) {
    const complexd tau = s.slices[k].grid.lattice.tau;
    os << "slice " << k << " t = " << s.time_of(k) << " tau_re = " << tau.real()
       << " tau_im = " << tau.imag() << " file = " << slice_filename(k) << "\n";
    VectorField vf(s.slices[k].grid, s.slices[k].dim);
    vf.data = s.slices[k].values;
    write_pgrid(dir / slice_filename(k), to_pgrid(vf));
  }
}

Sweepout load_sweepout(const std::filesystem::path& dir, std::string* target_name) {
  std::ifstream is(dir / "manifest.txt");
  if (!is) throw std::runtime_error("load_sweepout: cannot open manifest in " + dir.string());
  Sweepout s;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "target") {
      std::string eq, value;
      ls >> eq >> value;
      if (target_name) *target_name = value;
    } else if (key == "slices") {
      std::string eq;
      ls >> eq >> expected;
    } else if (key == "endpoint_start" || key == "endpoint_end") {
      std::string eq, value;
      ls >> eq >> value;
      (key == "endpoint_start" ? s.endpoint_start : s.endpoint_end) = endpoint_from_name(value);
    } else if (key == "slice") {
      std::size_t k;
      std::string tok;
      double t, tre, tim;
      std::string file;
      ls >> k >> tok >> tok >> t >> tok >> tok >> tre >> tok >> tok >> tim >> tok >> tok >> file;
      PGrid g = read_pgrid(dir / file);
      VectorField vf = pgrid_to_vector(g);
      MapSlice slice(vf.grid, vf.dim);
      slice.values = std::move(vf.data);
      if (std::abs(complexd(tre, tim) - slice.grid.lattice.tau) > 1e-12) {
        throw std::runtime_error("load_sweepout: manifest mark disagrees with " + file);
      }
      if (s.slices.size() != k) {
        throw std::runtime_error("load_sweepout: out-of-order slice entries");
      }
      s.slices.push_back(std::move(slice));
    }
  }
  if (expected != s.slices.size()) {
    throw std::runtime_error("load_sweepout: manifest lists " + std::to_string(expected) +
                             " slices, found " + std::to_string(s.slices.size()));
  }
  return s;
}

AnalysisReport analyze_slices(const std::vector<MapSlice>& slices,
                              const std::vector<complexd>& marks, double eps1,
                              double degenerate_threshold) {
  AnalysisReport report;
  ClassifyOptions copt;
  copt.blowup_threshold = degenerate_threshold;
  report.verdict = classify_sequence(marks, copt);
  if (slices.size() >= 3) {
    report.tree = extract_bubbles(slices, eps1);
    report.tree_valid = true;
  }
  return report;
}

std::string analysis_to_json(const AnalysisReport& report) {
  nlohmann::json j;
  switch (report.verdict.kind) {
    case SequenceVerdict::Kind::Converged:
      j["verdict"] = "converged";
      j["limit"] = {{"re", report.verdict.limit.real()}, {"im", report.verdict.limit.imag()}};
      break;
    case SequenceVerdict::Kind::Degenerate:
      j["verdict"] = "degenerate";
      break;
    case SequenceVerdict::Kind::Inconclusive:
      j["verdict"] = "inconclusive";
      break;
  }
  j["tau_sequence"] = nlohmann::json::array();
  for (complexd t : report.verdict.reduced) {
    j["tau_sequence"].push_back({{"re", t.real()}, {"im", t.imag()}});
  }
  j["bubbles"] = nlohmann::json::array();
  if (report.tree_valid) {
    for (const BubbleInfo& b : report.tree.bubbles) {
      j["bubbles"].push_back(
          {{"center", {b.ca, b.cb}}, {"scales", b.scales}, {"energy", b.energy}});
    }
    j["body_energy"] = report.tree.body_energy;
    j["neck_energy"] = report.tree.residual_neck_energy;
    j["identity_residual"] = report.tree.accounting_residual;
  }
  return j.dump(2);
}

std::string history_to_csv(const DriveHistory& history) {
  std::ostringstream os;
  os.precision(17);
  os << "round,max_energy,max_area,gap,worst_property_star\n";
  for (const DriveRound& r : history.rounds) {
    os << r.round << "," << r.max_energy << "," << r.max_area << "," << r.gap << ","
       << r.worst_property_star << "\n";
  }
  return os.str();
}

DriveOptions drive_options_from_config(const Config& c) {
  DriveOptions opt;
  opt.rounds = c.rounds;
  opt.delta0 = c.delta0;
  opt.delta_halving = c.delta_halving;
  opt.smoothing.width = c.mollify_width;
  opt.smoothing.patch_radius = c.patch_radius;
  opt.smoothing.patch_ca = c.patch_ca;
  opt.smoothing.patch_cb = c.patch_cb;
  opt.covering.eps1 = c.eps1;
  opt.covering.noise_floor_rel = c.noise_floor_rel;
  opt.covering.replace.tol = c.replace_tol;
  opt.covering.replace.max_sweeps = c.replace_max_sweeps;
  opt.covering.replace.eps1 = c.eps1;
  opt.repar.solver_tol = c.solver_tol;
  opt.repar.solver_max_iter = c.solver_max_iter;
  opt.star_samples = c.star_samples;
  opt.seed = c.seed;
  opt.threads = c.threads;
  return opt;
}

PipelineResult run_pipeline(const Config& config) {
  const ScenarioSpec& scenario = find_scenario(config.scenario);
  const TargetManifold target = make_target(scenario.target_name);
  Sweepout initial = scenario.build(config.grid, config.time_samples);

  PipelineResult result;
  result.out_dir = config.out_dir;
  std::filesystem::create_directories(result.out_dir);
  {
    std::ofstream os(result.out_dir / "config.txt");
    os << config_to_text(config);
  }

  DriveOptions opt = drive_options_from_config(config);
  result.history = minmax_drive(initial, target, opt);

  std::vector<MapSlice> round_slices;
  std::vector<complexd> round_marks;
  for (const DriveRound& r : result.history.rounds) {
    round_slices.push_back(r.argmax_slice);
    round_marks.push_back(r.argmax_mark);
  }
  result.analysis =
      analyze_slices(round_slices, round_marks, config.eps1, config.degenerate_threshold);

  {
    std::ofstream os(result.out_dir / "history.csv");
    os << history_to_csv(result.history);
  }
  {
    std::ofstream os(result.out_dir / "analysis.json");
    os << analysis_to_json(result.analysis) << "\n";
  }
  save_sweepout(result.out_dir / "final", result.history.final, scenario.target_name);
  return result;
}

}  // namespace mmt
