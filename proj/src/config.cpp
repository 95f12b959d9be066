#include "mmt/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mmt {

void Config::finalize() {
  if (eps0 < 0.0) eps0 = eps1 / 12.0;
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string("config: ") + name + " must be positive");
    }
  };
  positive(eps1, "eps1");
  positive(eps0, "eps0");
  positive(eps_su, "eps_su");
  positive(delta0, "delta0");
  positive(solver_tol, "solver_tol");
  positive(replace_tol, "replace_tol");
  positive(degenerate_threshold, "degenerate_threshold");
  if (!(eps1 < eps_su)) {
    throw std::invalid_argument("config: eps1 must be below eps_su");
  }
  if (delta_halving <= 0.0 || delta_halving >= 1.0) {
    throw std::invalid_argument("config: delta_halving must lie in (0, 1)");
  }
  if (rounds < 1 || threads < 1 || grid < 8 || time_samples < 2) {
    throw std::invalid_argument("config: rounds/threads/grid/time_samples out of range");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config c;
  std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"grid", [&](const std::string& v) { c.grid = std::stoul(v); }},
      {"time_samples", [&](const std::string& v) { c.time_samples = std::stoul(v); }},
      {"eps1", [&](const std::string& v) { c.eps1 = std::stod(v); }},
      {"eps0", [&](const std::string& v) { c.eps0 = std::stod(v); }},
      {"eps_su", [&](const std::string& v) { c.eps_su = std::stod(v); }},
      {"delta0", [&](const std::string& v) { c.delta0 = std::stod(v); }},
      {"delta_halving", [&](const std::string& v) { c.delta_halving = std::stod(v); }},
      {"rounds", [&](const std::string& v) { c.rounds = std::stoi(v); }},
      {"solver_tol", [&](const std::string& v) { c.solver_tol = std::stod(v); }},
      {"solver_max_iter", [&](const std::string& v) { c.solver_max_iter = std::stoi(v); }},
      {"replace_tol", [&](const std::string& v) { c.replace_tol = std::stod(v); }},
      {"replace_max_sweeps", [&](const std::string& v) { c.replace_max_sweeps = std::stoi(v); }},
      {"noise_floor_rel", [&](const std::string& v) { c.noise_floor_rel = std::stod(v); }},
      {"mollify_width", [&](const std::string& v) { c.mollify_width = std::stod(v); }},
      {"patch_radius", [&](const std::string& v) { c.patch_radius = std::stod(v); }},
      {"patch_ca", [&](const std::string& v) { c.patch_ca = std::stod(v); }},
      {"patch_cb", [&](const std::string& v) { c.patch_cb = std::stod(v); }},
      {"star_samples", [&](const std::string& v) { c.star_samples = std::stoi(v); }},
      {"threads", [&](const std::string& v) { c.threads = std::stoi(v); }},
      {"seed", [&](const std::string& v) { c.seed = std::stoull(v); }},
      {"degenerate_threshold",
       [&](const std::string& v) { c.degenerate_threshold = std::stod(v); }},
      {"continuity_coeff", [&](const std::string& v) { c.continuity_coeff = std::stod(v); }},
      {"target", [&](const std::string& v) { c.target = v; }},
      {"scenario", [&](const std::string& v) { c.scenario = v; }},
      {"out_dir", [&](const std::string& v) { c.out_dir = v; }},
  };
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' on line " +
                                  std::to_string(lineno));
    }
    it->second(value);
  }
  c.finalize();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_text(const Config& c) {
  std::ostringstream os;
  os.precision(17);
  os << "grid = " << c.grid << "\n";
  os << "time_samples = " << c.time_samples << "\n";
  os << "eps1 = " << c.eps1 << "\n";
  os << "eps0 = " << c.eps0 << "\n";
  os << "eps_su = " << c.eps_su << "\n";
  os << "delta0 = " << c.delta0 << "\n";
  os << "delta_halving = " << c.delta_halving << "\n";
  os << "rounds = " << c.rounds << "\n";
  os << "solver_tol = " << c.solver_tol << "\n";
  os << "solver_max_iter = " << c.solver_max_iter << "\n";
  os << "replace_tol = " << c.replace_tol << "\n";
  os << "replace_max_sweeps = " << c.replace_max_sweeps << "\n";
  os << "noise_floor_rel = " << c.noise_floor_rel << "\n";
  os << "mollify_width = " << c.mollify_width << "\n";
  os << "patch_radius = " << c.patch_radius << "\n";
  os << "patch_ca = " << c.patch_ca << "\n";
  os << "patch_cb = " << c.patch_cb << "\n";
  os << "star_samples = " << c.star_samples << "\n";
  os << "threads = " << c.threads << "\n";
  os << "seed = " << c.seed << "\n";
  os << "degenerate_threshold = " << c.degenerate_threshold << "\n";
  os << "continuity_coeff = " << c.continuity_coeff << "\n";
  os << "target = " << c.target << "\n";
  os << "scenario = " << c.scenario << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  return os.str();
}

}  // namespace mmt
