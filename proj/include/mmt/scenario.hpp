#pragma once

#include <functional>

#include "mmt/sweepout.hpp"

namespace mmt {

struct ScenarioSpec {
  std::string name;
  std::string target_name;
  std::string expected_outcome;  // qualitative tag
  std::function<Sweepout(std::size_t grid, std::size_t time_samples)> build;
};

TargetManifold make_target(const std::string& name);

const std::vector<ScenarioSpec>& scenario_library();

/// Throws with the list of available names when the scenario is unknown.
const ScenarioSpec& find_scenario(const std::string& name);

}  // namespace mmt
