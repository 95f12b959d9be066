#pragma once

#include "mmt/bubbling.hpp"
#include "mmt/config.hpp"
#include "mmt/moduli.hpp"
#include "mmt/scenario.hpp"

namespace mmt {

/// Sweepout persistence: a manifest.txt (times, marks, target name, endpoint
/// kinds) plus one PGRID1 file per slice.
void save_sweepout(const std::filesystem::path& dir, const Sweepout& s,
                   const std::string& target_name);
Sweepout load_sweepout(const std::filesystem::path& dir, std::string* target_name = nullptr);

struct AnalysisReport {
  SequenceVerdict verdict;
  BubbleTree tree;
  bool tree_valid = false;
};

/// Mark classification plus bubble extraction over a sequence of slices (the
/// per-round maximal slices of a drive, or a loaded slice directory).
AnalysisReport analyze_slices(const std::vector<MapSlice>& slices,
                              const std::vector<complexd>& marks, double eps1,
                              double degenerate_threshold);
std::string analysis_to_json(const AnalysisReport& report);

struct PipelineResult {
  DriveHistory history;
  AnalysisReport analysis;
  std::filesystem::path out_dir;
};

std::string history_to_csv(const DriveHistory& history);

DriveOptions drive_options_from_config(const Config& c);

/// Scenario construction -> minmax drive -> persistence (manifest + slices,
/// history CSV, analysis JSON).  Deterministic for a fixed seed and a single
/// thread.
PipelineResult run_pipeline(const Config& config);

}  // namespace mmt
