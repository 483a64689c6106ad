#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hmmtrack/experiments/experiment.hpp"
#include "hmmtrack/experiments/stats.hpp"

namespace hmmtrack::experiments {

/// report.json contents for a finished experiment.
std::string report_json(const ExperimentPlan& plan, const grid::GridMap& map, const StatsReport& report);

/// Runs the plan and writes its artifacts under `out_dir`:
///   report.json, learning_curve.csv,
///   <variant>/game_NN.json, <variant>/store.json,
///   <variant>/heatmaps/game_NN_turn_TTT.{csv,ppm} for plan.heatmap_turns.
ExperimentResult simulate(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map,
                          const std::filesystem::path& out_dir);

struct CurveRow {
  int game_index = 0;
  std::string variant;
  double mean_distance = 0.0;
};

/// Reads a learning_curve.csv written by export_learning_curve.
std::vector<CurveRow> read_learning_curve(const std::filesystem::path& path);

struct RunSelection {
  std::optional<std::string> variant;
  std::optional<std::pair<int, int>> games;  // inclusive, 1-based
};

/// Welch's test between the per-game mean distances of two run directories.
WelchResult compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                         const RunSelection& selection = {});

}  // namespace hmmtrack::experiments
