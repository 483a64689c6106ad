#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hmmtrack/experiments/experiment.hpp"
#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::experiments {

/// Probability grid, one CSV row per map row; walls are empty cells and
/// floor tiles carry the belief with 6 decimals.
std::string heatmap_csv(const hmm::Vector& belief, const grid::GridMap& map);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Walls black, zero probability white, otherwise a linear white to dark red
/// ramp where the belief's maximum maps to dark red.
std::vector<Rgb> heatmap_pixels(const hmm::Vector& belief, const grid::GridMap& map);
/// Binary PPM (P6), one pixel per tile.
std::string heatmap_ppm(const hmm::Vector& belief, const grid::GridMap& map);

/// Writes `<stem>.csv` and `<stem>.ppm`.
void export_heatmap(const hmm::Vector& belief, const grid::GridMap& map, const std::filesystem::path& stem);

/// Columns game_index,variant,mean_distance; one row per game per variant.
std::string learning_curve_csv(const StatsReport& report);
void export_learning_curve(const StatsReport& report, const std::filesystem::path& path);

/// Writes `text` to `path` exactly, throwing std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hmmtrack::experiments
