#include "hmmtrack/experiments/simulate.hpp"

#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "hmmtrack/experiments/episode_log.hpp"
#include "hmmtrack/experiments/export.hpp"

namespace hmmtrack::experiments {

namespace {

std::string zero_pad(int k, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, k);
  return buf;
}

}  // namespace

std::string report_json(const ExperimentPlan& plan, const grid::GridMap& map, const StatsReport& report) {
  nlohmann::ordered_json doc;
  doc["map_hash"] = map.hash();
  doc["kind"] = to_string(plan.kind);
  doc["games"] = plan.games;
  if (plan.kind == PlanKind::Switch) doc["switch_at"] = plan.switch_at;
  doc["seed"] = plan.seed;
  doc["hesitation"] = plan.hesitation;
  auto& strategies = doc["strategies"] = nlohmann::ordered_json::array();
  for (const auto& s : plan.strategies) strategies.push_back({{"name", s.name}, {"moves", grid::format_moves(s.moves)}});
  auto& curves = doc["curves"] = nlohmann::ordered_json::array();
  for (const auto& c : report.curves) {
    curves.push_back({{"variant", to_string(c.variant)}, {"per_game_mean_distance", c.per_game_mean_distance}});
  }
  auto& comparisons = doc["comparisons"] = nlohmann::ordered_json::array();
  for (const auto& c : report.comparisons) {
    comparisons.push_back({{"label", c.label}, {"t", c.t}, {"df", c.df}, {"p", c.p}});
  }
  return doc.dump(2) + "\n";
}

ExperimentResult simulate(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map,
                          const std::filesystem::path& out_dir) {
  ExperimentResult result = run_experiment(plan, map, plan.rules);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "report.json", report_json(plan, *map, result.report));
  export_learning_curve(result.report, out_dir / "learning_curve.csv");
  for (const auto& run : result.runs) {
    const auto dir = out_dir / std::string(to_string(run.variant));
    std::filesystem::create_directories(dir);
    for (const auto& log : run.logs) {
      const std::string game = "game_" + zero_pad(log.game_index, 2);
      write_episode_log(log, dir / (game + ".json"));
      for (const auto& [turn, belief] : log.belief_snapshots) {
        std::filesystem::create_directories(dir / "heatmaps");
        export_heatmap(belief, *map, dir / "heatmaps" / (game + "_turn_" + zero_pad(turn, 3)));
      }
    }
    pursuit::save_store(run.final_store, dir / "store.json");
  }
  return result;
}

std::vector<CurveRow> read_learning_curve(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<CurveRow> rows;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (++line_no == 1 || line.empty()) continue;  // header
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    CurveRow row;
    row.variant = std::string(line.substr(c1 + 1, c2 - c1 - 1));
    auto r1 = std::from_chars(line.data(), line.data() + c1, row.game_index);
    auto r2 = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), row.mean_distance);
    if (r1.ec != std::errc() || r2.ec != std::errc()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

WelchResult compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                         const RunSelection& selection) {
  auto sample = [&](const std::filesystem::path& dir) {
    std::vector<double> xs;
    for (const auto& row : read_learning_curve(dir / "learning_curve.csv")) {
      if (selection.variant && row.variant != *selection.variant) continue;
      if (selection.games && (row.game_index < selection.games->first || row.game_index > selection.games->second)) {
        continue;
      }
      xs.push_back(row.mean_distance);
    }
    return xs;
  };
  const auto a = sample(run_a);
  const auto b = sample(run_b);
  return welch_t_test(a, b);
}

}  // namespace hmmtrack::experiments
