#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmmtrack/experiments/game.hpp"
#include "hmmtrack/hmm/baum_welch.hpp"

namespace hmmtrack::experiments {

enum class PlanKind { Repeat, Switch, Alternate };
enum class Variant { UniformStatic, PretrainedStatic, Adaptive };

std::string_view to_string(PlanKind k);
std::string_view to_string(Variant v);
std::optional<PlanKind> plan_kind_from(std::string_view s);
std::optional<Variant> variant_from(std::string_view s);

struct ExperimentPlan {
  PlanKind kind = PlanKind::Repeat;
  std::vector<ScriptedStrategy> strategies;
  int games = 10;
  int switch_at = 0;  // last game of the first strategy (switch plans)
  std::vector<Variant> variants{Variant::Adaptive};
  std::uint64_t seed = 0;
  double hesitation = 0.0;
  std::vector<int> heatmap_turns;
  /// Inclusive 1-based game range compared across variants with Welch's test.
  std::optional<std::pair<int, int>> compare_games;
  double blend_lambda = 0.5;
  std::size_t short_window = 3;
  hmm::BaumWelchOptions baum_welch;
  /// Archive the pretrained_static variant learns from; empty means one
  /// warm-up game per strategy against the uniform tracker.
  std::filesystem::path warmup_store;
  std::filesystem::path map_path;
  GameRules rules;

  /// Throws std::invalid_argument when the plan is inconsistent.
  void validate() const;
  /// Strategy played in game `game_index` (1-based).
  const ScriptedStrategy& strategy_for(int game_index) const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, std::size_t line, const std::string& message);
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Parses the key=value plan format. Relative paths are resolved against
/// `base_dir`. `source` names the text in error messages.
ExperimentPlan parse_plan(std::string_view text, const std::string& source = "plan",
                          const std::filesystem::path& base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path& path);

}  // namespace hmmtrack::experiments
