#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hmmtrack/experiments/game.hpp"
#include "hmmtrack/experiments/plan.hpp"
#include "hmmtrack/pursuit/knowledge_store.hpp"

namespace hmmtrack::experiments {

struct LearningCurve {
  Variant variant = Variant::Adaptive;
  std::vector<double> per_game_mean_distance;

  bool operator==(const LearningCurve&) const = default;
};

struct Comparison {
  std::string label;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;

  bool operator==(const Comparison&) const = default;
};

struct StatsReport {
  std::vector<LearningCurve> curves;
  std::vector<Comparison> comparisons;

  const LearningCurve& curve(Variant v) const;
  bool operator==(const StatsReport&) const = default;
};

struct VariantRun {
  Variant variant = Variant::Adaptive;
  std::vector<EpisodeLog> logs;
  pursuit::KnowledgeStore final_store;
};

struct ExperimentResult {
  StatsReport report;
  std::vector<VariantRun> runs;
};

/// Per-game agent seeds: game k (1-based) uses element k-1. Every variant of
/// one plan sees the same seeds.
std::vector<std::uint64_t> game_seeds(std::uint64_t plan_seed, int games);

/// Plays the plan's game sequence for one tracker variant.
VariantRun run_variant(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map, const GameRules& rules,
                       Variant variant);

/// Runs every variant in the plan and compares each pair over
/// plan.compare_games with Welch's test. Pairs whose samples both have zero
/// variance are left out of the comparisons.
ExperimentResult run_experiment(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map,
                                const GameRules& rules);

}  // namespace hmmtrack::experiments
