#include "hmmtrack/experiments/experiment.hpp"

#include <random>

#include "hmmtrack/experiments/stats.hpp"
#include "hmmtrack/grid/visibility.hpp"

namespace hmmtrack::experiments {

const LearningCurve& StatsReport::curve(Variant v) const {
  for (const auto& c : curves) {
    if (c.variant == v) return c;
  }
  throw std::out_of_range("report has no curve for variant " + std::string(to_string(v)));
}

std::vector<std::uint64_t> game_seeds(std::uint64_t plan_seed, int games) {
  std::mt19937_64 rng(plan_seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(games));
  for (auto& s : seeds) s = rng();
  return seeds;
}

namespace {

pursuit::KnowledgeStore pretrained_store(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map,
                                         const GameRules& rules, const hmm::InitialDistribution& mu) {
  pursuit::KnowledgeStore store = pursuit::make_store(*map, plan.blend_lambda, plan.short_window);
  if (!plan.warmup_store.empty()) {
    store = pursuit::load_store(plan.warmup_store, *map);
    store.blend_lambda = plan.blend_lambda;
    store.short_window = plan.short_window;
  } else {
    // One warm-up game per strategy against the uniform tracker.
    const auto uniform = grid::uniform_transition(*map);
    for (const auto& strategy : plan.strategies) {
      GameSetup setup;
      setup.game_index = 0;
      setup.variant = "warmup";
      run_game(map, rules, strategy, uniform, &store, setup);
    }
  }
  if (store.episodes.empty()) return store;
  return pursuit::learn(store, *map, mu, plan.baum_welch);
}

}  // namespace

VariantRun run_variant(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map, const GameRules& rules,
                       Variant variant) {
  plan.validate();
  const auto mu = pursuit::start_distribution(*map);
  const auto seeds = game_seeds(plan.seed, plan.games);

  std::vector<EpisodeLog> logs;
  pursuit::KnowledgeStore store = variant == Variant::PretrainedStatic
                                      ? pretrained_store(plan, map, rules, mu)
                                      : pursuit::make_store(*map, plan.blend_lambda, plan.short_window);
  const hmm::TransitionMatrix frozen = variant == Variant::UniformStatic ? grid::uniform_transition(*map)
                                                                          : pursuit::blended_matrix(store);

  for (int g = 1; g <= plan.games; ++g) {
    GameSetup setup;
    setup.game_index = g;
    setup.variant = std::string(to_string(variant));
    setup.hesitation = plan.hesitation;
    setup.seed = seeds[static_cast<std::size_t>(g - 1)];
    setup.snapshot_turns = plan.heatmap_turns;

    if (variant == Variant::Adaptive) {
      logs.push_back(run_game(map, rules, plan.strategy_for(g), pursuit::blended_matrix(store), &store, setup));
      store = pursuit::learn(store, *map, mu, plan.baum_welch);
    } else {
      logs.push_back(run_game(map, rules, plan.strategy_for(g), frozen, nullptr, setup));
    }
  }
  return VariantRun{variant, std::move(logs), std::move(store)};
}

ExperimentResult run_experiment(const ExperimentPlan& plan, std::shared_ptr<const grid::GridMap> map,
                                const GameRules& rules) {
  ExperimentResult result;
  for (Variant v : plan.variants) {
    result.runs.push_back(run_variant(plan, map, rules, v));
    LearningCurve curve;
    curve.variant = v;
    for (const auto& log : result.runs.back().logs) {
      curve.per_game_mean_distance.push_back(mean_estimate_distance(log, rules.exclude_sighted_turns));
    }
    result.report.curves.push_back(std::move(curve));
  }

  if (plan.compare_games) {
    const auto [lo, hi] = *plan.compare_games;
    const auto& curves = result.report.curves;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      for (std::size_t j = i + 1; j < curves.size(); ++j) {
        std::span<const double> a(curves[i].per_game_mean_distance);
        std::span<const double> b(curves[j].per_game_mean_distance);
        a = a.subspan(static_cast<std::size_t>(lo - 1), static_cast<std::size_t>(hi - lo + 1));
        b = b.subspan(static_cast<std::size_t>(lo - 1), static_cast<std::size_t>(hi - lo + 1));
        try {
          const auto w = welch_t_test(a, b);
          result.report.comparisons.push_back(
              {std::string(to_string(curves[i].variant)) + " vs " + std::string(to_string(curves[j].variant)) +
                   " games " + std::to_string(lo) + "-" + std::to_string(hi),
               w.t, w.df, w.p});
        } catch (const DegenerateVariance&) {
          // Both curves are constant over the range; nothing to test.
        }
      }
    }
  }
  return result;
}

}  // namespace hmmtrack::experiments
