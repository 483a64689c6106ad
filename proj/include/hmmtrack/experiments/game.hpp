#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/grid/visibility.hpp"
#include "hmmtrack/hmm/types.hpp"
#include "hmmtrack/pursuit/knowledge_store.hpp"
#include "hmmtrack/pursuit/tracker.hpp"

namespace hmmtrack::experiments {

enum class TouchRule { SameTile, Adjacent4 };
enum class DistanceMetric { Euclidean, ShortestPath };
enum class Outcome { AgentWon, AiWon, TurnLimit, Resigned };

std::string_view to_string(TouchRule r);
std::string_view to_string(DistanceMetric m);
std::string_view to_string(Outcome o);
std::optional<TouchRule> touch_rule_from(std::string_view s);
std::optional<DistanceMetric> distance_metric_from(std::string_view s);
std::optional<Outcome> outcome_from(std::string_view s);

struct GameRules {
  int player_vision_radius = 2;
  int ai_vision_radius = 1;
  int occupy_turns_to_win = 3;
  TouchRule touch_rule = TouchRule::Adjacent4;
  int max_turns = 200;
  bool occlusion = false;
  DistanceMetric distance_metric = DistanceMetric::Euclidean;
  /// Leave turns where the agent was in view out of the mean distance.
  bool exclude_sighted_turns = false;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  bool operator==(const GameRules&) const = default;
};

/// A fixed path from the player start; the agent stays put once it runs out.
struct ScriptedStrategy {
  std::string name;
  std::vector<grid::MoveAction> moves;
};

class ScriptIllegalMove : public std::runtime_error {
 public:
  ScriptIllegalMove(const std::string& strategy, std::size_t move_index, grid::Position from, grid::MoveAction act);
};

/// Throws ScriptIllegalMove unless every move of the script is legal when
/// replayed from the player start.
void validate_strategy(const grid::GridMap& map, const ScriptedStrategy& strategy);

/// Drives a scripted strategy turn by turn. With hesitation p > 0 the agent
/// waits in place with probability p before each scripted move.
class ScriptedAgent {
 public:
  ScriptedAgent(ScriptedStrategy strategy, double hesitation, std::uint64_t seed);
  grid::MoveAction next_action();
  const ScriptedStrategy& strategy() const noexcept { return strategy_; }
  std::size_t cursor() const noexcept { return cursor_; }

 private:
  ScriptedStrategy strategy_;
  double hesitation_;
  std::mt19937_64 rng_;
  std::size_t cursor_ = 0;
};

struct TurnRecord {
  int turn = 0;
  grid::MoveAction agent_action = grid::MoveAction::Stay;
  grid::Position agent_pos;
  grid::MoveAction ai_action = grid::MoveAction::Stay;
  grid::Position ai_pos;  // after the AI's move
  std::vector<std::size_t> observed;  // W as state indices
  std::optional<grid::Position> sighting;
  grid::Position belief_argmax;
  double belief_argmax_prob = 0.0;
  double distance = 0.0;
  bool belief_reset = false;

  bool operator==(const TurnRecord&) const = default;
};

struct EpisodeLog {
  int game_index = 0;
  std::string variant;
  std::string strategy;
  Outcome outcome = Outcome::TurnLimit;
  std::vector<TurnRecord> records;
  /// Turn-0 observation followed by one observation per turn.
  hmm::ObservationSequence observations;
  /// Matrix the tracker filtered with during this game.
  std::optional<hmm::TransitionMatrix> tracker_matrix;
  /// Full beliefs captured at requested turns, keyed by turn.
  std::map<int, hmm::Vector> belief_snapshots;

  bool operator==(const EpisodeLog&) const = default;
};

/// One live game. The constructor performs the AI's turn-0 observation with
/// both avatars on their start tiles.
class Game {
 public:
  Game(std::shared_ptr<const grid::GridMap> map, GameRules rules, hmm::TransitionMatrix tracker_matrix);

  /// Plays one full turn: agent move, agent win check, AI observation, AI
  /// move, touch check. Throws grid::IllegalMove (turn not consumed) or
  /// std::logic_error after the game has ended.
  const TurnRecord& play_turn(grid::MoveAction agent_action);
  void resign();

  bool finished() const noexcept { return outcome_.has_value(); }
  std::optional<Outcome> outcome() const noexcept { return outcome_; }
  int turn() const noexcept { return turn_; }
  grid::Position agent_pos() const noexcept { return agent_pos_; }
  grid::Position ai_pos() const noexcept { return ai_pos_; }
  int occupy_progress() const noexcept { return occupy_; }
  const GameRules& rules() const noexcept { return rules_; }
  const grid::GridMap& map() const noexcept { return *map_; }
  const pursuit::TrackerState& tracker() const noexcept { return tracker_; }
  const EpisodeLog& log() const noexcept { return log_; }
  EpisodeLog& log() noexcept { return log_; }

 private:
  void observe();
  bool touching() const;
  double estimate_distance(grid::Position estimate) const;

  std::shared_ptr<const grid::GridMap> map_;
  GameRules rules_;
  pursuit::TrackerState tracker_;
  grid::Position agent_pos_;
  grid::Position ai_pos_;
  int turn_ = 0;
  int occupy_ = 0;
  std::optional<Outcome> outcome_;
  EpisodeLog log_;
  std::vector<grid::Position> last_observed_;
  std::optional<grid::Position> last_sighting_;
};

struct GameSetup {
  int game_index = 1;
  std::string variant;
  double hesitation = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> snapshot_turns;
};

/// Plays a whole scripted game. When `store` is given the episode's
/// observation sequence is archived into it.
EpisodeLog run_game(std::shared_ptr<const grid::GridMap> map, const GameRules& rules,
                    const ScriptedStrategy& strategy, const hmm::TransitionMatrix& tracker_matrix,
                    pursuit::KnowledgeStore* store, const GameSetup& setup = {});

/// Mean of the per-turn estimate distances (optionally skipping sighted turns).
double mean_estimate_distance(const EpisodeLog& log, bool exclude_sighted_turns = false);

}  // namespace hmmtrack::experiments
