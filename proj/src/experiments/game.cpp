#include "hmmtrack/experiments/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hmmtrack/pursuit/pathfinding.hpp"

namespace hmmtrack::experiments {

using grid::MoveAction;
using grid::Position;

std::string_view to_string(TouchRule r) { return r == TouchRule::SameTile ? "same_tile" : "adjacent4"; }

std::string_view to_string(DistanceMetric m) {
  return m == DistanceMetric::Euclidean ? "euclidean" : "shortest_path";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::AgentWon: return "agent_won";
    case Outcome::AiWon: return "ai_won";
    case Outcome::TurnLimit: return "turn_limit";
    case Outcome::Resigned: return "resigned";
  }
  return "?";
}

std::optional<TouchRule> touch_rule_from(std::string_view s) {
  if (s == "same_tile") return TouchRule::SameTile;
  if (s == "adjacent4") return TouchRule::Adjacent4;
  return std::nullopt;
}

std::optional<DistanceMetric> distance_metric_from(std::string_view s) {
  if (s == "euclidean") return DistanceMetric::Euclidean;
  if (s == "shortest_path") return DistanceMetric::ShortestPath;
  return std::nullopt;
}

std::optional<Outcome> outcome_from(std::string_view s) {
  for (Outcome o : {Outcome::AgentWon, Outcome::AiWon, Outcome::TurnLimit, Outcome::Resigned}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

void GameRules::validate() const {
  if (player_vision_radius < 0) throw std::invalid_argument("player_vision_radius must be >= 0");
  if (ai_vision_radius < 0) throw std::invalid_argument("ai_vision_radius must be >= 0");
  if (occupy_turns_to_win < 1) throw std::invalid_argument("occupy_turns_to_win must be positive");
  if (max_turns < 1) throw std::invalid_argument("max_turns must be positive");
}

ScriptIllegalMove::ScriptIllegalMove(const std::string& strategy, std::size_t move_index, Position from,
                                     MoveAction act)
    : std::runtime_error("strategy '" + strategy + "': move " + std::to_string(move_index + 1) + " (" +
                         std::string(grid::move_name(act)) + ") is illegal from " + grid::to_string(from)) {}

void validate_strategy(const grid::GridMap& map, const ScriptedStrategy& strategy) {
  Position p = map.player_start();
  for (std::size_t k = 0; k < strategy.moves.size(); ++k) {
    if (!grid::is_legal(map, p, strategy.moves[k])) throw ScriptIllegalMove(strategy.name, k, p, strategy.moves[k]);
    p = grid::step(p, strategy.moves[k]);
  }
}

ScriptedAgent::ScriptedAgent(ScriptedStrategy strategy, double hesitation, std::uint64_t seed)
    : strategy_(std::move(strategy)), hesitation_(hesitation), rng_(seed) {
  if (!(hesitation_ >= 0.0 && hesitation_ < 1.0)) throw std::invalid_argument("hesitation must lie in [0,1)");
}

MoveAction ScriptedAgent::next_action() {
  if (hesitation_ > 0.0) {
    // 53-bit uniform in [0,1), identical on every platform.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u < hesitation_) return MoveAction::Stay;
  }
  if (cursor_ < strategy_.moves.size()) return strategy_.moves[cursor_++];
  return MoveAction::Stay;
}

// ---------------------------------------------------------------------------
// Game
// ---------------------------------------------------------------------------

Game::Game(std::shared_ptr<const grid::GridMap> map, GameRules rules, hmm::TransitionMatrix tracker_matrix)
    : map_(std::move(map)),
      rules_(rules),
      tracker_(pursuit::init_tracker(map_, pursuit::start_distribution(*map_), tracker_matrix)),
      agent_pos_(map_->player_start()),
      ai_pos_(map_->ai_start()) {
  rules_.validate();
  log_.tracker_matrix = std::move(tracker_matrix);
  observe();
}

void Game::observe() {
  const grid::VisibilitySpec spec{rules_.ai_vision_radius, rules_.occlusion};
  last_observed_ = grid::visible_set(*map_, ai_pos_, spec, true);
  last_sighting_.reset();
  if (agent_pos_ == ai_pos_ || std::binary_search(last_observed_.begin(), last_observed_.end(), agent_pos_,
                                                  [&](Position a, Position b) {
                                                    return map_->index_of(a) < map_->index_of(b);
                                                  })) {
    last_sighting_ = agent_pos_;
  }
  const auto obs = grid::observation_vector(*map_, last_observed_, last_sighting_);
  tracker_ = pursuit::ingest_observation(std::move(tracker_), obs);
  log_.observations.push_back(obs);
}

bool Game::touching() const {
  if (rules_.touch_rule == TouchRule::SameTile) return agent_pos_ == ai_pos_;
  return std::abs(agent_pos_.x - ai_pos_.x) + std::abs(agent_pos_.y - ai_pos_.y) <= 1;
}

double Game::estimate_distance(Position estimate) const {
  if (rules_.distance_metric == DistanceMetric::ShortestPath) {
    const auto field = pursuit::dijkstra(*map_, estimate);
    return static_cast<double>(field.dist[map_->index_of(agent_pos_)]);
  }
  const double dx = agent_pos_.x - estimate.x;
  const double dy = agent_pos_.y - estimate.y;
  return std::sqrt(dx * dx + dy * dy);
}

const TurnRecord& Game::play_turn(MoveAction agent_action) {
  if (finished()) throw std::logic_error("the game is over");
  agent_pos_ = grid::apply_move(*map_, agent_pos_, agent_action);
  ++turn_;

  TurnRecord rec;
  rec.turn = turn_;
  rec.agent_action = agent_action;
  rec.agent_pos = agent_pos_;

  occupy_ = map_->is_goal(agent_pos_) ? occupy_ + 1 : 0;
  const bool agent_won = occupy_ >= rules_.occupy_turns_to_win;

  observe();
  rec.observed.reserve(last_observed_.size());
  for (Position p : last_observed_) rec.observed.push_back(map_->index_of(p));
  rec.sighting = last_sighting_;
  rec.belief_reset = tracker_.last_step_collapsed;
  const std::size_t best = pursuit::estimate_state(tracker_);
  rec.belief_argmax = map_->position(best);
  rec.belief_argmax_prob = tracker_.belief()[best];
  rec.distance = estimate_distance(rec.belief_argmax);

  if (agent_won) {
    outcome_ = Outcome::AgentWon;
  } else {
    rec.ai_action = pursuit::next_move(*map_, ai_pos_, rec.belief_argmax);
    ai_pos_ = grid::apply_move(*map_, ai_pos_, rec.ai_action);
    if (touching()) outcome_ = Outcome::AiWon;
    else if (turn_ >= rules_.max_turns) outcome_ = Outcome::TurnLimit;
  }
  rec.ai_pos = ai_pos_;
  if (outcome_) log_.outcome = *outcome_;
  log_.records.push_back(std::move(rec));
  return log_.records.back();
}

void Game::resign() {
  if (finished()) throw std::logic_error("the game is over");
  outcome_ = Outcome::Resigned;
  log_.outcome = Outcome::Resigned;
}

// ---------------------------------------------------------------------------

EpisodeLog run_game(std::shared_ptr<const grid::GridMap> map, const GameRules& rules,
                    const ScriptedStrategy& strategy, const hmm::TransitionMatrix& tracker_matrix,
                    pursuit::KnowledgeStore* store, const GameSetup& setup) {
  validate_strategy(*map, strategy);
  Game game(map, rules, tracker_matrix);
  ScriptedAgent agent(strategy, setup.hesitation, setup.seed);
  auto snapshot = [&](int turn) {
    if (std::find(setup.snapshot_turns.begin(), setup.snapshot_turns.end(), turn) != setup.snapshot_turns.end()) {
      game.log().belief_snapshots[turn] = game.tracker().belief();
    }
  };
  snapshot(0);
  while (!game.finished()) {
    const MoveAction act = agent.next_action();
    try {
      game.play_turn(act);
    } catch (const grid::IllegalMove&) {
      throw ScriptIllegalMove(strategy.name, agent.cursor() - 1, game.agent_pos(), act);
    }
    snapshot(game.turn());
  }
  EpisodeLog log = game.log();
  log.game_index = setup.game_index;
  log.variant = setup.variant;
  log.strategy = strategy.name;
  if (store) store->episodes.push_back(log.observations);
  return log;
}

double mean_estimate_distance(const EpisodeLog& log, bool exclude_sighted_turns) {
  if (log.records.empty()) throw std::invalid_argument("mean_estimate_distance: empty episode log");
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& rec : log.records) {
    if (exclude_sighted_turns && rec.sighting) continue;
    total += rec.distance;
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace hmmtrack::experiments
