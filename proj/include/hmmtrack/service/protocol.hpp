#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hmmtrack/experiments/game.hpp"
#include "hmmtrack/grid/grid_map.hpp"

namespace hmmtrack::service {

inline constexpr int kProtocolVersion = 1;

// Client -> server.
struct NewGame {
  bool operator==(const NewGame&) const = default;
};
struct Move {
  grid::MoveAction action = grid::MoveAction::Stay;
  bool operator==(const Move&) const = default;
};
struct Resign {
  bool operator==(const Resign&) const = default;
};
struct SetDebug {
  bool on = false;
  bool operator==(const SetDebug&) const = default;
};
using ClientMessage = std::variant<NewGame, Move, Resign, SetDebug>;

/// Rows of the map; walls are nullopt, floor tiles the belief.
using BeliefGrid = std::vector<std::vector<std::optional<double>>>;

// Server -> client.
struct Welcome {
  std::string session_id;
  std::string map_name;
  std::vector<std::string> map_rows;  // map alphabet, see parse_map
  experiments::GameRules rules;
  bool operator==(const Welcome&) const = default;
};
struct State {
  int turn = 0;
  grid::Position agent_pos;
  grid::Position ai_pos;
  std::vector<grid::Position> goals;
  std::vector<grid::Position> cameras;
  int occupy_progress = 0;
  std::optional<BeliefGrid> belief_grid;
  bool operator==(const State&) const = default;
};
struct GameOver {
  experiments::Outcome outcome = experiments::Outcome::TurnLimit;
  double mean_distance = 0.0;
  int games_played = 0;
  bool operator==(const GameOver&) const = default;
};
struct LearningDone {
  int games_played = 0;
  bool operator==(const LearningDone&) const = default;
};
struct Error {
  std::string code;
  std::string text;
  bool operator==(const Error&) const = default;
};
using ServerMessage = std::variant<Welcome, State, GameOver, LearningDone, Error>;

namespace error_code {
inline constexpr const char* kBadMessage = "bad_message";
inline constexpr const char* kUnsupportedVersion = "unsupported_version";
inline constexpr const char* kIllegalMove = "illegal_move";
inline constexpr const char* kNoLiveGame = "no_live_game";
inline constexpr const char* kGameInProgress = "game_in_progress";
inline constexpr const char* kDebugDisabled = "debug_disabled";
inline constexpr const char* kUnknownMap = "unknown_map";
inline constexpr const char* kLearningFailed = "learning_failed";
}  // namespace error_code

/// Carries one of the error_code values.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& text) : std::runtime_error(text), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

std::string serialize(const ClientMessage& msg);
std::string serialize(const ServerMessage& msg);
/// Both throw ProtocolError (bad_message or unsupported_version).
ClientMessage parse_client_message(const std::string& text);
ServerMessage parse_server_message(const std::string& text);

std::string_view message_type(const ClientMessage& msg);
std::string_view message_type(const ServerMessage& msg);

}  // namespace hmmtrack::service
