#include "hmmtrack/service/protocol.hpp"

#include <json.hpp>

namespace hmmtrack::service {

using json = nlohmann::ordered_json;
using experiments::GameRules;
using grid::Position;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void bad(const std::string& text) { throw ProtocolError(error_code::kBadMessage, text); }

json envelope(std::string_view type) {
  json j;
  j["protocol_version"] = kProtocolVersion;
  j["type"] = type;
  return j;
}

json pos_json(Position p) { return {{"x", p.x}, {"y", p.y}}; }

Position pos_from(const json& j) { return {j.at("x").get<int>(), j.at("y").get<int>()}; }

json positions_json(const std::vector<Position>& ps) {
  json a = json::array();
  for (Position p : ps) a.push_back(pos_json(p));
  return a;
}

std::vector<Position> positions_from(const json& j) {
  std::vector<Position> out;
  for (const auto& p : j) out.push_back(pos_from(p));
  return out;
}

json rules_json(const GameRules& r) {
  return {{"player_vision_radius", r.player_vision_radius},
          {"ai_vision_radius", r.ai_vision_radius},
          {"occupy_turns_to_win", r.occupy_turns_to_win},
          {"touch_rule", experiments::to_string(r.touch_rule)},
          {"max_turns", r.max_turns},
          {"occlusion", r.occlusion},
          {"distance_metric", experiments::to_string(r.distance_metric)},
          {"exclude_sighted_turns", r.exclude_sighted_turns}};
}

GameRules rules_from(const json& j) {
  GameRules r;
  r.player_vision_radius = j.at("player_vision_radius").get<int>();
  r.ai_vision_radius = j.at("ai_vision_radius").get<int>();
  r.occupy_turns_to_win = j.at("occupy_turns_to_win").get<int>();
  auto touch = experiments::touch_rule_from(j.at("touch_rule").get<std::string>());
  if (!touch) bad("unknown touch_rule");
  r.touch_rule = *touch;
  r.max_turns = j.at("max_turns").get<int>();
  r.occlusion = j.at("occlusion").get<bool>();
  auto metric = experiments::distance_metric_from(j.at("distance_metric").get<std::string>());
  if (!metric) bad("unknown distance_metric");
  r.distance_metric = *metric;
  r.exclude_sighted_turns = j.at("exclude_sighted_turns").get<bool>();
  return r;
}

json parse_envelope(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    bad("message is not valid JSON");
  }
  if (!j.is_object()) bad("message must be a JSON object");
  if (!j.contains("protocol_version") || !j["protocol_version"].is_number_integer()) {
    bad("message has no protocol_version");
  }
  if (j["protocol_version"].get<int>() != kProtocolVersion) {
    throw ProtocolError(error_code::kUnsupportedVersion,
                        "unsupported protocol_version " + std::to_string(j["protocol_version"].get<int>()));
  }
  if (!j.contains("type") || !j["type"].is_string()) bad("message has no type");
  return j;
}

}  // namespace

std::string_view message_type(const ClientMessage& msg) {
  return std::visit(Overloaded{[](const NewGame&) { return std::string_view("NewGame"); },
                               [](const Move&) { return std::string_view("Move"); },
                               [](const Resign&) { return std::string_view("Resign"); },
                               [](const SetDebug&) { return std::string_view("SetDebug"); }},
                    msg);
}

std::string_view message_type(const ServerMessage& msg) {
  return std::visit(Overloaded{[](const Welcome&) { return std::string_view("Welcome"); },
                               [](const State&) { return std::string_view("State"); },
                               [](const GameOver&) { return std::string_view("GameOver"); },
                               [](const LearningDone&) { return std::string_view("LearningDone"); },
                               [](const Error&) { return std::string_view("Error"); }},
                    msg);
}

std::string serialize(const ClientMessage& msg) {
  json j = envelope(message_type(msg));
  std::visit(Overloaded{[](const NewGame&) {}, [&](const Move& m) { j["action"] = grid::move_name(m.action); },
                        [](const Resign&) {}, [&](const SetDebug& m) { j["on"] = m.on; }},
             msg);
  return j.dump();
}

std::string serialize(const ServerMessage& msg) {
  json j = envelope(message_type(msg));
  std::visit(Overloaded{
                 [&](const Welcome& m) {
                   j["session_id"] = m.session_id;
                   j["map_name"] = m.map_name;
                   j["map"] = m.map_rows;
                   j["rules"] = rules_json(m.rules);
                 },
                 [&](const State& m) {
                   j["turn"] = m.turn;
                   j["agent_pos"] = pos_json(m.agent_pos);
                   j["ai_pos"] = pos_json(m.ai_pos);
                   j["goals"] = positions_json(m.goals);
                   j["cameras"] = positions_json(m.cameras);
                   j["occupy_progress"] = m.occupy_progress;
                   if (m.belief_grid) {
                     json rows = json::array();
                     for (const auto& row : *m.belief_grid) {
                       json r = json::array();
                       for (const auto& cell : row) r.push_back(cell ? json(*cell) : json(nullptr));
                       rows.push_back(std::move(r));
                     }
                     j["belief_grid"] = std::move(rows);
                   }
                 },
                 [&](const GameOver& m) {
                   j["outcome"] = experiments::to_string(m.outcome);
                   j["mean_distance"] = m.mean_distance;
                   j["games_played"] = m.games_played;
                 },
                 [&](const LearningDone& m) { j["games_played"] = m.games_played; },
                 [&](const Error& m) {
                   j["code"] = m.code;
                   j["text"] = m.text;
                 }},
             msg);
  return j.dump();
}

ClientMessage parse_client_message(const std::string& text) {
  const json j = parse_envelope(text);
  const auto type = j["type"].get<std::string>();
  try {
    if (type == "NewGame") return NewGame{};
    if (type == "Resign") return Resign{};
    if (type == "SetDebug") return SetDebug{j.at("on").get<bool>()};
    if (type == "Move") {
      auto action = grid::move_from_name(j.at("action").get<std::string>());
      if (!action) bad("unknown move action '" + j.at("action").get<std::string>() + "'");
      return Move{*action};
    }
  } catch (const json::exception& e) {
    bad(type + ": " + e.what());
  }
  bad("unknown client message type '" + type + "'");
}

ServerMessage parse_server_message(const std::string& text) {
  const json j = parse_envelope(text);
  const auto type = j["type"].get<std::string>();
  try {
    if (type == "Welcome") {
      return Welcome{j.at("session_id").get<std::string>(), j.at("map_name").get<std::string>(),
                     j.at("map").get<std::vector<std::string>>(), rules_from(j.at("rules"))};
    }
    if (type == "State") {
      State s;
      s.turn = j.at("turn").get<int>();
      s.agent_pos = pos_from(j.at("agent_pos"));
      s.ai_pos = pos_from(j.at("ai_pos"));
      s.goals = positions_from(j.at("goals"));
      s.cameras = positions_from(j.at("cameras"));
      s.occupy_progress = j.at("occupy_progress").get<int>();
      if (j.contains("belief_grid")) {
        BeliefGrid grid;
        for (const auto& row : j["belief_grid"]) {
          auto& r = grid.emplace_back();
          for (const auto& cell : row) {
            r.push_back(cell.is_null() ? std::nullopt : std::optional<double>(cell.get<double>()));
          }
        }
        s.belief_grid = std::move(grid);
      }
      return s;
    }
    if (type == "GameOver") {
      auto outcome = experiments::outcome_from(j.at("outcome").get<std::string>());
      if (!outcome) bad("unknown outcome");
      return GameOver{*outcome, j.at("mean_distance").get<double>(), j.at("games_played").get<int>()};
    }
    if (type == "LearningDone") return LearningDone{j.at("games_played").get<int>()};
    if (type == "Error") return Error{j.at("code").get<std::string>(), j.at("text").get<std::string>()};
  } catch (const json::exception& e) {
    bad(type + ": " + e.what());
  }
  bad("unknown server message type '" + type + "'");
}

}  // namespace hmmtrack::service
