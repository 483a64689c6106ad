#include "hmmtrack/experiments/episode_log.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hmmtrack/grid/visibility.hpp"

namespace hmmtrack::experiments {

using json = nlohmann::ordered_json;
using grid::Position;

namespace {

json pos_json(Position p) { return json::array({p.x, p.y}); }

Position pos_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json observation_json(const hmm::ObservationVector& v) {
  using Kind = hmm::ObservationVector::Kind;
  json j = json::object();
  switch (v.kind()) {
    case Kind::DirectSighting: j["s"] = *v.sighted_state(); break;
    case Kind::NegativeInfo: j["w"] = v.zeros(); break;
    case Kind::General: j["b"] = v.values(); break;
  }
  return j;
}

hmm::ObservationVector observation_from(const json& j, std::size_t n) {
  if (j.contains("s")) return hmm::ObservationVector::direct_sighting(n, j.at("s").get<std::size_t>());
  if (j.contains("w")) return hmm::ObservationVector::negative_info(n, j.at("w").get<std::vector<std::size_t>>());
  return hmm::ObservationVector::from_values(j.at("b").get<hmm::Vector>(), hmm::ObservationVector::Kind::General);
}

grid::MoveAction move_from_json(const json& j) {
  auto m = grid::move_from_name(j.get<std::string>());
  if (!m) throw std::runtime_error("episode log: bad move name");
  return *m;
}

}  // namespace

std::string serialize_episode_log(const EpisodeLog& log) {
  json doc;
  doc["game_index"] = log.game_index;
  doc["variant"] = log.variant;
  doc["strategy"] = log.strategy;
  doc["outcome"] = to_string(log.outcome);
  doc["turns"] = log.records.size();
  doc["mean_distance"] = log.records.empty() ? 0.0 : mean_estimate_distance(log);

  json records = json::array();
  for (const auto& r : log.records) {
    json jr;
    jr["turn"] = r.turn;
    jr["agent_action"] = grid::move_name(r.agent_action);
    jr["agent_pos"] = pos_json(r.agent_pos);
    jr["ai_action"] = grid::move_name(r.ai_action);
    jr["ai_pos"] = pos_json(r.ai_pos);
    jr["observed"] = r.observed;
    jr["sighting"] = r.sighting ? pos_json(*r.sighting) : json(nullptr);
    jr["belief_argmax"] = pos_json(r.belief_argmax);
    jr["belief_argmax_prob"] = r.belief_argmax_prob;
    jr["distance"] = r.distance;
    jr["belief_reset"] = r.belief_reset;
    records.push_back(std::move(jr));
  }
  doc["records"] = std::move(records);

  json obs = json::array();
  for (const auto& v : log.observations.steps()) obs.push_back(observation_json(v));
  doc["observations"] = std::move(obs);

  if (log.tracker_matrix) {
    // Sparse rows: [[column, probability], ...] over the support.
    json rows = json::array();
    const auto& m = *log.tracker_matrix;
    for (std::size_t i = 0; i < m.size(); ++i) {
      json row = json::array();
      for (std::size_t j : m.support(i)) row.push_back(json::array({j, m(i, j)}));
      rows.push_back(std::move(row));
    }
    doc["tracker_matrix"] = std::move(rows);
  } else {
    doc["tracker_matrix"] = nullptr;
  }

  json snaps = json::object();
  for (const auto& [turn, belief] : log.belief_snapshots) snaps[std::to_string(turn)] = belief;
  doc["belief_snapshots"] = std::move(snaps);
  return doc.dump(1) + "\n";
}

EpisodeLog parse_episode_log(const std::string& text, const grid::GridMap& map) {
  const json doc = json::parse(text);
  const std::size_t n = map.state_count();
  EpisodeLog log;
  log.game_index = doc.at("game_index").get<int>();
  log.variant = doc.at("variant").get<std::string>();
  log.strategy = doc.at("strategy").get<std::string>();
  auto outcome = outcome_from(doc.at("outcome").get<std::string>());
  if (!outcome) throw std::runtime_error("episode log: bad outcome");
  log.outcome = *outcome;

  for (const auto& jr : doc.at("records")) {
    TurnRecord r;
    r.turn = jr.at("turn").get<int>();
    r.agent_action = move_from_json(jr.at("agent_action"));
    r.agent_pos = pos_from(jr.at("agent_pos"));
    r.ai_action = move_from_json(jr.at("ai_action"));
    r.ai_pos = pos_from(jr.at("ai_pos"));
    r.observed = jr.at("observed").get<std::vector<std::size_t>>();
    if (!jr.at("sighting").is_null()) r.sighting = pos_from(jr.at("sighting"));
    r.belief_argmax = pos_from(jr.at("belief_argmax"));
    r.belief_argmax_prob = jr.at("belief_argmax_prob").get<double>();
    r.distance = jr.at("distance").get<double>();
    r.belief_reset = jr.at("belief_reset").get<bool>();
    log.records.push_back(std::move(r));
  }

  for (const auto& jo : doc.at("observations")) log.observations.push_back(observation_from(jo, n));

  if (!doc.at("tracker_matrix").is_null()) {
    hmm::Vector values(n * n, 0.0);
    const auto& rows = doc.at("tracker_matrix");
    if (rows.size() != n) throw std::runtime_error("episode log: tracker matrix size differs from the map");
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& e : rows.at(i)) values[i * n + e.at(0).get<std::size_t>()] = e.at(1).get<double>();
    }
    log.tracker_matrix = hmm::TransitionMatrix::from_dense(n, std::move(values),
                                                           grid::uniform_transition(map).support_mask());
  }

  for (const auto& [key, belief] : doc.at("belief_snapshots").items()) {
    log.belief_snapshots[std::stoi(key)] = belief.get<hmm::Vector>();
  }
  return log;
}

std::vector<hmm::Vector> replay_beliefs(const EpisodeLog& log, std::shared_ptr<const grid::GridMap> map) {
  if (!log.tracker_matrix) throw std::invalid_argument("episode log has no tracker matrix to replay with");
  auto tracker = pursuit::init_tracker(map, pursuit::start_distribution(*map), *log.tracker_matrix);
  std::vector<hmm::Vector> out;
  out.reserve(log.observations.length());
  for (const auto& obs : log.observations.steps()) {
    tracker = pursuit::ingest_observation(std::move(tracker), obs);
    out.push_back(tracker.belief());
  }
  return out;
}

void write_episode_log(const EpisodeLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write episode log " + path.string());
  out << serialize_episode_log(log);
}

EpisodeLog read_episode_log(const std::filesystem::path& path, const grid::GridMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read episode log " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_episode_log(buf.str(), map);
}

}  // namespace hmmtrack::experiments
