#include "hmmtrack/pursuit/knowledge_store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hmmtrack/grid/visibility.hpp"

namespace hmmtrack::pursuit {

KnowledgeStore make_store(const grid::GridMap& map, double blend_lambda, std::size_t short_window) {
  if (!(blend_lambda >= 0.0 && blend_lambda <= 1.0)) throw std::invalid_argument("blend lambda must lie in [0,1]");
  if (short_window == 0) throw std::invalid_argument("short window must be positive");
  auto uniform = grid::uniform_transition(map);
  return KnowledgeStore{map.hash(), {}, uniform, uniform, blend_lambda, short_window};
}

hmm::InitialDistribution start_distribution(const grid::GridMap& map) {
  return hmm::InitialDistribution::point_mass(map.state_count(), map.index_of(map.player_start()));
}

KnowledgeStore learn(const KnowledgeStore& store, const grid::GridMap& map, const hmm::InitialDistribution& mu,
                     const hmm::BaumWelchOptions& opts) {
  if (store.episodes.empty()) throw std::invalid_argument("learn: the store has no archived episodes");
  KnowledgeStore out = store;
  std::span<const hmm::ObservationSequence> all(store.episodes);
  out.long_term = hmm::baum_welch(all, mu, store.long_term, opts).a_hat;

  const std::size_t k = std::min(store.short_window, all.size());
  const std::size_t first = all.size() - k;
  try {
    out.short_term = hmm::baum_welch(all.subspan(first), mu, grid::uniform_transition(map), opts).a_hat;
  } catch (const hmm::InconsistentObservations& e) {
    throw hmm::InconsistentObservations(first + e.sequence(), e.step());
  }
  return out;
}

hmm::TransitionMatrix blended_matrix(const KnowledgeStore& store) {
  return store.long_term.blend(store.short_term, store.blend_lambda);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

void append_number(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void append_matrix(std::string& out, const hmm::TransitionMatrix& m) {
  out += "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i == 0 ? "\n    [" : ",\n    [";
    auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      append_number(out, row[j]);
    }
    out += "]";
  }
  out += "\n  ]";
}

void append_observation(std::string& out, const hmm::ObservationVector& v) {
  using Kind = hmm::ObservationVector::Kind;
  switch (v.kind()) {
    case Kind::DirectSighting:
      out += "{\"s\":" + std::to_string(*v.sighted_state()) + "}";
      return;
    case Kind::NegativeInfo: {
      out += "{\"w\":[";
      const auto zeros = v.zeros();
      for (std::size_t k = 0; k < zeros.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(zeros[k]);
      }
      out += "]}";
      return;
    }
    case Kind::General:
      out += "{\"b\":[";
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ",";
        append_number(out, v[k]);
      }
      out += "]}";
      return;
  }
}

hmm::TransitionMatrix read_matrix(const nlohmann::json& j, const hmm::TransitionMatrix& shape, const char* name) {
  const std::size_t n = shape.size();
  if (!j.is_array() || j.size() != n) throw StoreFormatError(std::string(name) + ": expected " + std::to_string(n) + " rows");
  hmm::Vector values;
  values.reserve(n * n);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n) throw StoreFormatError(std::string(name) + ": ragged row");
    for (const auto& x : row) values.push_back(x.get<double>());
  }
  try {
    return hmm::TransitionMatrix::from_dense(n, std::move(values), shape.support_mask());
  } catch (const hmm::HmmError& e) {
    throw StoreFormatError(std::string(name) + ": " + e.what());
  }
}

hmm::ObservationVector read_observation(const nlohmann::json& j, std::size_t n) {
  if (j.contains("s")) return hmm::ObservationVector::direct_sighting(n, j.at("s").get<std::size_t>());
  if (j.contains("w")) return hmm::ObservationVector::negative_info(n, j.at("w").get<std::vector<std::size_t>>());
  if (j.contains("b")) {
    return hmm::ObservationVector::from_values(j.at("b").get<hmm::Vector>(), hmm::ObservationVector::Kind::General);
  }
  throw StoreFormatError("unrecognized observation record");
}

}  // namespace

std::string serialize_store(const KnowledgeStore& store) {
  std::string out = "{\n";
  out += "  \"version\": " + std::to_string(kStoreFormatVersion) + ",\n";
  out += "  \"map_hash\": \"" + store.map_hash + "\",\n";
  out += "  \"lambda\": ";
  append_number(out, store.blend_lambda);
  out += ",\n  \"short_window\": " + std::to_string(store.short_window) + ",\n";
  out += "  \"episodes\": [";
  for (std::size_t e = 0; e < store.episodes.size(); ++e) {
    out += e == 0 ? "\n    [" : ",\n    [";
    const auto& steps = store.episodes[e].steps();
    for (std::size_t t = 0; t < steps.size(); ++t) {
      if (t) out += ",";
      append_observation(out, steps[t]);
    }
    out += "]";
  }
  out += store.episodes.empty() ? "],\n" : "\n  ],\n";
  out += "  \"long_term\": ";
  append_matrix(out, store.long_term);
  out += ",\n  \"short_term\": ";
  append_matrix(out, store.short_term);
  out += "\n}\n";
  return out;
}

KnowledgeStore parse_store(const std::string& text, const grid::GridMap& map) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StoreFormatError(std::string("knowledge store is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
    throw StoreFormatError("knowledge store has no version header");
  }
  const int version = doc["version"].get<int>();
  if (version != kStoreFormatVersion) {
    throw StoreFormatError("unsupported knowledge store version " + std::to_string(version));
  }
  try {
    KnowledgeStore store = make_store(map, doc.at("lambda").get<double>(), doc.at("short_window").get<std::size_t>());
    const std::string hash = doc.at("map_hash").get<std::string>();
    if (hash != store.map_hash) {
      throw StoreMapMismatch("knowledge store was trained on map " + hash + ", not " + store.map_hash);
    }
    const std::size_t n = map.state_count();
    for (const auto& episode : doc.at("episodes")) {
      std::vector<hmm::ObservationVector> steps;
      for (const auto& rec : episode) steps.push_back(read_observation(rec, n));
      store.episodes.emplace_back(std::move(steps));
    }
    const auto shape = grid::uniform_transition(map);
    store.long_term = read_matrix(doc.at("long_term"), shape, "long_term");
    store.short_term = read_matrix(doc.at("short_term"), shape, "short_term");
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw StoreFormatError(std::string("malformed knowledge store: ") + e.what());
  } catch (const hmm::HmmError& e) {
    throw StoreFormatError(std::string("malformed knowledge store: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw StoreFormatError(std::string("malformed knowledge store: ") + e.what());
  }
}

void save_store(const KnowledgeStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot write knowledge store " + path.string());
  out << serialize_store(store);
  if (!out) throw StoreError("failed writing knowledge store " + path.string());
}

KnowledgeStore load_store(const std::filesystem::path& path, const grid::GridMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read knowledge store " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_store(buf.str(), map);
}

}  // namespace hmmtrack::pursuit
