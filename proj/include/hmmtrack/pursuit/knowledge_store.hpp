#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/hmm/baum_welch.hpp"
#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::pursuit {

inline constexpr int kStoreFormatVersion = 1;

/// Everything the tracker has learned about its opponent: the archive of
/// finished games and the matrices estimated from it.
struct KnowledgeStore {
  std::string map_hash;
  std::vector<hmm::ObservationSequence> episodes;
  hmm::TransitionMatrix long_term;   // learned from every archived episode
  hmm::TransitionMatrix short_term;  // learned from the last short_window episodes
  double blend_lambda = 0.5;
  std::size_t short_window = 3;

  bool operator==(const KnowledgeStore&) const = default;
};

/// Fresh store: no episodes, both matrices uniform over the map's moves.
KnowledgeStore make_store(const grid::GridMap& map, double blend_lambda = 0.5, std::size_t short_window = 3);

/// Point mass at the player start.
hmm::InitialDistribution start_distribution(const grid::GridMap& map);

/// Re-learns both matrices. long_term warm-starts from its current value;
/// short_term restarts from the uniform matrix on the last min(K, m)
/// episodes. Propagates hmm::InconsistentObservations with the episode index
/// in the full archive.
KnowledgeStore learn(const KnowledgeStore& store, const grid::GridMap& map, const hmm::InitialDistribution& mu,
                     const hmm::BaumWelchOptions& opts = {});

/// lambda * long_term + (1 - lambda) * short_term.
hmm::TransitionMatrix blended_matrix(const KnowledgeStore& store);

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StoreFormatError : public StoreError {
 public:
  using StoreError::StoreError;
};

class StoreMapMismatch : public StoreError {
 public:
  using StoreError::StoreError;
};

std::string serialize_store(const KnowledgeStore& store);
/// The map provides the structural support of the stored matrices and must
/// match the store's map_hash.
KnowledgeStore parse_store(const std::string& text, const grid::GridMap& map);

void save_store(const KnowledgeStore& store, const std::filesystem::path& path);
KnowledgeStore load_store(const std::filesystem::path& path, const grid::GridMap& map);

}  // namespace hmmtrack::pursuit
