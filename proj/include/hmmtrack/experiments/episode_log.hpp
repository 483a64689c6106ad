#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hmmtrack/experiments/game.hpp"

namespace hmmtrack::experiments {

/// One JSON document per game. Output is deterministic for equal logs.
std::string serialize_episode_log(const EpisodeLog& log);
/// The map supplies the state count and the tracker matrix's support.
EpisodeLog parse_episode_log(const std::string& text, const grid::GridMap& map);

/// Beliefs recomputed from the archived observations with the logged tracker
/// matrix; entry t is the belief after turn t's observation. Throws
/// std::invalid_argument when the log carries no tracker matrix.
std::vector<hmm::Vector> replay_beliefs(const EpisodeLog& log, std::shared_ptr<const grid::GridMap> map);

void write_episode_log(const EpisodeLog& log, const std::filesystem::path& path);
EpisodeLog read_episode_log(const std::filesystem::path& path, const grid::GridMap& map);

}  // namespace hmmtrack::experiments
