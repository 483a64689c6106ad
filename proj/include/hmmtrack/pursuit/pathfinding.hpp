#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "hmmtrack/grid/grid_map.hpp"

namespace hmmtrack::pursuit {

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

struct DistanceField {
  std::vector<int> dist;                        // per state, kUnreachable if disconnected
  std::vector<std::optional<std::size_t>> pred;  // shortest-path tree toward the source
};

/// Unit-weight Dijkstra over the 4-connected floor graph from `source`.
/// Neighbors are relaxed in N, E, S, W order.
DistanceField dijkstra(const grid::GridMap& map, grid::Position source);

/// First step of a shortest path from ai_pos to target; Stay when already
/// there or when the target is unreachable.
grid::MoveAction next_move(const grid::GridMap& map, grid::Position ai_pos, grid::Position target);

}  // namespace hmmtrack::pursuit
