#pragma once

#include <optional>
#include <vector>

#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::grid {

struct VisibilitySpec {
  int radius = 1;  // Chebyshev
  bool occlusion = false;
};

/// Stay first, then the open cardinal directions in N, E, S, W order.
std::vector<MoveAction> legal_moves(const GridMap& map, Position pos);
bool is_legal(const GridMap& map, Position pos, MoveAction act);
/// Throws IllegalMove when `act` leaves the grid or enters a wall.
Position apply_move(const GridMap& map, Position pos, MoveAction act);

/// True when no wall lies strictly between the two tile centers.
bool line_of_sight(const GridMap& map, Position from, Position to);

/// Floor tiles within `spec.radius` (Chebyshev) of the observer, excluding the
/// observer's tile, filtered by line of sight when occlusion is on, plus every
/// camera tile when cameras_active. Returned in state-index order.
std::vector<Position> visible_set(const GridMap& map, Position observer, const VisibilitySpec& spec,
                                  bool cameras_active);

/// Negative information (zeros on W) when nothing is sighted, otherwise a
/// one-hot vector at the sighted tile.
hmm::ObservationVector observation_vector(const GridMap& map, const std::vector<Position>& observed,
                                          std::optional<Position> sighting);

/// Each row uniform over the tiles reachable with one legal action, Stay
/// included. The support mask is exactly that adjacency relation.
hmm::TransitionMatrix uniform_transition(const GridMap& map);

}  // namespace hmmtrack::grid
