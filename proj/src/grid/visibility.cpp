#include "hmmtrack/grid/visibility.hpp"

#include <algorithm>
#include <cstdlib>

namespace hmmtrack::grid {

std::vector<MoveAction> legal_moves(const GridMap& map, Position pos) {
  std::vector<MoveAction> out{MoveAction::Stay};
  for (MoveAction a : {MoveAction::North, MoveAction::East, MoveAction::South, MoveAction::West}) {
    if (map.is_floor(step(pos, a))) out.push_back(a);
  }
  return out;
}

bool is_legal(const GridMap& map, Position pos, MoveAction act) {
  return map.is_floor(pos) && map.is_floor(step(pos, act));
}

Position apply_move(const GridMap& map, Position pos, MoveAction act) {
  if (!is_legal(map, pos, act)) throw IllegalMove(pos, act);
  return step(pos, act);
}

bool line_of_sight(const GridMap& map, Position from, Position to) {
  // Bresenham walk over intermediate tiles.
  int x = from.x, y = from.y;
  const int dx = std::abs(to.x - from.x), dy = -std::abs(to.y - from.y);
  const int sx = from.x < to.x ? 1 : -1, sy = from.y < to.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x == to.x && y == to.y) return true;
    if (!(x == from.x && y == from.y) && !map.is_floor({x, y})) return false;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

std::vector<Position> visible_set(const GridMap& map, Position observer, const VisibilitySpec& spec,
                                  bool cameras_active) {
  std::vector<Position> out;
  const int r = std::max(spec.radius, 0);
  for (int y = observer.y - r; y <= observer.y + r; ++y) {
    for (int x = observer.x - r; x <= observer.x + r; ++x) {
      const Position p{x, y};
      if (p == observer || !map.is_floor(p)) continue;
      if (spec.occlusion && !line_of_sight(map, observer, p)) continue;
      out.push_back(p);
    }
  }
  if (cameras_active) {
    for (Position c : map.cameras()) {
      if (c != observer) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [&](Position a, Position b) { return map.index_of(a) < map.index_of(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

hmm::ObservationVector observation_vector(const GridMap& map, const std::vector<Position>& observed,
                                          std::optional<Position> sighting) {
  const std::size_t n = map.state_count();
  if (sighting) return hmm::ObservationVector::direct_sighting(n, map.index_of(*sighting));
  std::vector<std::size_t> zeros;
  zeros.reserve(observed.size());
  for (Position p : observed) zeros.push_back(map.index_of(p));
  return hmm::ObservationVector::negative_info(n, zeros);
}

hmm::TransitionMatrix uniform_transition(const GridMap& map) {
  const std::size_t n = map.state_count();
  hmm::Vector values(n * n, 0.0);
  hmm::TransitionMatrix::Mask support(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Position p = map.position(i);
    const auto moves = legal_moves(map, p);
    const double w = 1.0 / static_cast<double>(moves.size());
    for (MoveAction a : moves) {
      const std::size_t j = map.index_of(step(p, a));
      values[i * n + j] = w;
      support[i].push_back(j);
    }
  }
  return hmm::TransitionMatrix::from_dense(n, std::move(values), std::move(support));
}

}  // namespace hmmtrack::grid
