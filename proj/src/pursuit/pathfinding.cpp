#include "hmmtrack/pursuit/pathfinding.hpp"

#include <functional>
#include <queue>
#include <utility>

namespace hmmtrack::pursuit {

using grid::MoveAction;
using grid::Position;

namespace {

constexpr MoveAction kOrder[] = {MoveAction::North, MoveAction::East, MoveAction::South, MoveAction::West};

}  // namespace

DistanceField dijkstra(const grid::GridMap& map, Position source) {
  const std::size_t n = map.state_count();
  const std::size_t src = map.index_of(source);
  DistanceField field{std::vector<int>(n, kUnreachable), std::vector<std::optional<std::size_t>>(n)};
  field.dist[src] = 0;

  using Entry = std::pair<int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  open.emplace(0, src);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > field.dist[u]) continue;
    const Position p = map.position(u);
    for (MoveAction a : kOrder) {
      auto v = map.index(grid::step(p, a));
      if (!v) continue;
      const int nd = d + 1;
      if (nd < field.dist[*v]) {
        field.dist[*v] = nd;
        field.pred[*v] = u;
        open.emplace(nd, *v);
      }
    }
  }
  return field;
}

MoveAction next_move(const grid::GridMap& map, Position ai_pos, Position target) {
  if (ai_pos == target) return MoveAction::Stay;
  const DistanceField field = dijkstra(map, target);
  const int here = field.dist[map.index_of(ai_pos)];
  if (here == kUnreachable) return MoveAction::Stay;
  for (MoveAction a : kOrder) {
    auto v = map.index(grid::step(ai_pos, a));
    if (v && field.dist[*v] == here - 1) return a;
  }
  return MoveAction::Stay;
}

}  // namespace hmmtrack::pursuit
