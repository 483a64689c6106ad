#include "hmmtrack/grid/grid_map.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

namespace hmmtrack::grid {

std::string to_string(Position p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

char move_to_char(MoveAction a) {
  switch (a) {
    case MoveAction::North: return 'N';
    case MoveAction::South: return 'S';
    case MoveAction::East: return 'E';
    case MoveAction::West: return 'W';
    case MoveAction::Stay: return '.';
  }
  return '?';
}

std::optional<MoveAction> move_from_char(char c) {
  switch (c) {
    case 'N': return MoveAction::North;
    case 'S': return MoveAction::South;
    case 'E': return MoveAction::East;
    case 'W': return MoveAction::West;
    case '.': return MoveAction::Stay;
    default: return std::nullopt;
  }
}

std::string_view move_name(MoveAction a) {
  switch (a) {
    case MoveAction::North: return "N";
    case MoveAction::South: return "S";
    case MoveAction::East: return "E";
    case MoveAction::West: return "W";
    case MoveAction::Stay: return "Stay";
  }
  return "?";
}

std::optional<MoveAction> move_from_name(std::string_view name) {
  if (name == "Stay") return MoveAction::Stay;
  if (name.size() == 1 && name[0] != '.') return move_from_char(name[0]);
  return std::nullopt;
}

std::vector<MoveAction> parse_moves(std::string_view text) {
  std::vector<MoveAction> out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    auto m = move_from_char(c);
    if (!m) throw std::invalid_argument(std::string("bad move character '") + c + "'");
    out.push_back(*m);
  }
  return out;
}

std::string format_moves(const std::vector<MoveAction>& moves) {
  std::string s;
  s.reserve(moves.size());
  for (auto m : moves) s.push_back(move_to_char(m));
  return s;
}

Position step(Position p, MoveAction a) {
  switch (a) {
    case MoveAction::North: return {p.x, p.y - 1};
    case MoveAction::South: return {p.x, p.y + 1};
    case MoveAction::East: return {p.x + 1, p.y};
    case MoveAction::West: return {p.x - 1, p.y};
    case MoveAction::Stay: return p;
  }
  return p;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message, const std::string& source)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

IllegalMove::IllegalMove(Position from, MoveAction act)
    : std::runtime_error("illegal move " + std::string(move_name(act)) + " from " + to_string(from)) {}

std::optional<std::size_t> GridMap::index(Position p) const {
  if (!in_bounds(p)) return std::nullopt;
  const long s = state_of_[offset(p)];
  if (s < 0) return std::nullopt;
  return static_cast<std::size_t>(s);
}

std::size_t GridMap::index_of(Position p) const {
  auto s = index(p);
  if (!s) throw std::out_of_range("not a floor tile: " + to_string(p));
  return *s;
}

bool GridMap::is_goal(Position p) const { return std::binary_search(goals_.begin(), goals_.end(), p); }

bool GridMap::is_camera(Position p) const { return std::binary_search(cameras_.begin(), cameras_.end(), p); }

std::string GridMap::hash() const {
  const std::string text = serialize_map(*this);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Row-major ordering of positions, matching state indexing.
bool row_major_less(Position a, Position b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

}  // namespace

GridMap parse_map(std::string_view text) {
  std::vector<std::string_view> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    rows.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (rows.empty()) throw ParseError(1, 1, "empty map");

  GridMap map;
  map.height_ = static_cast<int>(rows.size());
  map.width_ = static_cast<int>(rows.front().size());
  if (map.width_ == 0) throw ParseError(1, 1, "empty row");
  map.tiles_.assign(static_cast<std::size_t>(map.width_) * map.height_, Tile::Wall);
  map.state_of_.assign(map.tiles_.size(), -1);

  std::optional<Position> player, ai;
  for (std::size_t y = 0; y < rows.size(); ++y) {
    const auto row = rows[y];
    for (std::size_t x = 0; x < row.size(); ++x) {
      const char c = row[x];
      const Position p{static_cast<int>(x), static_cast<int>(y)};
      if (c == ' ' || c == '\t' || c == '\r') throw ParseError(y + 1, x + 1, "whitespace is not allowed in a map");
      if (x >= static_cast<std::size_t>(map.width_)) break;
      Tile tile = Tile::Floor;
      switch (c) {
        case '#': tile = Tile::Wall; break;
        case '.': break;
        case 'G': map.goals_.push_back(p); break;
        case 'C': map.cameras_.push_back(p); break;
        case 'P':
          if (player) throw ParseError(y + 1, x + 1, "duplicate player start 'P'");
          player = p;
          break;
        case 'A':
          if (ai) throw ParseError(y + 1, x + 1, "duplicate AI start 'A'");
          ai = p;
          break;
        default: throw ParseError(y + 1, x + 1, std::string("bad map character '") + c + "'");
      }
      map.tiles_[map.offset(p)] = tile;
    }
    if (row.size() != static_cast<std::size_t>(map.width_)) {
      throw ParseError(y + 1, std::min(row.size(), static_cast<std::size_t>(map.width_)) + 1,
                       "ragged row: expected " + std::to_string(map.width_) + " columns, got " +
                           std::to_string(row.size()));
    }
  }
  if (!player) throw ParseError(1, 1, "missing player start 'P'");
  if (!ai) throw ParseError(1, 1, "missing AI start 'A'");
  if (map.goals_.empty()) throw ParseError(1, 1, "map has no goal 'G'");
  map.player_start_ = *player;
  map.ai_start_ = *ai;

  for (int y = 0; y < map.height_; ++y) {
    for (int x = 0; x < map.width_; ++x) {
      const Position p{x, y};
      if (map.tiles_[map.offset(p)] == Tile::Floor) {
        map.state_of_[map.offset(p)] = static_cast<long>(map.positions_.size());
        map.positions_.push_back(p);
      }
    }
  }
  std::sort(map.goals_.begin(), map.goals_.end());
  std::sort(map.cameras_.begin(), map.cameras_.end());

  // Every floor tile must be reachable from the player start.
  std::vector<bool> seen(map.positions_.size(), false);
  std::queue<Position> frontier;
  frontier.push(map.player_start_);
  seen[map.index_of(map.player_start_)] = true;
  while (!frontier.empty()) {
    const Position p = frontier.front();
    frontier.pop();
    for (MoveAction a : {MoveAction::North, MoveAction::East, MoveAction::South, MoveAction::West}) {
      const Position q = step(p, a);
      auto s = map.index(q);
      if (s && !seen[*s]) {
        seen[*s] = true;
        frontier.push(q);
      }
    }
  }
  std::vector<Position> unreachable;
  for (std::size_t s = 0; s < seen.size(); ++s) {
    if (!seen[s]) unreachable.push_back(map.positions_[s]);
  }
  if (!unreachable.empty()) {
    const Position p = *std::min_element(unreachable.begin(), unreachable.end(), row_major_less);
    throw ParseError(static_cast<std::size_t>(p.y) + 1, static_cast<std::size_t>(p.x) + 1,
                     "floor tile not connected to the player start");
  }
  return map;
}

std::string serialize_map(const GridMap& map) {
  std::string out;
  out.reserve(static_cast<std::size_t>(map.width() + 1) * map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const Position p{x, y};
      char c = map.tile(p) == Tile::Wall ? '#' : '.';
      if (p == map.player_start()) c = 'P';
      else if (p == map.ai_start()) c = 'A';
      else if (map.is_goal(p)) c = 'G';
      else if (map.is_camera(p)) c = 'C';
      out.push_back(c);
    }
    out.push_back('\n');
  }
  return out;
}

GridMap load_map_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_map(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), e.message(), path.string());
  }
}

}  // namespace hmmtrack::grid
