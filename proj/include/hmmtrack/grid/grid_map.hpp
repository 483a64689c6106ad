#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmmtrack::grid {

/// Tile coordinates, 0-based, x to the right and y downward.
struct Position {
  int x = 0;
  int y = 0;
  auto operator<=>(const Position&) const = default;
};

std::string to_string(Position p);

enum class Tile : std::uint8_t { Wall, Floor };

enum class MoveAction { North, South, East, West, Stay };

inline constexpr MoveAction kAllMoves[] = {MoveAction::North, MoveAction::East, MoveAction::South, MoveAction::West,
                                           MoveAction::Stay};

char move_to_char(MoveAction a);  // 'N','S','E','W','.'
std::optional<MoveAction> move_from_char(char c);
std::string_view move_name(MoveAction a);  // "N","S","E","W","Stay"
std::optional<MoveAction> move_from_name(std::string_view name);
/// Parses a move string like "EENNSW.." ('.' is Stay). Throws std::invalid_argument.
std::vector<MoveAction> parse_moves(std::string_view text);
std::string format_moves(const std::vector<MoveAction>& moves);

Position step(Position p, MoveAction a);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message, const std::string& source = "map");
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

class IllegalMove : public std::runtime_error {
 public:
  IllegalMove(Position from, MoveAction act);
};

/// Immutable tile grid with its annotations. Floor tiles are the hidden
/// states, indexed in row-major order.
class GridMap {
 public:
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t state_count() const noexcept { return positions_.size(); }

  bool in_bounds(Position p) const noexcept { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  Tile tile(Position p) const { return tiles_[offset(p)]; }
  bool is_floor(Position p) const noexcept { return in_bounds(p) && tiles_[offset(p)] == Tile::Floor; }

  /// State index of a floor tile; nullopt for walls and out-of-bounds.
  std::optional<std::size_t> index(Position p) const;
  /// Like index() but throws std::out_of_range for non-floor tiles.
  std::size_t index_of(Position p) const;
  Position position(std::size_t state) const { return positions_.at(state); }
  const std::vector<Position>& floor_positions() const noexcept { return positions_; }

  const std::vector<Position>& goals() const noexcept { return goals_; }
  const std::vector<Position>& cameras() const noexcept { return cameras_; }
  bool is_goal(Position p) const;
  bool is_camera(Position p) const;
  Position player_start() const noexcept { return player_start_; }
  Position ai_start() const noexcept { return ai_start_; }

  /// FNV-1a 64 of the canonical serialization, as 16 hex digits.
  std::string hash() const;

  friend GridMap parse_map(std::string_view text);

 private:
  std::size_t offset(Position p) const { return static_cast<std::size_t>(p.y) * width_ + p.x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<Tile> tiles_;
  std::vector<long> state_of_;  // per tile, -1 for walls
  std::vector<Position> positions_;
  std::vector<Position> goals_;
  std::vector<Position> cameras_;
  Position player_start_;
  Position ai_start_;
};

/// Map alphabet: '#' wall, '.' floor, 'P' player start, 'A' AI start,
/// 'G' goal, 'C' camera. Rows are newline separated, all the same length.
GridMap parse_map(std::string_view text);
std::string serialize_map(const GridMap& map);
GridMap load_map_file(const std::filesystem::path& path);

}  // namespace hmmtrack::grid
