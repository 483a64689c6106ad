#include <doctest.h>

#include <set>

#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/grid/visibility.hpp"
#include "support/generators.hpp"

using namespace hmmtrack;
using namespace hmmtrack::grid;

namespace {

const char* kSmall =
    "#####\n"
    "#P.G#\n"
    "#.#C#\n"
    "#A..#\n"
    "#####\n";

ParseError parse_error_of(std::string_view text) {
  try {
    parse_map(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a ParseError");
  return ParseError(0, 0, "");
}

}  // namespace

TEST_CASE("parse a small map") {
  const auto map = parse_map(kSmall);
  CHECK(map.width() == 5);
  CHECK(map.height() == 5);
  CHECK(map.state_count() == 8);
  CHECK(map.player_start() == Position{1, 1});
  CHECK(map.ai_start() == Position{1, 3});
  CHECK(map.goals() == std::vector<Position>{{3, 1}});
  CHECK(map.cameras() == std::vector<Position>{{3, 2}});
  // Row-major state indexing.
  CHECK(map.index_of({1, 1}) == 0);
  CHECK(map.index_of({3, 1}) == 2);
  CHECK(map.index_of({1, 2}) == 3);
  CHECK(map.index_of({3, 3}) == 7);
  CHECK_FALSE(map.index({2, 2}).has_value());
  CHECK_FALSE(map.index({-1, 0}).has_value());
  CHECK_THROWS_AS(map.index_of({0, 0}), std::out_of_range);
  for (std::size_t s = 0; s < map.state_count(); ++s) CHECK(map.index_of(map.position(s)) == s);
}

TEST_CASE("serialize round-trips and hashes are stable") {
  const auto map = parse_map(kSmall);
  CHECK(serialize_map(map) == kSmall);
  CHECK(parse_map(serialize_map(map)).hash() == map.hash());
  CHECK(map.hash().size() == 16);
  const auto other = parse_map("#####\n#P.G#\n#.#.#\n#A.C#\n#####\n");
  CHECK(other.hash() != map.hash());
}

TEST_CASE("parse errors carry line and column") {
  auto e = parse_error_of("#####\n#P.G#\n#.x.#\n#A..#\n#####\n");
  CHECK(e.line() == 3);
  CHECK(e.column() == 3);

  e = parse_error_of("#####\n#P.G#\n#..#\n#A..#\n#####\n");
  CHECK(e.line() == 3);
  CHECK(std::string(e.what()).find("ragged") != std::string::npos);

  e = parse_error_of("#####\n#P.G#\n#.P.#\n#A..#\n#####\n");
  CHECK(e.line() == 3);
  CHECK(e.column() == 3);

  CHECK(parse_error_of("#####\n#P..#\n#...#\n#A..#\n#####\n").message().find("goal") != std::string::npos);
  CHECK(parse_error_of("#####\n#P.G#\n#...#\n#...#\n#####\n").message().find("AI") != std::string::npos);
  CHECK(parse_error_of("#####\n#P G#\n#...#\n#A..#\n#####\n").column() == 3);

  // Floor tile walled off from the player start.
  e = parse_error_of("#####\n#P.G#\n###.#\n#.#A#\n#####\n");
  CHECK(e.line() == 4);
  CHECK(e.column() == 2);
}

TEST_CASE("moves") {
  CHECK(step({2, 2}, MoveAction::North) == Position{2, 1});
  CHECK(step({2, 2}, MoveAction::East) == Position{3, 2});
  CHECK(parse_moves("EEN S.W") == std::vector<MoveAction>{MoveAction::East, MoveAction::East, MoveAction::North,
                                                           MoveAction::South, MoveAction::Stay, MoveAction::West});
  CHECK(format_moves(parse_moves("NESW.")) == "NESW.");
  CHECK_THROWS_AS(parse_moves("NX"), std::invalid_argument);
  CHECK(move_from_name("Stay") == MoveAction::Stay);
  CHECK_FALSE(move_from_name(".").has_value());

  const auto map = parse_map(kSmall);
  CHECK(legal_moves(map, {1, 1}) == std::vector<MoveAction>{MoveAction::Stay, MoveAction::East, MoveAction::South});
  CHECK_THROWS_AS(apply_move(map, {1, 1}, MoveAction::North), IllegalMove);
  CHECK(apply_move(map, {1, 1}, MoveAction::Stay) == Position{1, 1});
}

TEST_CASE("visible set: Chebyshev square, observer excluded, cameras added") {
  const auto map = parse_map(
      "#######\n"
      "#P....#\n"
      "#.....#\n"
      "#..A..#\n"
      "#.....#\n"
      "#G...C#\n"
      "#######\n");
  const auto w = visible_set(map, {3, 3}, {1, false}, false);
  CHECK(w.size() == 8);
  CHECK(std::find(w.begin(), w.end(), Position{3, 3}) == w.end());
  const auto with_cams = visible_set(map, {3, 3}, {1, false}, true);
  CHECK(with_cams.size() == 9);
  CHECK(std::find(with_cams.begin(), with_cams.end(), Position{5, 5}) != with_cams.end());
  // Sorted by state index.
  for (std::size_t i = 1; i < with_cams.size(); ++i) {
    CHECK(map.index_of(with_cams[i - 1]) < map.index_of(with_cams[i]));
  }
  CHECK(visible_set(map, {3, 3}, {2, false}, false).size() == 24);
  CHECK(visible_set(map, {3, 3}, {0, false}, false).empty());
}

TEST_CASE("occlusion hides tiles behind walls") {
  const auto map = parse_map(
      "#######\n"
      "#P.#..#\n"
      "#..#.G#\n"
      "#A.#..#\n"
      "#.....#\n"
      "#######\n");
  CHECK_FALSE(line_of_sight(map, {2, 2}, {4, 2}));
  CHECK(line_of_sight(map, {2, 2}, {2, 4}));
  const auto open = visible_set(map, {2, 2}, {2, false}, false);
  const auto occluded = visible_set(map, {2, 2}, {2, true}, false);
  CHECK(std::find(open.begin(), open.end(), Position{4, 2}) != open.end());
  CHECK(std::find(occluded.begin(), occluded.end(), Position{4, 2}) == occluded.end());
  CHECK(occluded.size() < open.size());
}

TEST_CASE("observation vectors from visibility") {
  const auto map = parse_map(kSmall);
  const std::vector<Position> w{{2, 1}, {3, 2}};
  const auto neg = observation_vector(map, w, std::nullopt);
  CHECK(neg.kind() == hmm::ObservationVector::Kind::NegativeInfo);
  CHECK(neg.zeros() == std::vector<std::size_t>{1, 4});
  const auto seen = observation_vector(map, w, Position{3, 2});
  CHECK(seen.sighted_state() == map.index_of({3, 2}));
}

TEST_CASE("uniform transition follows the legal-move graph") {
  const auto map = load_map_file(HMMTRACK_MAPS_DIR "/island.map");
  const auto a = grid::uniform_transition(map);
  CHECK(testgen::max_row_sum_error(a) < 1e-12);
  for (std::size_t s = 0; s < map.state_count(); ++s) {
    const auto moves = legal_moves(map, map.position(s));
    std::set<std::size_t> expected;
    for (auto m : moves) expected.insert(map.index_of(step(map.position(s), m)));
    const auto support = a.support(s);
    CHECK(std::set<std::size_t>(support.begin(), support.end()) == expected);
    for (std::size_t j : support) CHECK(a(s, j) == doctest::Approx(1.0 / static_cast<double>(moves.size())));
  }
}

TEST_CASE("bundled maps parse") {
  CHECK_NOTHROW(load_map_file(HMMTRACK_MAPS_DIR "/island.map"));
  CHECK_NOTHROW(load_map_file(HMMTRACK_MAPS_DIR "/corridors.map"));
  try {
    load_map_file(HMMTRACK_MAPS_DIR "/does-not-exist.map");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("does-not-exist") != std::string::npos);
  }
}
