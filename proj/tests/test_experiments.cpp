#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <filesystem>
#include <random>

#include "hmmtrack/experiments/episode_log.hpp"
#include "hmmtrack/experiments/experiment.hpp"
#include "hmmtrack/experiments/export.hpp"
#include "hmmtrack/experiments/plan.hpp"
#include "hmmtrack/experiments/simulate.hpp"
#include "hmmtrack/experiments/stats.hpp"
#include "hmmtrack/grid/visibility.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace hmmtrack;
using namespace hmmtrack::experiments;
using grid::MoveAction;
using grid::Position;

namespace {

std::shared_ptr<const grid::GridMap> map_of(std::string_view text) {
  return std::make_shared<const grid::GridMap>(grid::parse_map(text));
}

std::shared_ptr<const grid::GridMap> island() {
  return std::make_shared<const grid::GridMap>(grid::load_map_file(HMMTRACK_MAPS_DIR "/island.map"));
}

ScriptedStrategy strategy(std::string name, std::string_view moves) { return {std::move(name), grid::parse_moves(moves)}; }

const ScriptedStrategy kWestInner = strategy("west_inner", "WWWWWSSEESSWWWWSSWW");

TurnRecord record_at(Position agent, Position estimate, bool sighted = false) {
  TurnRecord r;
  r.agent_pos = agent;
  r.belief_argmax = estimate;
  const double dx = agent.x - estimate.x, dy = agent.y - estimate.y;
  r.distance = std::sqrt(dx * dx + dy * dy);
  if (sighted) r.sighting = agent;
  return r;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("standing next to the AI loses on turn 1") {
  const auto map = map_of(
      "######\n"
      "#PA.G#\n"
      "######\n");
  const auto log = run_game(map, GameRules{}, strategy("idle", ""), grid::uniform_transition(*map), nullptr);
  CHECK(log.outcome == Outcome::AiWon);
  CHECK(log.records.size() == 1);
}

TEST_CASE("holding a goal for N turns wins") {
  const auto map = map_of(
      "###########\n"
      "#PG.......#\n"
      "#########.#\n"
      "#A........#\n"
      "###########\n");
  for (int n : {1, 3, 4}) {
    GameRules rules;
    rules.occupy_turns_to_win = n;
    const auto log = run_game(map, rules, strategy("rush", "E"), grid::uniform_transition(*map), nullptr);
    CHECK(log.outcome == Outcome::AgentWon);
    CHECK(log.records.size() == static_cast<std::size_t>(n));
    CHECK(log.observations.length() == log.records.size() + 1);
  }
}

TEST_CASE("turn limit") {
  const auto map = map_of(
      "###########\n"
      "#P.......G#\n"
      "#########.#\n"
      "#A........#\n"
      "#.#########\n"
      "#.........#\n"
      "###########\n");
  GameRules rules;
  rules.max_turns = 2;
  const auto log = run_game(map, rules, strategy("idle", ""), grid::uniform_transition(*map), nullptr);
  CHECK(log.outcome == Outcome::TurnLimit);
  CHECK(log.records.size() == 2);
}

TEST_CASE("touch rules") {
  const auto map = map_of(
      "#######\n"
      "#P...G#\n"
      "#.....#\n"
      "#..A..#\n"
      "#######\n");
  Game adjacent(map, GameRules{}, grid::uniform_transition(*map));
  GameRules same_rules;
  same_rules.touch_rule = TouchRule::SameTile;
  Game same(map, same_rules, grid::uniform_transition(*map));
  // Both AIs head for the start tile; adjacency ends the first game sooner.
  int adjacent_turns = 0, same_turns = 0;
  while (!adjacent.finished()) adjacent.play_turn(MoveAction::Stay), ++adjacent_turns;
  while (!same.finished()) same.play_turn(MoveAction::Stay), ++same_turns;
  CHECK(adjacent.outcome() == Outcome::AiWon);
  CHECK(same.outcome() == Outcome::AiWon);
  CHECK(same.ai_pos() == same.agent_pos());
  CHECK(adjacent_turns < same_turns);
}

TEST_CASE("illegal moves") {
  const auto map = island();
  Game game(map, GameRules{}, grid::uniform_transition(*map));
  CHECK_THROWS_AS(game.play_turn(MoveAction::North), grid::IllegalMove);
  CHECK(game.turn() == 0);
  CHECK(game.log().observations.length() == 1);
  game.play_turn(MoveAction::Stay);
  CHECK(game.turn() == 1);
  game.resign();
  CHECK(game.outcome() == Outcome::Resigned);
  CHECK_THROWS_AS(game.play_turn(MoveAction::Stay), std::logic_error);

  CHECK_THROWS_AS(validate_strategy(*map, strategy("bad", "N")), ScriptIllegalMove);
  CHECK_THROWS_AS(run_game(map, GameRules{}, strategy("bad", "WWWWWN"), grid::uniform_transition(*map), nullptr),
                  ScriptIllegalMove);
}

TEST_CASE("logged estimates match beliefs replayed offline") {
  const auto map = island();
  for (const auto& matrix : {grid::uniform_transition(*map), [&] {
         auto store = pursuit::make_store(*map);
         run_game(map, GameRules{}, kWestInner, store.long_term, &store);
         return pursuit::blended_matrix(pursuit::learn(store, *map, pursuit::start_distribution(*map)));
       }()}) {
    const auto log = run_game(map, GameRules{}, kWestInner, matrix, nullptr);
    const auto beliefs = replay_beliefs(log, map);
    REQUIRE(beliefs.size() == log.records.size() + 1);
    for (const auto& rec : log.records) {
      const auto& b = beliefs[static_cast<std::size_t>(rec.turn)];
      const auto best = static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
      CHECK(map->position(best) == rec.belief_argmax);
      CHECK(b[best] == rec.belief_argmax_prob);
    }
  }
}

TEST_CASE("sightings appear in the log and the archive") {
  const auto map = island();
  pursuit::KnowledgeStore store = pursuit::make_store(*map);
  const auto log = run_game(map, GameRules{}, kWestInner, store.long_term, &store);
  REQUIRE(store.episodes.size() == 1);
  CHECK(store.episodes[0] == log.observations);
  int sighted = 0;
  for (const auto& rec : log.records) {
    if (!rec.sighting) continue;
    ++sighted;
    CHECK(*rec.sighting == rec.agent_pos);
    CHECK(rec.distance == 0.0);
    CHECK(log.observations[static_cast<std::size_t>(rec.turn)].sighted_state() == map->index_of(rec.agent_pos));
  }
  CHECK(sighted > 0);
}

TEST_CASE("mean estimate distance") {
  EpisodeLog log;
  log.records = {record_at({1, 1}, {1, 1})};
  CHECK(mean_estimate_distance(log) == 0.0);
  log.records = {record_at({4, 5}, {1, 1})};
  CHECK(mean_estimate_distance(log) == 5.0);
  log.records = {record_at({2, 2}, {2, 2}, true), record_at({3, 2}, {2, 2}), record_at({2, 4}, {2, 2})};
  CHECK(mean_estimate_distance(log) == doctest::Approx(1.0));
  CHECK(mean_estimate_distance(log, true) == doctest::Approx(1.5));
  log.records.clear();
  CHECK_THROWS_AS(mean_estimate_distance(log), std::invalid_argument);
}

TEST_CASE("welch: textbook example and symmetries") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 3, 4, 5};
  const auto r = welch_t_test(a, b);
  CHECK(r.t == doctest::Approx(-1.0 / std::sqrt(5.0 / 6.0)).epsilon(1e-14));
  CHECK(r.df == doctest::Approx(6.0).epsilon(1e-14));
  const auto o = oracle::welch(a, b);
  CHECK(std::abs(r.p - o.p) < 1e-12);

  const auto swapped = welch_t_test(b, a);
  CHECK(swapped.t == -r.t);
  CHECK(swapped.p == doctest::Approx(r.p).epsilon(1e-14));

  const auto same = welch_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(welch_t_test(flat, flat), DegenerateVariance);
  CHECK_NOTHROW(welch_t_test(flat, a));
  const std::vector<double> nearly{0.05, 0.05 + 1e-17, 0.05 - 1e-17};
  CHECK_THROWS_AS(welch_t_test(nearly, flat), DegenerateVariance);
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1}, a), std::invalid_argument);
}

TEST_CASE("welch matches the oracle on random samples") {
  std::mt19937_64 rng(2718);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(testgen::uniform_index(rng, 2, 30)), b(testgen::uniform_index(rng, 2, 30));
    const double shift = testgen::uniform_real(rng, -2, 2);
    const double sa = testgen::uniform_real(rng, 0.1, 3), sb = testgen::uniform_real(rng, 0.1, 3);
    for (double& x : a) x = std::normal_distribution<double>(0, sa)(rng);
    for (double& x : b) x = std::normal_distribution<double>(shift, sb)(rng);
    const auto got = welch_t_test(a, b);
    const auto want = oracle::welch(a, b);
    CHECK(std::abs(got.t - want.t) <= 1e-10 * std::max(1.0, std::abs(want.t)));
    CHECK(got.df == doctest::Approx(want.df).epsilon(1e-12));
    CHECK(std::abs(got.p - want.p) < 1e-8);
  }
}

TEST_CASE("incomplete beta matches boost") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 500; ++k) {
    const double a = testgen::uniform_real(rng, 0.05, 60), b = testgen::uniform_real(rng, 0.05, 60);
    const double x = testgen::uniform_real(rng, 0, 1);
    CHECK(std::abs(regularized_incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) < 1e-11);
  }
  CHECK(regularized_incomplete_beta(2, 3, 0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 1, 0.5), std::domain_error);
  CHECK(student_t_two_sided_p(0.0, 5.0) == 1.0);
}

TEST_CASE("plan parsing") {
  const auto plan = parse_plan(
      "# comment\n"
      "kind = switch\n"
      "games = 6\n"
      "switch_at = 3   # trailing comment\n"
      "variants = adaptive, uniform_static\n"
      "seed = 42\n"
      "strategy = a: EE NN\n"
      "strategy = b:WW\n"
      "compare_games = 4-6\n"
      "lambda = 0.25\n"
      "short_window = 2\n"
      "touch_rule = same_tile\n"
      "occlusion = true\n"
      "bw_max_iters = 7\n");
  CHECK(plan.kind == PlanKind::Switch);
  CHECK(plan.games == 6);
  CHECK(plan.variants == std::vector<Variant>{Variant::Adaptive, Variant::UniformStatic});
  CHECK(plan.seed == 42);
  CHECK(grid::format_moves(plan.strategies[0].moves) == "EENN");
  CHECK(plan.strategy_for(3).name == "a");
  CHECK(plan.strategy_for(4).name == "b");
  CHECK(plan.compare_games == std::pair{4, 6});
  CHECK(plan.blend_lambda == 0.25);
  CHECK(plan.short_window == 2);
  CHECK(plan.rules.touch_rule == TouchRule::SameTile);
  CHECK(plan.rules.occlusion);
  CHECK(plan.baum_welch.max_iters == 7);

  auto alt = parse_plan("kind = alternate\nstrategy = a:E\nstrategy = b:W\n");
  CHECK(alt.strategy_for(1).name == "a");
  CHECK(alt.strategy_for(2).name == "b");
  CHECK(alt.strategy_for(5).name == "a");
}

TEST_CASE("plan errors cite the line") {
  auto line_of = [](std::string_view text) -> std::size_t {
    try {
      parse_plan(text, "t.cfg");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).rfind("t.cfg:", 0) == 0);
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("kind = repeat\ngames = ten\nstrategy = a:E\n") == 2);
  CHECK(line_of("kind = repeat\nstrategy = a:E\ncolour = red\n") == 3);
  CHECK(line_of("kind = sideways\n") == 1);
  CHECK(line_of("strategy = a:EXE\n") == 1);
  CHECK(line_of("games 3\n") == 1);
  CHECK(line_of("strategy = a:E\nvariants = adaptive, fancy\n") == 2);
  // Whole-plan checks are reported at the end of the file.
  CHECK(line_of("kind = switch\ngames = 4\nswitch_at = 4\nstrategy = a:E\nstrategy = b:W\n") == 6);
  CHECK(line_of("kind = repeat\n") == 2);
}

TEST_CASE("bundled plans load") {
  for (const char* name : {"repeat10.cfg", "switch16.cfg", "alternate12.cfg"}) {
    const auto plan = load_plan(std::filesystem::path(HMMTRACK_PLANS_DIR) / name);
    const auto map = grid::load_map_file(plan.map_path);
    for (const auto& s : plan.strategies) CHECK_NOTHROW(validate_strategy(map, s));
  }
}

TEST_CASE("uniform_static is constant across repeated games and runs are deterministic") {
  auto plan = load_plan(std::filesystem::path(HMMTRACK_PLANS_DIR) / "repeat10.cfg");
  plan.games = 4;
  plan.compare_games = std::pair{2, 4};
  plan.variants = {Variant::UniformStatic, Variant::Adaptive};
  const auto map = island();
  const auto first = run_experiment(plan, map, plan.rules);
  const auto second = run_experiment(plan, map, plan.rules);
  CHECK(first.report == second.report);
  const auto& flat = first.report.curve(Variant::UniformStatic).per_game_mean_distance;
  for (double d : flat) CHECK(d == flat.front());
  for (std::size_t g = 0; g < first.runs[1].logs.size(); ++g) {
    CHECK(serialize_episode_log(first.runs[1].logs[g]) == serialize_episode_log(second.runs[1].logs[g]));
  }
  // The adaptive store archives every game.
  CHECK(first.runs[1].final_store.episodes.size() == 4);
  CHECK(first.runs[0].final_store.episodes.empty());
}

TEST_CASE("game seeds are shared by variants and differ by plan seed") {
  CHECK(game_seeds(7, 5) == game_seeds(7, 5));
  CHECK(game_seeds(7, 5) != game_seeds(8, 5));
  const auto five = game_seeds(7, 5);
  CHECK(game_seeds(7, 3) == std::vector<std::uint64_t>(five.begin(), five.begin() + 3));
}

TEST_CASE("hesitation inserts waits but keeps the script") {
  ScriptedAgent agent(strategy("s", "EEEE"), 0.5, 99);
  int moves = 0, waits = 0;
  for (int i = 0; i < 40; ++i) {
    const auto a = agent.next_action();
    if (a == MoveAction::East) ++moves;
    else ++waits;
  }
  CHECK(moves == 4);
  CHECK(waits == 36);
  CHECK_THROWS_AS(ScriptedAgent(strategy("s", "E"), 1.0, 0), std::invalid_argument);
}

TEST_CASE("heatmap exports") {
  const auto map = island();
  const std::size_t n = map->state_count();
  hmm::Vector one_hot(n, 0.0);
  one_hot[5] = 1.0;
  const auto px = heatmap_pixels(one_hot, *map);
  int colored = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const Position p{static_cast<int>(i) % map->width(), static_cast<int>(i) / map->width()};
    if (!map->is_floor(p)) {
      CHECK(px[i] == Rgb{0, 0, 0});
    } else if (!(px[i] == Rgb{255, 255, 255})) {
      ++colored;
      CHECK(px[i] == Rgb{139, 0, 0});
    }
  }
  CHECK(colored == 1);

  const hmm::Vector uniform(n, 1.0 / static_cast<double>(n));
  const auto upx = heatmap_pixels(uniform, *map);
  for (std::size_t s = 0; s < n; ++s) {
    const Position p = map->position(s);
    CHECK(upx[static_cast<std::size_t>(p.y * map->width() + p.x)] == Rgb{139, 0, 0});
  }

  const auto csv = heatmap_csv(uniform, *map);
  std::size_t rows = 0;
  std::size_t start = 0;
  while (start < csv.size()) {
    const auto end = csv.find('\n', start);
    const auto line = csv.substr(start, end - start);
    CHECK(std::count(line.begin(), line.end(), ',') == map->width() - 1);
    start = end + 1;
    ++rows;
  }
  CHECK(rows == static_cast<std::size_t>(map->height()));
  CHECK(csv.rfind(",,", 0) == 0);  // the top row is wall

  const auto ppm = heatmap_ppm(uniform, *map);
  const std::string header = "P6\n" + std::to_string(map->width()) + " " + std::to_string(map->height()) + "\n255\n";
  CHECK(ppm.rfind(header, 0) == 0);
  CHECK(ppm.size() == header.size() + 3 * px.size());
  CHECK_THROWS_AS(heatmap_csv(hmm::Vector(3, 1.0 / 3), *map), hmm::DimensionMismatch);
}

TEST_CASE("learning curve export") {
  StatsReport report;
  report.curves.push_back({Variant::Adaptive, {1.5, 0.1 + 0.2, 1.0 / 3}});
  CHECK(learning_curve_csv(report) ==
        "game_index,variant,mean_distance\n"
        "1,adaptive,1.5\n"
        "2,adaptive,0.30000000000000004\n"
        "3,adaptive,0.33333333333333331\n");
  report.curves.push_back({Variant::UniformStatic, std::vector<double>(3, 2.0)});
  report.curves.push_back({Variant::PretrainedStatic, std::vector<double>(3, 2.0)});
  const auto csv = learning_curve_csv(report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  TempDir dir("hmmtrack_curve_test");
  export_learning_curve(report, dir.path / "c.csv");
  const auto rows = read_learning_curve(dir.path / "c.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[1].mean_distance == report.curves[0].per_game_mean_distance[1]);
  CHECK(rows[2].mean_distance == report.curves[0].per_game_mean_distance[2]);
  CHECK(rows[4].variant == "uniform_static");
  CHECK_THROWS_AS(export_learning_curve(StatsReport{}, dir.path / "empty.csv"), std::invalid_argument);
}

TEST_CASE("episode logs round-trip") {
  const auto map = island();
  GameSetup setup;
  setup.game_index = 4;
  setup.variant = "adaptive";
  setup.snapshot_turns = {0, 3};
  const auto log = run_game(map, GameRules{}, kWestInner, grid::uniform_transition(*map), nullptr, setup);
  CHECK(log.belief_snapshots.size() == 2);
  const auto text = serialize_episode_log(log);
  const auto parsed = parse_episode_log(text, *map);
  CHECK(parsed == log);
  CHECK(serialize_episode_log(parsed) == text);
  CHECK_THROWS(parse_episode_log("{}", *map));
}

TEST_CASE("simulate writes identical artifacts for the same seed") {
  auto plan = load_plan(std::filesystem::path(HMMTRACK_PLANS_DIR) / "repeat10.cfg");
  plan.games = 3;
  plan.compare_games = std::pair{1, 3};
  plan.hesitation = 0.2;
  const auto map = island();
  TempDir a("hmmtrack_sim_a"), b("hmmtrack_sim_b");
  simulate(plan, map, a.path);
  simulate(plan, map, b.path);
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a.path);
    CHECK(read_text_file(entry.path()) == read_text_file(b.path / rel));
    ++files;
  }
  CHECK(files > 10);
  CHECK(std::filesystem::exists(a.path / "adaptive" / "heatmaps" / "game_01_turn_005.ppm"));

  // stats between two runs equals Welch on the same numbers.
  const auto rows = read_learning_curve(a.path / "learning_curve.csv");
  std::vector<double> xs;
  for (const auto& r : rows) {
    if (r.variant == "adaptive") xs.push_back(r.mean_distance);
  }
  RunSelection sel;
  sel.variant = "adaptive";
  const auto w = compare_runs(a.path, b.path, sel);
  CHECK(w.t == 0.0);
  CHECK(w.p == 1.0);
  CHECK(w.df == doctest::Approx(welch_t_test(xs, xs).df));
}
