// Command-line front end: experiments, learning, statistics, exports and the
// live-play server.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hmmtrack/experiments/episode_log.hpp"
#include "hmmtrack/experiments/export.hpp"
#include "hmmtrack/experiments/plan.hpp"
#include "hmmtrack/experiments/simulate.hpp"
#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/pursuit/knowledge_store.hpp"
#include "hmmtrack/service/server.hpp"
#include "hmmtrack/service/session.hpp"

namespace {

using namespace hmmtrack;

std::shared_ptr<const grid::GridMap> load_map(const std::string& path) {
  return std::make_shared<const grid::GridMap>(grid::load_map_file(path));
}

std::optional<std::pair<int, int>> parse_range(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto dash = text.find('-');
  if (dash == std::string::npos) {
    const int g = std::stoi(text);
    return std::pair{g, g};
  }
  return std::pair{std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
}

int cmd_simulate(const std::string& plan_path, std::optional<std::uint64_t> seed, const std::string& out,
                 const std::string& map_override) {
  auto plan = experiments::load_plan(plan_path);
  if (seed) plan.seed = *seed;
  if (!map_override.empty()) plan.map_path = map_override;
  if (plan.map_path.empty()) throw std::runtime_error(plan_path + ": no map given (use map = ... or --map)");
  const auto map = load_map(plan.map_path.string());
  const auto result = experiments::simulate(plan, map, out);
  for (const auto& curve : result.report.curves) {
    std::printf("%-18s", std::string(experiments::to_string(curve.variant)).c_str());
    for (double d : curve.per_game_mean_distance) std::printf(" %.3f", d);
    std::printf("\n");
  }
  for (const auto& c : result.report.comparisons) {
    std::printf("%s: t = %.6g, df = %.6g, p = %.6g\n", c.label.c_str(), c.t, c.df, c.p);
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_learn(const std::string& store_path, const std::string& map_path, const std::string& out,
              const hmm::BaumWelchOptions& opts) {
  const auto map = load_map(map_path);
  auto store = pursuit::load_store(store_path, *map);
  store = pursuit::learn(store, *map, pursuit::start_distribution(*map), opts);
  const auto mu = pursuit::start_distribution(*map);
  const double ll = hmm::pooled_log_likelihood(store.episodes, mu, pursuit::blended_matrix(store));
  pursuit::save_store(store, out.empty() ? store_path : out);
  std::printf("episodes = %zu, blended log-likelihood = %.10g\n", store.episodes.size(), ll);
  return 0;
}

int cmd_stats(const std::string& run_a, const std::string& run_b, const std::string& variant,
              const std::string& games) {
  experiments::RunSelection sel;
  if (!variant.empty()) sel.variant = variant;
  sel.games = parse_range(games);
  const auto w = experiments::compare_runs(run_a, run_b, sel);
  std::printf("t = %.10g\ndf = %.10g\np = %.10g\n", w.t, w.df, w.p);
  return 0;
}

int cmd_export(const std::string& map_path, const std::string& log_path, const std::string& run_dir,
               std::optional<int> turn, const std::string& out) {
  if (!run_dir.empty()) {
    // Learning curve from the CSV of a finished run, rewritten in place or elsewhere.
    const auto rows = experiments::read_learning_curve(std::filesystem::path(run_dir) / "learning_curve.csv");
    experiments::StatsReport report;
    for (const auto& row : rows) {
      auto v = experiments::variant_from(row.variant);
      if (!v) throw std::runtime_error("unknown variant '" + row.variant + "' in learning curve");
      auto it = std::find_if(report.curves.begin(), report.curves.end(), [&](const auto& c) { return c.variant == *v; });
      if (it == report.curves.end()) {
        report.curves.push_back({*v, {}});
        it = std::prev(report.curves.end());
      }
      it->per_game_mean_distance.push_back(row.mean_distance);
    }
    experiments::export_learning_curve(report, out);
    std::printf("wrote %s\n", out.c_str());
    return 0;
  }
  if (map_path.empty()) throw std::runtime_error("--log needs --map");
  const auto map = load_map(map_path);
  const auto log = experiments::read_episode_log(log_path, *map);
  const int t = turn.value_or(static_cast<int>(log.records.size()));
  hmm::Vector belief;
  if (auto it = log.belief_snapshots.find(t); it != log.belief_snapshots.end()) {
    belief = it->second;
  } else {
    const auto beliefs = experiments::replay_beliefs(log, map);
    if (t < 0 || static_cast<std::size_t>(t) >= beliefs.size()) {
      throw std::runtime_error("turn " + std::to_string(t) + " is outside the logged game");
    }
    belief = beliefs[static_cast<std::size_t>(t)];
  }
  experiments::export_heatmap(belief, *map, out);
  std::printf("wrote %s.csv and %s.ppm\n", out.c_str(), out.c_str());
  return 0;
}

int cmd_serve(const std::string& maps_dir, const service::ServerOptions& options) {
  service::SessionHub hub(service::SessionHub::load_maps(maps_dir));
  if (!hub.maps().contains(options.default_map)) {
    throw std::runtime_error("default map '" + options.default_map + "' not found in " + maps_dir);
  }
  service::Server server(hub, options);
  std::printf("serving %zu map(s) on ws://%s:%u\n", hub.maps().size(), options.address.c_str(),
              static_cast<unsigned>(options.port));
  std::fflush(stdout);
  server.run();
  return 0;
}

void print_board(const grid::GridMap& map, const service::State& s) {
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const grid::Position p{x, y};
      char c = map.is_floor(p) ? '.' : '#';
      if (map.is_goal(p)) c = 'G';
      else if (map.is_camera(p)) c = 'C';
      if (s.belief_grid) {
        const auto& cell = (*s.belief_grid)[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
        if (cell && *cell >= 0.05) c = *cell >= 0.25 ? '@' : '+';
      }
      if (p == s.ai_pos) c = 'A';
      if (p == s.agent_pos) c = 'P';
      std::putchar(c);
    }
    std::putchar('\n');
  }
  std::printf("turn %d, occupying %d\n", s.turn, s.occupy_progress);
}

// Plays games against the adaptive tracker in the terminal, without the
// network layer. Moves are N/S/E/W or '.', one or more per line; 'q' resigns.
int cmd_play(const std::string& map_path, bool debug, const std::string& scripted) {
  const auto map = load_map(map_path);
  service::SessionHub hub({{"local", map}});
  auto session = hub.create_session("local");
  session->handle(service::SetDebug{debug});
  std::istringstream script(scripted);
  std::istream& in = scripted.empty() ? std::cin : script;

  auto show = [&](const std::vector<service::ServerMessage>& replies) {
    bool over = false;
    for (const auto& m : replies) {
      if (const auto* s = std::get_if<service::State>(&m)) print_board(*map, *s);
      if (const auto* g = std::get_if<service::GameOver>(&m)) {
        std::printf("game %d over: %s, mean distance %.3f\n", g->games_played,
                    std::string(experiments::to_string(g->outcome)).c_str(), g->mean_distance);
        over = true;
      }
      if (const auto* e = std::get_if<service::Error>(&m)) std::printf("error (%s): %s\n", e->code.c_str(), e->text.c_str());
    }
    return over;
  };

  show(session->handle(service::NewGame{}));
  std::string line;
  while (std::getline(in, line)) {
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\r') continue;
      std::vector<service::ServerMessage> replies;
      if (c == 'q') {
        replies = session->handle(service::Resign{});
      } else if (auto move = grid::move_from_char(c)) {
        replies = session->handle(service::Move{*move});
      } else {
        std::printf("unknown move '%c'\n", c);
        continue;
      }
      if (show(replies)) {
        session->wait_for_learning();
        std::printf("learned from %d game(s); new game\n", session->games_played());
        show(session->handle(service::NewGame{}));
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid pursuit tracker: HMM belief tracking with cross-game learning"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run an experiment plan and write logs, curves and heatmaps");
  std::string plan_path, out_dir = "out", sim_map;
  std::optional<std::uint64_t> seed;
  simulate->add_option("--plan", plan_path, "Plan file (key = value)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Override the plan's seed");
  simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--map", sim_map, "Override the plan's map file");

  auto* learn = app.add_subcommand("learn", "Re-learn the matrices of a knowledge store");
  std::string store_path, learn_map, learn_out;
  hmm::BaumWelchOptions bw;
  learn->add_option("--store", store_path, "Knowledge store file")->required()->check(CLI::ExistingFile);
  learn->add_option("--map", learn_map, "Map the store was trained on")->required()->check(CLI::ExistingFile);
  learn->add_option("--out", learn_out, "Where to write the result (default: overwrite --store)");
  learn->add_option("--max-iters", bw.max_iters)->capture_default_str();
  learn->add_option("--tol", bw.tol)->capture_default_str();
  learn->add_option("--smoothing-eps", bw.smoothing_eps)->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Welch's t-test between the learning curves of two runs");
  std::string run_a, run_b, stats_variant, stats_games;
  stats->add_option("run_a", run_a, "First run directory")->required()->check(CLI::ExistingDirectory);
  stats->add_option("run_b", run_b, "Second run directory")->required()->check(CLI::ExistingDirectory);
  stats->add_option("--variant", stats_variant, "Only rows of this tracker variant");
  stats->add_option("--games", stats_games, "Only games in FIRST-LAST");

  auto* exp = app.add_subcommand("export", "Heatmap from an episode log, or a learning curve from a run");
  std::string exp_map, exp_log, exp_run, exp_out;
  std::optional<int> exp_turn;
  exp->add_option("--map", exp_map, "Map file (with --log)")->check(CLI::ExistingFile);
  auto* log_opt = exp->add_option("--log", exp_log, "Episode log JSON")->check(CLI::ExistingFile);
  auto* run_opt = exp->add_option("--run", exp_run, "Run directory")->check(CLI::ExistingDirectory);
  log_opt->excludes(run_opt);
  exp->add_option("--turn", exp_turn, "Turn of the heatmap (default: last)");
  exp->add_option("--out", exp_out, "Output stem (heatmap) or CSV path (curve)")->required();

  auto* serve = app.add_subcommand("serve", "Start the WebSocket session server");
  service::ServerOptions server_opts;
  std::string maps_dir = "maps";
  serve->add_option("--address", server_opts.address)->capture_default_str();
  serve->add_option("--port", server_opts.port)->capture_default_str();
  serve->add_option("--maps", maps_dir, "Directory of *.map files")->capture_default_str();
  serve->add_option("--default-map", server_opts.default_map)->capture_default_str();
  serve->add_option("--threads", server_opts.io_threads)->capture_default_str();

  auto* play = app.add_subcommand("play", "Play in the terminal against the adaptive tracker");
  std::string play_map, play_moves;
  bool play_debug = false;
  play->add_option("--map", play_map, "Map file")->required()->check(CLI::ExistingFile);
  play->add_flag("--debug", play_debug, "Overlay the tracker's belief (+ >= 5%, @ >= 25%)");
  play->add_option("--moves", play_moves, "Play these moves instead of reading stdin");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(plan_path, seed, out_dir, sim_map);
    if (*learn) return cmd_learn(store_path, learn_map, learn_out, bw);
    if (*stats) return cmd_stats(run_a, run_b, stats_variant, stats_games);
    if (*exp) {
      if (exp_log.empty() && exp_run.empty()) throw std::runtime_error("export needs --log or --run");
      return cmd_export(exp_map, exp_log, exp_run, exp_turn, exp_out);
    }
    if (*serve) return cmd_serve(maps_dir, server_opts);
    if (*play) return cmd_play(play_map, play_debug, play_moves);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hmmtrack: %s\n", e.what());
    return 1;
  }
  return 2;
}
