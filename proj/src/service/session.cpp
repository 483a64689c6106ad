#include "hmmtrack/service/session.hpp"

#include <cstdio>

#include <boost/asio/post.hpp>

#include "hmmtrack/grid/visibility.hpp"

namespace hmmtrack::service {

Session::Session(std::string id, std::string map_name, std::shared_ptr<const grid::GridMap> map,
                 SessionOptions options, Post post_learning)
    : id_(std::move(id)),
      map_name_(std::move(map_name)),
      map_(std::move(map)),
      options_(options),
      post_learning_(std::move(post_learning)),
      store_(pursuit::make_store(*map_, options.blend_lambda, options.short_window)) {
  options_.rules.validate();
}

Welcome Session::welcome() const {
  Welcome w;
  w.session_id = id_;
  w.map_name = map_name_;
  const std::string text = grid::serialize_map(*map_);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    w.map_rows.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  w.rules = options_.rules;
  return w;
}

void Session::set_notifier(Notify notify) {
  std::lock_guard lock(mutex_);
  notify_ = std::move(notify);
}

State Session::state_message() const {
  State s;
  s.turn = game_->turn();
  s.agent_pos = game_->agent_pos();
  s.ai_pos = game_->ai_pos();
  s.goals = map_->goals();
  s.cameras = map_->cameras();
  s.occupy_progress = game_->occupy_progress();
  if (debug_) s.belief_grid = snapshot_belief();
  return s;
}

BeliefGrid Session::snapshot_belief() const {
  if (!game_) throw NoLiveGame();
  if (!debug_) throw DebugDisabled();
  const auto& belief = game_->tracker().belief();
  BeliefGrid grid(static_cast<std::size_t>(map_->height()));
  for (int y = 0; y < map_->height(); ++y) {
    auto& row = grid[static_cast<std::size_t>(y)];
    row.resize(static_cast<std::size_t>(map_->width()));
    for (int x = 0; x < map_->width(); ++x) {
      if (auto s = map_->index({x, y})) row[static_cast<std::size_t>(x)] = belief[*s];
    }
  }
  return grid;
}

std::vector<ServerMessage> Session::handle(const ClientMessage& msg) {
  try {
    if (std::holds_alternative<NewGame>(msg)) {
      if (game_ && !game_->finished()) {
        return {Error{error_code::kGameInProgress, "finish or resign the current game first"}};
      }
      hmm::TransitionMatrix matrix = [&] {
        std::lock_guard lock(mutex_);
        return pursuit::blended_matrix(store_);
      }();
      game_.emplace(map_, options_.rules, std::move(matrix));
      return {state_message()};
    }
    if (const auto* move = std::get_if<Move>(&msg)) {
      if (!game_ || game_->finished()) throw NoLiveGame();
      try {
        game_->play_turn(move->action);
      } catch (const grid::IllegalMove& e) {
        return {Error{error_code::kIllegalMove, e.what()}};
      }
      std::vector<ServerMessage> out{state_message()};
      if (game_->finished()) {
        for (auto& m : finish_game()) out.push_back(std::move(m));
      }
      return out;
    }
    if (std::holds_alternative<Resign>(msg)) {
      if (!game_ || game_->finished()) throw NoLiveGame();
      game_->resign();
      return finish_game();
    }
    if (const auto* debug = std::get_if<SetDebug>(&msg)) {
      debug_ = debug->on;
      if (game_ && !game_->finished()) return {state_message()};
      return {};
    }
  } catch (const ProtocolError& e) {
    return {Error{e.code(), e.what()}};
  }
  return {};
}

std::vector<ServerMessage> Session::finish_game() {
  experiments::EpisodeLog log = game_->log();
  pursuit::KnowledgeStore snapshot = [&] {
    std::lock_guard lock(mutex_);
    ++games_played_;
    log.game_index = games_played_;
    store_.episodes.push_back(log.observations);
    ++pending_jobs_;
    return store_;
  }();
  log.variant = "adaptive";
  log.strategy = "human";
  const int games = log.game_index;
  // A game resigned before its first turn has no distances to average.
  const double mean = log.records.empty() ? 0.0 : experiments::mean_estimate_distance(log, options_.rules.exclude_sighted_turns);
  GameOver over{log.outcome, mean, games};
  last_episode_ = std::move(log);

  std::weak_ptr<Session> weak = weak_from_this();
  auto job = [weak, snapshot = std::move(snapshot), games, map = map_, opts = options_.baum_welch]() {
    std::optional<pursuit::KnowledgeStore> learned;
    std::string failure;
    try {
      learned = pursuit::learn(snapshot, *map, pursuit::start_distribution(*map), opts);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    auto self = weak.lock();
    if (!self) return;
    Notify notify;
    {
      std::lock_guard lock(self->mutex_);
      // Jobs may finish out of order; never replace newer knowledge.
      if (learned && learned->episodes.size() >= self->learned_episodes_) {
        self->store_.long_term = learned->long_term;
        self->store_.short_term = learned->short_term;
        self->learned_episodes_ = learned->episodes.size();
      }
      --self->pending_jobs_;
      notify = self->notify_;
    }
    self->learning_cv_.notify_all();
    if (notify) {
      if (learned) notify(LearningDone{games});
      else notify(Error{error_code::kLearningFailed, failure});
    }
  };
  if (post_learning_) {
    post_learning_(std::move(job));
  } else {
    job();
  }
  return {over};
}

pursuit::KnowledgeStore Session::store() const {
  std::lock_guard lock(mutex_);
  return store_;
}

int Session::games_played() const {
  std::lock_guard lock(mutex_);
  return games_played_;
}

std::optional<experiments::EpisodeLog> Session::last_episode() const { return last_episode_; }

void Session::wait_for_learning() const {
  std::unique_lock lock(mutex_);
  learning_cv_.wait(lock, [&] { return pending_jobs_ == 0; });
}

// ---------------------------------------------------------------------------

SessionHub::SessionHub(MapTable maps, SessionOptions defaults, std::size_t learning_threads)
    : maps_(std::move(maps)), defaults_(defaults), pool_(learning_threads), id_rng_(std::random_device{}()) {}

SessionHub::~SessionHub() { pool_.join(); }

SessionHub::MapTable SessionHub::load_maps(const std::filesystem::path& dir) {
  MapTable maps;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".map") {
      maps.emplace(entry.path().stem().string(),
                   std::make_shared<const grid::GridMap>(grid::load_map_file(entry.path())));
    }
  }
  return maps;
}

std::shared_ptr<Session> SessionHub::create_session(const std::string& map_name) {
  return create_session(map_name, defaults_.rules);
}

std::shared_ptr<Session> SessionHub::create_session(const std::string& map_name, const experiments::GameRules& rules) {
  const auto it = maps_.find(map_name);
  if (it == maps_.end()) throw UnknownMap(map_name);
  SessionOptions options = defaults_;
  options.rules = rules;

  std::lock_guard lock(mutex_);
  char buf[40];
  std::snprintf(buf, sizeof buf, "s%llu-%016llx", static_cast<unsigned long long>(next_id_++),
                static_cast<unsigned long long>(id_rng_()));
  auto session = std::make_shared<Session>(buf, map_name, it->second, options,
                                           [this](std::function<void()> job) { boost::asio::post(pool_, std::move(job)); });
  sessions_.emplace(session->id(), session);
  return session;
}

std::shared_ptr<Session> SessionHub::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void SessionHub::close(const std::string& id) {
  std::lock_guard lock(mutex_);
  sessions_.erase(id);
}

std::size_t SessionHub::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace hmmtrack::service
