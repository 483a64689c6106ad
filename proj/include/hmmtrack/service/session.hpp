#pragma once

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/asio/thread_pool.hpp>

#include "hmmtrack/experiments/game.hpp"
#include "hmmtrack/hmm/baum_welch.hpp"
#include "hmmtrack/pursuit/knowledge_store.hpp"
#include "hmmtrack/service/protocol.hpp"

namespace hmmtrack::service {

class UnknownMap : public ProtocolError {
 public:
  explicit UnknownMap(const std::string& name) : ProtocolError(error_code::kUnknownMap, "unknown map '" + name + "'") {}
};

class NoLiveGame : public ProtocolError {
 public:
  NoLiveGame() : ProtocolError(error_code::kNoLiveGame, "no game in progress") {}
};

class DebugDisabled : public ProtocolError {
 public:
  DebugDisabled() : ProtocolError(error_code::kDebugDisabled, "belief debugging is off for this session") {}
};

struct SessionOptions {
  experiments::GameRules rules;
  hmm::BaumWelchOptions baum_welch;
  double blend_lambda = 0.5;
  std::size_t short_window = 3;
};

/// One human opponent on one map. Messages must be handed to handle() one at
/// a time; learning runs on the executor passed in and swaps the learned
/// matrices into the store when it finishes.
class Session : public std::enable_shared_from_this<Session> {
 public:
  using Post = std::function<void(std::function<void()>)>;
  using Notify = std::function<void(const ServerMessage&)>;

  Session(std::string id, std::string map_name, std::shared_ptr<const grid::GridMap> map, SessionOptions options,
          Post post_learning);

  const std::string& id() const noexcept { return id_; }
  Welcome welcome() const;

  /// Replies to send in order. Game errors come back as Error messages.
  std::vector<ServerMessage> handle(const ClientMessage& msg);

  /// Receives LearningDone (or a learning Error) from the executor thread.
  void set_notifier(Notify notify);

  /// Throws NoLiveGame or DebugDisabled.
  BeliefGrid snapshot_belief() const;

  pursuit::KnowledgeStore store() const;
  int games_played() const;
  bool debug() const noexcept { return debug_; }
  /// The most recent game, live or finished.
  const experiments::Game* game() const noexcept { return game_ ? &*game_ : nullptr; }
  /// Log of the last finished game, numbered and labelled like run_game's.
  std::optional<experiments::EpisodeLog> last_episode() const;

  /// Blocks until no learning job of this session is pending.
  void wait_for_learning() const;

 private:
  State state_message() const;
  std::vector<ServerMessage> finish_game();

  std::string id_;
  std::string map_name_;
  std::shared_ptr<const grid::GridMap> map_;
  SessionOptions options_;
  Post post_learning_;

  std::optional<experiments::Game> game_;
  std::optional<experiments::EpisodeLog> last_episode_;
  bool debug_ = false;

  mutable std::mutex mutex_;  // guards the members below
  mutable std::condition_variable learning_cv_;
  pursuit::KnowledgeStore store_;
  std::size_t learned_episodes_ = 0;
  int games_played_ = 0;
  int pending_jobs_ = 0;
  Notify notify_;
};

/// Owns the maps, the live sessions and the learning thread pool.
class SessionHub {
 public:
  using MapTable = std::map<std::string, std::shared_ptr<const grid::GridMap>>;

  explicit SessionHub(MapTable maps, SessionOptions defaults = {}, std::size_t learning_threads = 1);
  ~SessionHub();
  SessionHub(const SessionHub&) = delete;
  SessionHub& operator=(const SessionHub&) = delete;

  /// Every *.map file in `dir`, keyed by file stem.
  static MapTable load_maps(const std::filesystem::path& dir);

  /// Throws UnknownMap.
  std::shared_ptr<Session> create_session(const std::string& map_name);
  std::shared_ptr<Session> create_session(const std::string& map_name, const experiments::GameRules& rules);
  std::shared_ptr<Session> find(const std::string& id) const;
  void close(const std::string& id);
  std::size_t session_count() const;
  const MapTable& maps() const noexcept { return maps_; }

 private:
  MapTable maps_;
  SessionOptions defaults_;
  boost::asio::thread_pool pool_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 id_rng_;
  std::uint64_t next_id_ = 1;
};

}  // namespace hmmtrack::service
