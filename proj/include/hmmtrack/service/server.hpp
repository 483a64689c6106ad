#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hmmtrack/service/session.hpp"

namespace hmmtrack::service {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  std::string default_map = "island";
  std::size_t io_threads = 1;
};

/// WebSocket front end. Each connection is one session; the map is chosen
/// with the `map` query parameter of the upgrade request (`/?map=island`).
/// Replies for one connection are written in order on that connection's
/// strand.
class Server {
 public:
  Server(SessionHub& hub, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting on background threads. Returns the bound port.
  std::uint16_t start();
  /// Stops accepting, closes connections and joins the threads.
  void stop();
  /// start() then block until stop() is called from another thread or a
  /// signal (SIGINT/SIGTERM) arrives.
  void run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Query parameter `key` from a request target such as "/play?map=x&y=z".
std::string query_parameter(std::string_view target, std::string_view key);

}  // namespace hmmtrack::service
