#include "hmmtrack/service/server.hpp"

#include <csignal>
#include <deque>
#include <iostream>
#include <thread>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace hmmtrack::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::string query_parameter(std::string_view target, std::string_view key) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return {};
  std::string_view query = target.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (pair.substr(0, eq) == key) return eq == std::string_view::npos ? std::string() : std::string(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    query = query.substr(amp + 1);
  }
  return {};
}

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, SessionHub& hub, const ServerOptions& options)
      : ws_(std::move(socket)), hub_(hub), options_(options) {}

  ~Connection() {
    if (session_) hub_.close(session_->id());
  }

  void start() {
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->read_request(); });
  }

 private:
  void read_request() {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void on_request(beast::error_code ec) {
    if (ec) return;
    if (!websocket::is_upgrade(request_)) {
      beast::error_code ignored;
      ws_.next_layer().socket().shutdown(tcp::socket::shutdown_both, ignored);
      return;
    }
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::string map = query_parameter(std::string_view(request_.target().data(), request_.target().size()), "map");
    if (map.empty()) map = options_.default_map;
    try {
      session_ = hub_.create_session(map);
    } catch (const UnknownMap& e) {
      close_after_write_ = true;
      send(Error{e.code(), e.what()});
      return;
    }
    std::weak_ptr<Connection> weak = weak_from_this();
    session_->set_notifier([weak, executor = ws_.get_executor()](const ServerMessage& msg) {
      net::post(executor, [weak, text = serialize(msg)] {
        if (auto self = weak.lock()) self->send_text(text);
      });
    });
    send(session_->welcome());
    read_message();
  }

  void read_message() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_message(ec); });
  }

  void on_message(beast::error_code ec) {
    if (ec) return;
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      for (const auto& reply : session_->handle(parse_client_message(text))) send(reply);
    } catch (const ProtocolError& e) {
      send(Error{e.code(), e.what()});
    }
    read_message();
  }

  void send(const ServerMessage& msg) { send_text(serialize(msg)); }

  void send_text(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
  }

  void on_write(beast::error_code ec) {
    if (ec) return;
    outbox_.pop_front();
    if (!outbox_.empty()) {
      write_next();
    } else if (close_after_write_) {
      ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](beast::error_code) {});
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionHub& hub_;
  const ServerOptions& options_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::string> outbox_;
  std::shared_ptr<Session> session_;
  bool close_after_write_ = false;
};

}  // namespace

struct Server::Impl {
  Impl(SessionHub& h, ServerOptions o)
      : hub(h), options(std::move(o)), ioc(static_cast<int>(options.io_threads)), acceptor(net::make_strand(ioc)) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
      } else {
        std::make_shared<Connection>(std::move(socket), hub, options)->start();
      }
      accept();
    });
  }

  SessionHub& hub;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
};

Server::Server(SessionHub& hub, ServerOptions options) : impl_(std::make_unique<Impl>(hub, std::move(options))) {}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  const tcp::endpoint endpoint(net::ip::make_address(impl_->options.address), impl_->options.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->accept();
  for (std::size_t i = 0; i < std::max<std::size_t>(1, impl_->options.io_threads); ++i) {
    impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  }
  return impl_->acceptor.local_endpoint().port();
}

void Server::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
  impl_->threads.clear();
}

void Server::run() {
  net::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  start();
  for (auto& t : impl_->threads) t.join();
  impl_->threads.clear();
}

}  // namespace hmmtrack::service
