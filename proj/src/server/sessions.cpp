#include "sessions.hpp"

#include <deque>
#include <optional>
#include <string>

#include <boost/asio/post.hpp>
#include <boost/asio/read_until.hpp>
#include <boost/asio/streambuf.hpp>
#include <boost/asio/write.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace coopvax::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class TcpSession : public Peer, public std::enable_shared_from_this<TcpSession> {
 public:
  TcpSession(tcp::socket socket, std::shared_ptr<Hub> hub)
      : socket_(std::move(socket)), buf_(protocol::kMaxFrameBytes + 1), hub_(std::move(hub)) {}

  void begin() {
    link_.peer = shared_from_this();
    read();
  }

  void send(std::string frame) override {
    frame.push_back('\n');
    asio::post(socket_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
      if (self->done_) return;
      self->out_.push_back(std::move(f));
      if (self->out_.size() == 1) self->write();
    });
  }

  void close() override {
    asio::post(socket_.get_executor(), [self = shared_from_this()] {
      self->closing_ = true;
      if (self->out_.empty()) self->shutdown();
    });
  }

  void release() override {
    done_ = true;
    out_.clear();
    link_ = {};
    hub_.reset();
  }

 private:
  void read() {
    asio::async_read_until(socket_, buf_, '\n', [self = shared_from_this()](beast::error_code ec, std::size_t n) {
      self->on_read(ec, n);
    });
  }

  void on_read(beast::error_code ec, std::size_t n) {
    if (ec == asio::error::not_found) {
      send_message(*this, protocol::Error{protocol::ErrorCode::MalformedInput, "frame too large"});
      closing_ = true;
      return;
    }
    if (ec) return teardown();
    std::string line(asio::buffers_begin(buf_.data()), asio::buffers_begin(buf_.data()) + static_cast<std::ptrdiff_t>(n));
    buf_.consume(n);
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    if (!line.empty()) hub_->on_frame(link_, line);
    read();
  }

  void write() {
    asio::async_write(socket_, asio::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec || self->done_) return self->teardown();
      self->out_.pop_front();
      if (!self->out_.empty()) {
        self->write();
      } else if (self->closing_) {
        self->shutdown();
      }
    });
  }

  void shutdown() {
    beast::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
    teardown();
  }

  void teardown() {
    if (done_) return;
    done_ = true;
    out_.clear();
    hub_->on_close(link_);
    link_.peer.reset();
  }

  tcp::socket socket_;
  asio::streambuf buf_;
  std::shared_ptr<Hub> hub_;
  Hub::Link link_;
  std::deque<std::string> out_;
  bool closing_ = false;
  bool done_ = false;
};

class WsSession : public Peer, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, std::shared_ptr<Hub> hub) : stream_(std::move(socket)), hub_(std::move(hub)) {}

  void begin() {
    parser_.emplace();
    parser_->body_limit(64 * 1024);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buf_, *parser_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_request(ec);
    });
  }

  void send(std::string frame) override {
    asio::post(stream_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
      if (self->done_ || !self->ws_) return;
      self->out_.push_back(std::move(f));
      if (self->out_.size() == 1) self->write();
    });
  }

  void close() override {
    asio::post(stream_.get_executor(), [self = shared_from_this()] {
      if (self->ws_ && !self->done_)
        self->ws_->async_close(websocket::close_code::normal, [self](beast::error_code) { self->teardown(); });
    });
  }

  void release() override {
    done_ = true;
    out_.clear();
    link_ = {};
    hub_.reset();
  }

 private:
  void on_request(beast::error_code ec) {
    if (ec) return;
    auto req = parser_->release();
    if (!websocket::is_upgrade(req) || req.target() != "/ws") {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, req.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "websocket endpoint is /ws\n";
      res->prepare_payload();
      res->keep_alive(false);
      http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      });
      return;
    }
    stream_.expires_never();
    ws_.emplace(std::move(stream_));
    ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_->read_message_max(protocol::kMaxFrameBytes);
    ws_->text(true);
    ws_->async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->link_.peer = self;
      self->read();
    });
  }

  void read() {
    ws_->async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) return teardown();
    const auto frame = beast::buffers_to_string(buf_.data());
    buf_.consume(buf_.size());
    hub_->on_frame(link_, frame);
    read();
  }

  void write() {
    ws_->async_write(asio::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec || self->done_) return self->teardown();
      self->out_.pop_front();
      if (!self->out_.empty()) self->write();
    });
  }

  void teardown() {
    if (done_) return;
    done_ = true;
    out_.clear();
    hub_->on_close(link_);
    link_.peer.reset();
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buf_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::optional<websocket::stream<beast::tcp_stream>> ws_;
  std::shared_ptr<Hub> hub_;
  Hub::Link link_;
  std::deque<std::string> out_;
  bool done_ = false;
};

}  // namespace

PeerPtr start_tcp_session(tcp::socket socket, std::shared_ptr<Hub> hub) {
  auto s = std::make_shared<TcpSession>(std::move(socket), std::move(hub));
  s->begin();
  return s;
}

PeerPtr start_ws_session(tcp::socket socket, std::shared_ptr<Hub> hub) {
  auto s = std::make_shared<WsSession>(std::move(socket), std::move(hub));
  s->begin();
  return s;
}

}  // namespace coopvax::server
