#include "coopvax/server/server.hpp"

#include <csignal>
#include <mutex>
#include <thread>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>

#include "coopvax/maps/stage_io.hpp"
#include "sessions.hpp"

namespace coopvax::server {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

struct TickLoop {
  explicit TickLoop(asio::io_context& io) : timer(asio::make_strand(io)) {}
  asio::steady_timer timer;
  std::weak_ptr<Room> room;
  Clock::time_point deadline;
  Clock::duration period{};
};

void schedule(const std::shared_ptr<TickLoop>& loop) {
  loop->deadline += loop->period;
  const auto now = Clock::now();
  if (now - loop->deadline > std::chrono::seconds(1)) loop->deadline = now;  // hopelessly behind: resync
  loop->timer.expires_at(loop->deadline);
  loop->timer.async_wait([loop](boost::system::error_code ec) {
    if (ec) return;
    auto room = loop->room.lock();
    if (!room || !room->advance()) return;
    schedule(loop);
  });
}

}  // namespace

struct Server::Impl {
  Impl(ServerConfig c, sim::Campaign campaign) : cfg(std::move(c)) {
    cfg.validate();
    maps::validate_campaign(campaign);
    ctx = std::make_shared<HubContext>();
    ctx->config = cfg;
    ctx->campaign = std::make_shared<const sim::Campaign>(std::move(campaign));
    ctx->log = std::make_shared<JsonLog>(cfg.log_path);
    ctx->results = std::make_shared<ResultsJournal>(cfg.results_path);
    ctx->on_game_started = [this](const std::shared_ptr<Room>& room) { start_tick_loop(room); };
    hub = std::make_shared<Hub>(ctx);
  }

  void start_tick_loop(const std::shared_ptr<Room>& room) {
    auto loop = std::make_shared<TickLoop>(io);
    loop->room = room;
    loop->period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / cfg.tick_rate));
    loop->deadline = Clock::now();
    schedule(loop);
  }

  void listen(std::optional<tcp::acceptor>& acc, const Endpoint& ep, bool websocket) {
    const tcp::endpoint endpoint(asio::ip::make_address(ep.host), ep.port);
    acc.emplace(io);
    acc->open(endpoint.protocol());
    acc->set_option(asio::socket_base::reuse_address(true));
    acc->bind(endpoint);
    acc->listen();
    accept(*acc, websocket);
  }

  void accept(tcp::acceptor& acc, bool websocket) {
    acc.async_accept(asio::make_strand(io), [this, &acc, websocket](boost::system::error_code ec, tcp::socket socket) {
      if (ec == asio::error::operation_aborted) return;
      if (!ec) {
        socket.set_option(tcp::no_delay(true), ec);
        track(websocket ? start_ws_session(std::move(socket), hub) : start_tcp_session(std::move(socket), hub));
      }
      accept(acc, websocket);
    });
  }

  void track(const PeerPtr& peer) {
    std::lock_guard lock(sessions_mu);
    std::erase_if(sessions, [](const std::weak_ptr<Peer>& w) { return w.expired(); });
    sessions.push_back(peer);
  }

  // Runs after the io threads exit. Sessions with reads still pending hold
  // themselves and their room, so break those cycles before the handlers go.
  void finish() {
    for (auto& t : threads) t.join();
    threads.clear();
    std::lock_guard lock(sessions_mu);
    for (auto& w : sessions)
      if (auto p = w.lock()) p->release();
    sessions.clear();
    ctx->log->write("server_stopped");
  }

  void housekeeping() {
    house.expires_after(std::chrono::milliseconds(100));
    house.async_wait([this](boost::system::error_code ec) {
      if (ec) return;
      hub->housekeeping();
      housekeeping();
    });
  }

  ServerConfig cfg;
  asio::io_context io;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  std::shared_ptr<HubContext> ctx;
  std::shared_ptr<Hub> hub;
  std::optional<tcp::acceptor> ws_acceptor;
  std::optional<tcp::acceptor> tcp_acceptor;
  asio::steady_timer house{io};
  std::vector<std::thread> threads;
  std::mutex sessions_mu;
  std::vector<std::weak_ptr<Peer>> sessions;
};

Server::Server(ServerConfig config)
    : Server(config, maps::load_campaign(config.stages_dir.empty() ? maps::default_stages_dir() : config.stages_dir)) {}

Server::Server(ServerConfig config, sim::Campaign campaign)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(campaign))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& m = *impl_;
  if (!m.threads.empty()) return;
  if (m.cfg.ws_listen) m.listen(m.ws_acceptor, *m.cfg.ws_listen, true);
  if (m.cfg.tcp_listen) m.listen(m.tcp_acceptor, *m.cfg.tcp_listen, false);
  m.work.emplace(m.io.get_executor());
  m.housekeeping();
  m.ctx->log->write("server_started", {{"ws_port", ws_port()},
                                       {"tcp_port", tcp_port()},
                                       {"tick_rate", m.cfg.tick_rate},
                                       {"snapshot_rate", m.cfg.snapshot_rate},
                                       {"lockstep", m.cfg.lockstep},
                                       {"stages", m.ctx->campaign->size()}});
  for (int i = 0; i < m.cfg.threads; ++i) m.threads.emplace_back([&m] { m.io.run(); });
}

void Server::stop() {
  auto& m = *impl_;
  if (m.threads.empty()) return;
  m.work.reset();
  m.io.stop();
  m.finish();
}

void Server::run() {
  asio::signal_set signals(impl_->io, SIGINT, SIGTERM);
  signals.async_wait([this](boost::system::error_code ec, int) {
    if (!ec) impl_->io.stop();
  });
  start();
  impl_->finish();
}

std::uint16_t Server::ws_port() const { return impl_->ws_acceptor ? impl_->ws_acceptor->local_endpoint().port() : 0; }
std::uint16_t Server::tcp_port() const { return impl_->tcp_acceptor ? impl_->tcp_acceptor->local_endpoint().port() : 0; }
Hub& Server::hub() { return *impl_->hub; }

}  // namespace coopvax::server
