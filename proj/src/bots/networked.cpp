#include "coopvax/bots/networked.hpp"

#include <iostream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/read_until.hpp>
#include <boost/asio/streambuf.hpp>
#include <boost/asio/write.hpp>

namespace coopvax::bots {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using SteadyClock = std::chrono::steady_clock;

namespace {

// Blocking newline-delimited client with a receive timeout.
class WireClient {
 public:
  void connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
    boost::system::error_code ec;
    tcp::resolver resolver(io_);
    const auto endpoints = resolver.resolve(host, std::to_string(port), ec);
    if (!ec) asio::connect(socket_, endpoints, ec);
    if (ec) throw NetworkError("connect to " + host + ":" + std::to_string(port) + " failed: " + ec.message());
    socket_.set_option(tcp::no_delay(true));
    timeout_ = timeout;
  }

  void send(const protocol::Message& msg) { send_raw(protocol::encode(msg)); }

  void send_raw(std::string frame) {
    frame.push_back('\n');
    boost::system::error_code ec;
    asio::write(socket_, asio::buffer(frame), ec);
    if (ec) throw NetworkError("send failed: " + ec.message());
  }

  // Empty on orderly close.
  std::optional<protocol::Message> recv() {
    boost::system::error_code ec;
    std::size_t n = 0;
    bool done = false;
    asio::async_read_until(socket_, buf_, '\n', [&](boost::system::error_code e, std::size_t len) {
      ec = e;
      n = len;
      done = true;
    });
    io_.restart();
    io_.run_for(timeout_);
    if (!done) {
      socket_.cancel();
      io_.restart();
      io_.run();
      throw NetworkError("receive timed out after " + std::to_string(timeout_.count()) + " ms");
    }
    if (ec == asio::error::eof || ec == asio::error::connection_reset) return std::nullopt;
    if (ec) throw NetworkError("receive failed: " + ec.message());
    std::string line(asio::buffers_begin(buf_.data()), asio::buffers_begin(buf_.data()) + static_cast<std::ptrdiff_t>(n));
    buf_.consume(n);
    line.pop_back();
    try {
      return protocol::decode(line);
    } catch (const protocol::ProtocolError& e) {
      std::cerr << "coopvax-bots: undecodable frame from server (" << e.what() << "): " << line << '\n';
      throw NetworkError(std::string("protocol error: ") + e.what());
    }
  }

  void close() {
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

 private:
  asio::io_context io_;
  tcp::socket socket_{io_};
  asio::streambuf buf_;
  std::chrono::milliseconds timeout_{30'000};
};

template <typename T>
T expect(WireClient& c, const std::string& who) {
  for (;;) {
    auto msg = c.recv();
    if (!msg) throw NetworkError(who + ": server closed the connection during the lobby");
    if (auto* m = std::get_if<T>(&*msg)) return std::move(*m);
    if (auto* e = std::get_if<protocol::Error>(&*msg))
      throw NetworkError(who + ": server error " + std::string(protocol::to_string(e->code)) + ": " + e->detail);
    if (auto* r = std::get_if<protocol::AvatarRejected>(&*msg)) throw NetworkError(who + ": avatar rejected: " + r->reason);
  }
}

bool same_outcome(const ClientOutcome& a, const ClientOutcome& b) {
  return a.game_over == b.game_over && a.won == b.won && a.reason == b.reason && a.final_scores == b.final_scores &&
         a.stages_cleared == b.stages_cleared;
}

ClientOutcome play(WireClient& client, const NetworkedConfig& cfg, std::size_t slot) {
  const auto id = bot_name(slot);
  const auto& entry = cfg.bots[slot];
  auto bot = Bot::make(entry.policy, policy_seed(cfg.seed, slot), entry.script);
  std::vector<std::pair<std::string, sim::Role>> roster;
  for (std::size_t i = 0; i < cfg.bots.size(); ++i) roster.emplace_back(bot_name(i), cfg.bots[i].role);
  ReportBuilder builder(cfg.seed, roster);

  ClientOutcome out;
  out.player = id;
  const auto began = SteadyClock::now();
  std::optional<std::pair<SteadyClock::time_point, std::uint64_t>> first_snap;
  std::optional<std::pair<SteadyClock::time_point, std::uint64_t>> last_snap;
  std::optional<protocol::ClientView> last_view;

  const auto wrap_up = [&] {
    if (first_snap && last_snap && last_snap->first > first_snap->first) {
      const double secs = std::chrono::duration<double>(last_snap->first - first_snap->first).count();
      out.observed_tick_rate = static_cast<double>(last_snap->second - first_snap->second) / secs;
    }
    if (last_view) {
      builder.set_stage(last_view->stage_index);
      out.stage_count = last_view->stage_count;
      for (const auto& p : last_view->players) {
        builder.set_role(p.id, p.role);
        builder.set_score(p.id, p.score);
      }
    }
    for (const auto& s : out.final_scores) builder.set_score(s.player_name, s.score);
    builder.set_ticks(out.last_tick);
    if (out.game_over) {
      builder.set_final(out.won ? "won" : "lost", out.reason);
    } else {
      builder.set_final(out.killed ? "killed" : "unfinished", "connection_closed");
    }
    out.observed = builder.report();
    return out;
  };

  for (;;) {
    if (cfg.max_duration && SteadyClock::now() - began > *cfg.max_duration) {
      client.close();
      return wrap_up();
    }
    auto msg = client.recv();
    if (!msg) return wrap_up();

    if (auto* snap = std::get_if<protocol::Snapshot>(&*msg)) {
      const auto now = SteadyClock::now();
      if (!first_snap) first_snap.emplace(now, snap->tick);
      last_snap.emplace(now, snap->tick);
      ++out.snapshots;
      out.last_tick = std::max(out.last_tick, snap->tick);
      last_view = snap->view;
      if (snap->view.phase != sim::Phase::Running || snap->tick >= cfg.max_ticks) continue;

      if (cfg.fault != FaultMode::None && slot == cfg.fault_slot && snap->tick >= cfg.fault_tick) {
        if (cfg.fault == FaultMode::Kill) {
          out.killed = true;
          client.close();
          return wrap_up();
        }
        if (!out.fault_injected) {
          out.fault_injected = true;
          client.send_raw("{\"v\":1,\"type\":\"input\",\"command\":");
        }
      }
      client.send(protocol::Input{bot.decide(snap->view, id, snap->tick)});
    } else if (auto* e = std::get_if<protocol::Event>(&*msg)) {
      builder.record(e->tick, e->event);
      out.last_tick = std::max(out.last_tick, e->tick);
      if (auto* sc = std::get_if<sim::ev::StageCleared>(&e->event)) out.stages_cleared.push_back(sc->stage);
    } else if (auto* err = std::get_if<protocol::Error>(&*msg)) {
      ++out.errors;
      if (out.fault_injected && err->code == protocol::ErrorCode::MalformedInput) out.fault_answered = true;
    } else if (auto* go = std::get_if<protocol::GameOver>(&*msg)) {
      out.game_over = true;
      out.won = go->won;
      out.reason = go->reason;
      out.final_scores = go->final_scores;
      client.close();
      return wrap_up();
    }
  }
}

}  // namespace

NetworkedResult run_networked(const NetworkedConfig& cfg) {
  if (cfg.bots.empty() || cfg.bots.size() > 4) throw std::invalid_argument("roster must hold 1-4 bots");
  std::vector<std::unique_ptr<WireClient>> clients;
  for (std::size_t i = 0; i < cfg.bots.size(); ++i) {
    auto c = std::make_unique<WireClient>();
    c->connect(cfg.host, cfg.port, cfg.io_timeout);
    const auto id = bot_name(i);
    if (i == 0) {
      c->send(protocol::CreateRoom{cfg.room, id});
    } else {
      c->send(protocol::JoinRoom{cfg.room, id});
    }
    expect<protocol::RoomState>(*c, id);
    clients.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const auto id = bot_name(i);
    clients[i]->send(protocol::SelectAvatar{cfg.bots[i].role});
    for (;;) {
      const auto rs = expect<protocol::RoomState>(*clients[i], id);
      const auto it = std::find_if(rs.members.begin(), rs.members.end(), [&](const auto& m) { return m.player_name == id; });
      if (it != rs.members.end() && it->role == cfg.bots[i].role) break;
    }
  }
  clients[0]->send(protocol::StartGame{});

  NetworkedResult result;
  result.clients.resize(clients.size());
  std::vector<std::exception_ptr> failures(clients.size());
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < clients.size(); ++i) {
      threads.emplace_back([&, i] {
        try {
          result.clients[i] = play(*clients[i], cfg, i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  const ClientOutcome* reference = nullptr;
  result.outcomes_identical = true;
  for (const auto& c : result.clients) {
    if (c.killed) continue;
    if (!reference) {
      reference = &c;
    } else if (!same_outcome(*reference, c)) {
      result.outcomes_identical = false;
    }
  }

  auto& r = result.report;
  r.mode = "networked";
  for (const auto& b : cfg.bots) {
    r.policies.emplace_back(to_string(b.policy));
    r.roles.emplace_back(sim::to_string(b.role));
  }
  r.seed = cfg.seed;
  r.repetitions = 1;
  r.stage_count = 0;
  if (reference) {
    r.games.push_back(reference->observed);
    r.stage_count = reference->stage_count;
  }
  nlohmann::ordered_json clients_json = nlohmann::ordered_json::array();
  for (const auto& c : result.clients) {
    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (const auto& s : c.final_scores) scores.push_back({{"player", s.player_name}, {"score", s.score}});
    clients_json.push_back({{"player", c.player},
                            {"game_over", c.game_over},
                            {"won", c.won},
                            {"reason", c.reason},
                            {"stages_cleared", c.stages_cleared},
                            {"final_scores", scores},
                            {"last_tick", c.last_tick},
                            {"snapshots", c.snapshots},
                            {"observed_tick_rate", c.observed_tick_rate},
                            {"errors", c.errors},
                            {"killed", c.killed}});
  }
  r.extra["server"] = cfg.host + ":" + std::to_string(cfg.port);
  r.extra["room"] = cfg.room;
  r.extra["clients"] = std::move(clients_json);
  r.extra["outcomes_identical"] = result.outcomes_identical;
  return result;
}

}  // namespace coopvax::bots
