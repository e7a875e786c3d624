#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coopvax/protocol/message.hpp"
#include "coopvax/server/config.hpp"
#include "coopvax/server/journal.hpp"
#include "coopvax/sim/types.hpp"

namespace coopvax::server {

using Clock = std::chrono::steady_clock;

// A client connection as seen by rooms. send() queues and returns immediately.
class Peer {
 public:
  virtual ~Peer() = default;
  virtual void send(std::string frame) = 0;
  virtual void close() = 0;
  // Drops the references the connection holds into the hub and its room.
  // Only safe once no thread is running the io context.
  virtual void release() {}
};
using PeerPtr = std::shared_ptr<Peer>;

class Room;

// Shared by every room of one server.
struct HubContext {
  ServerConfig config;
  std::shared_ptr<const sim::Campaign> campaign;
  std::shared_ptr<JsonLog> log = std::make_shared<JsonLog>();
  std::shared_ptr<ResultsJournal> results = std::make_shared<ResultsJournal>();
  // Called once a free-running game starts; the server attaches a tick timer.
  std::function<void(const std::shared_ptr<Room>&)> on_game_started;

  std::uint64_t allocate_seed();

 private:
  std::atomic<std::uint64_t> games_started_{0};
};

// Lobby, avatar selection and the authoritative game of one room. Every
// public method takes the room lock, so message handling and ticking never overlap.
class Room : public std::enable_shared_from_this<Room> {
 public:
  Room(std::string name, HubContext& ctx, Clock::time_point now);

  const std::string& name() const { return name_; }

  std::optional<protocol::Error> join(const PeerPtr& peer, const std::string& player, bool creator);
  void handle(const PeerPtr& peer, const std::string& player, const protocol::Message& msg);
  // Both return true once the room has no members left (it is then closed).
  bool leave(const PeerPtr& peer, const std::string& player, Clock::time_point now);
  bool disconnect(const PeerPtr& peer, const std::string& player, Clock::time_point now);

  // One free-running tick. Returns false when there is nothing left to tick.
  bool advance();
  // Grace expiry, lobby idle timeout, cleanup after game over. True when the room should be dropped.
  bool housekeeping(Clock::time_point now);

  bool closed() const;
  bool started() const;
  std::optional<sim::GameState> game() const;
  std::optional<std::string> creator() const;

 private:
  struct Slot {
    std::string name;
    PeerPtr peer;
    std::optional<sim::Role> role;
    std::optional<Clock::time_point> disconnected_at;
  };

  Slot* find(const std::string& player);
  void send_to(const Slot& slot, const protocol::Message& msg);
  void broadcast(const protocol::Message& msg);
  void broadcast_room_state();
  void reply_error(const PeerPtr& peer, protocol::ErrorCode code, std::string detail);
  void start_game(const PeerPtr& peer, const std::string& player);
  void publish(const std::vector<sim::GameEvent>& events);
  void send_snapshots();
  void send_snapshot(const Slot& slot);
  void step();
  void finish();
  void maybe_step_lockstep();
  bool remove_member(const std::string& player);

  mutable std::mutex mu_;
  std::string name_;
  HubContext& ctx_;
  Clock::time_point created_at_;
  std::vector<Slot> members_;  // join order; the oldest member is first
  std::string creator_;
  std::optional<sim::GameState> game_;
  std::uint64_t seed_ = 0;
  std::set<std::string> ready_;  // lockstep: inputs received for the coming tick
  bool over_ = false;
  bool closed_ = false;
};

// Room registry plus per-connection message routing. Transport-agnostic.
class Hub {
 public:
  explicit Hub(std::shared_ptr<HubContext> ctx) : ctx_(std::move(ctx)) {}

  struct Link {
    PeerPtr peer;
    std::shared_ptr<Room> room;
    std::string player;
  };

  void on_frame(Link& link, std::string_view frame, Clock::time_point now = Clock::now());
  void on_close(Link& link, Clock::time_point now = Clock::now());
  void housekeeping(Clock::time_point now = Clock::now());

  std::shared_ptr<Room> find(const std::string& name) const;
  std::size_t room_count() const;
  HubContext& context() { return *ctx_; }

 private:
  void drop(const std::shared_ptr<Room>& room);

  std::shared_ptr<HubContext> ctx_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Room>> rooms_;
};

void send_message(Peer& peer, const protocol::Message& msg);

}  // namespace coopvax::server
