#include "coopvax/server/room.hpp"

#include <algorithm>
#include <random>

#include "coopvax/protocol/view.hpp"
#include "coopvax/sim/game.hpp"
#include "coopvax/sim/rules.hpp"
#include "coopvax/sim/serialize.hpp"

namespace coopvax::server {

namespace {

using protocol::ErrorCode;
using ojson = nlohmann::ordered_json;

const char* const kInstructions[] = {
    "Welcome! Clear every stage together: collect the team's vaccine parts and finish every personal goal.",
    "Move with the arrow keys or WASD. Space performs your role action, S uses a sanitizer.",
    "Citizen: pick up groceries. Doctor: treat infected civilians. Sanitation worker: disinfect viruses. "
    "Law enforcer: disperse crowds.",
    "Masks and sanitizers shield you from the virus. Camps heal you, vitamins restore health.",
    "Follow the arrow to the nearest vaccine part. If anyone's health reaches zero the game is over for everyone.",
    "Press Esc to trade points for another player's role.",
};

std::string_view outcome_reason(const sim::GameState& g) {
  if (g.phase == sim::Phase::Won) return "cleared";
  return g.loss_reason == sim::LossReason::Disconnect ? "disconnect" : "health";
}

}  // namespace

void send_message(Peer& peer, const protocol::Message& msg) { peer.send(protocol::encode(msg)); }

std::uint64_t HubContext::allocate_seed() {
  const auto n = games_started_.fetch_add(1);
  if (config.seed) return *config.seed + n;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Room::Room(std::string name, HubContext& ctx, Clock::time_point now)
    : name_(std::move(name)), ctx_(ctx), created_at_(now) {}

Room::Slot* Room::find(const std::string& player) {
  auto it = std::find_if(members_.begin(), members_.end(), [&](const Slot& s) { return s.name == player; });
  return it == members_.end() ? nullptr : &*it;
}

void Room::send_to(const Slot& slot, const protocol::Message& msg) {
  if (slot.peer) send_message(*slot.peer, msg);
}

void Room::broadcast(const protocol::Message& msg) {
  const auto frame = protocol::encode(msg);
  for (const auto& m : members_)
    if (m.peer) m.peer->send(frame);
}

void Room::broadcast_room_state() {
  protocol::RoomState rs{name_, {}, game_.has_value()};
  for (const auto& m : members_) rs.members.push_back({m.name, m.role, m.name == creator_});
  broadcast(rs);
}

void Room::reply_error(const PeerPtr& peer, ErrorCode code, std::string detail) {
  if (peer) send_message(*peer, protocol::Error{code, std::move(detail)});
}

bool Room::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

bool Room::started() const {
  std::lock_guard lock(mu_);
  return game_.has_value();
}

std::optional<sim::GameState> Room::game() const {
  std::lock_guard lock(mu_);
  return game_;
}

std::optional<std::string> Room::creator() const {
  std::lock_guard lock(mu_);
  if (members_.empty()) return std::nullopt;
  return creator_;
}

std::optional<protocol::Error> Room::join(const PeerPtr& peer, const std::string& player, bool creator) {
  std::lock_guard lock(mu_);
  if (closed_) return protocol::Error{ErrorCode::RoomNotFound, "room '" + name_ + "' no longer exists"};
  if (auto* slot = find(player)) {
    if (!game_ || slot->peer || over_) return protocol::Error{ErrorCode::NameTaken, "'" + player + "' is already in the room"};
    // Reconnect within the grace period.
    slot->peer = peer;
    slot->disconnected_at.reset();
    ctx_.log->write("player_reconnected", {{"room", name_}, {"player", player}, {"tick", game_->tick}});
    broadcast_room_state();
    publish(sim::set_connected(*game_, player, true));
    send_snapshot(*slot);
    return std::nullopt;
  }
  if (members_.size() >= sim::rules::kMaxPlayers) return protocol::Error{ErrorCode::RoomFull, "room holds at most four players"};
  if (game_) return protocol::Error{ErrorCode::AlreadyStarted, "game already started"};
  members_.push_back({player, peer, std::nullopt, std::nullopt});
  if (creator || members_.size() == 1) creator_ = player;
  ctx_.log->write("player_joined", {{"room", name_}, {"player", player}, {"creator", creator_ == player}});
  broadcast_room_state();
  return std::nullopt;
}

void Room::handle(const PeerPtr& peer, const std::string& player, const protocol::Message& msg) {
  std::lock_guard lock(mu_);
  auto* slot = find(player);
  if (closed_ || !slot || slot->peer != peer) {
    reply_error(peer, ErrorCode::NotInRoom, "not a member of room '" + name_ + "'");
    return;
  }
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, protocol::SelectAvatar>) {
          if (game_) return reply_error(peer, ErrorCode::AlreadyStarted, "roles are fixed once the game starts");
          for (const auto& other : members_) {
            if (other.name != player && other.role == m.role) {
              send_message(*peer, protocol::AvatarRejected{"role_taken"});
              return;
            }
          }
          slot->role = m.role;
          broadcast_room_state();
        } else if constexpr (std::is_same_v<T, protocol::StartGame>) {
          start_game(peer, player);
        } else if constexpr (std::is_same_v<T, protocol::Input>) {
          if (!game_ || game_->phase != sim::Phase::Running)
            return reply_error(peer, ErrorCode::NotRunning, "no game is running");
          sim::queue_command(*game_, player, m.command);
          if (ctx_.config.lockstep) {
            ready_.insert(player);
            maybe_step_lockstep();
          }
        } else if constexpr (std::is_same_v<T, protocol::Chat>) {
          broadcast(protocol::ChatRelay{player, m.text});
        } else {
          reply_error(peer, ErrorCode::SchemaViolation, "unexpected message");
        }
      },
      msg);
}

void Room::start_game(const PeerPtr& peer, const std::string& player) {
  if (game_) return reply_error(peer, ErrorCode::AlreadyStarted, "game already started");
  if (player != creator_) return reply_error(peer, ErrorCode::NotCreator, "only the room creator can start");
  std::vector<sim::RosterEntry> roster;
  for (const auto& m : members_) {
    if (!m.role) return reply_error(peer, ErrorCode::UnassignedRoles, "'" + m.name + "' has not picked a role");
    roster.push_back({m.name, *m.role});
  }
  seed_ = ctx_.allocate_seed();
  try {
    game_ = sim::new_game(ctx_.campaign, roster, seed_);
  } catch (const sim::SimError& e) {
    return reply_error(peer, ErrorCode::SchemaViolation, e.what());
  }
  ojson roster_json = ojson::array();
  for (const auto& r : roster) roster_json.push_back({{"player", r.id}, {"role", sim::to_string(r.role)}});
  ctx_.log->write("game_started",
                  {{"room", name_}, {"seed", seed_}, {"roster", roster_json}, {"lockstep", ctx_.config.lockstep}});

  broadcast_room_state();
  for (const char* line : kInstructions) broadcast(protocol::ChatRelay{"server", line});
  send_snapshots();
  if (!ctx_.config.lockstep && ctx_.on_game_started) ctx_.on_game_started(shared_from_this());
}

void Room::publish(const std::vector<sim::GameEvent>& events) {
  const auto tick = game_ ? game_->tick : 0;
  for (const auto& e : events) {
    const protocol::Event msg{tick, e};
    if (const auto to = sim::private_recipient(e)) {
      if (const auto* slot = find(*to)) send_to(*slot, msg);
    } else {
      broadcast(msg);
    }
  }
}

void Room::send_snapshot(const Slot& slot) {
  if (!slot.peer) return;
  auto view = protocol::make_view(*game_);
  view.hint = sim::vaccine_direction_hint(*game_, slot.name);
  send_message(*slot.peer, protocol::Snapshot{game_->tick, std::move(view)});
}

void Room::send_snapshots() {
  const auto base = protocol::make_view(*game_);
  for (const auto& m : members_) {
    if (!m.peer) continue;
    auto view = base;
    view.hint = sim::vaccine_direction_hint(*game_, m.name);
    send_message(*m.peer, protocol::Snapshot{game_->tick, std::move(view)});
  }
}

void Room::step() {
  publish(sim::tick(*game_));
  const bool running = game_->phase == sim::Phase::Running;
  const auto every = static_cast<std::uint64_t>(ctx_.config.snapshot_interval_ticks());
  if (!running || game_->tick % every == 0) send_snapshots();
  if (!running) finish();
}

void Room::finish() {
  if (over_) return;
  over_ = true;
  ready_.clear();
  protocol::GameOver go{game_->phase == sim::Phase::Won, std::string(outcome_reason(*game_)), {}};
  ojson scores = ojson::array();
  ojson roster = ojson::array();
  for (const auto& p : game_->players) {
    go.final_scores.push_back({p.id, p.score});
    scores.push_back({{"player", p.id}, {"score", p.score}});
    roster.push_back({{"player", p.id}, {"role", sim::to_string(p.role)}});
  }
  broadcast(go);
  ojson record;
  record["room"] = name_;
  record["roster"] = roster;
  record["seed"] = seed_;
  record["outcome"] = go.won ? "won" : "lost";
  record["reason"] = go.reason;
  record["stage_reached"] = game_->stage().stage_index;
  record["final_scores"] = scores;
  record["duration_ticks"] = game_->tick;
  record["final_state_hash"] = sim::state_hash(*game_);
  ctx_.results->append(record);
  ctx_.log->write("game_over", record);
}

void Room::maybe_step_lockstep() {
  if (!game_ || over_) return;
  for (const auto& m : members_)
    if (m.peer && !ready_.contains(m.name)) return;
  if (ready_.empty()) return;  // nobody connected
  ready_.clear();
  step();
}

bool Room::advance() {
  std::lock_guard lock(mu_);
  if (closed_ || !game_ || over_) return false;
  step();
  return !over_;
}

bool Room::remove_member(const std::string& player) {
  members_.erase(std::remove_if(members_.begin(), members_.end(), [&](const Slot& s) { return s.name == player; }),
                 members_.end());
  if (members_.empty()) {
    closed_ = true;
    return true;
  }
  if (creator_ == player) creator_ = members_.front().name;
  broadcast_room_state();
  return false;
}

bool Room::leave(const PeerPtr& peer, const std::string& player, Clock::time_point now) {
  {
    std::lock_guard lock(mu_);
    auto* slot = find(player);
    if (!slot || slot->peer != peer) return closed_;
    if (!game_ || over_) {
      ctx_.log->write("player_left", {{"room", name_}, {"player", player}});
      return remove_member(player);
    }
  }
  // Leaving a running game counts as a disconnect; the grace period applies.
  return disconnect(peer, player, now);
}

bool Room::disconnect(const PeerPtr& peer, const std::string& player, Clock::time_point now) {
  std::lock_guard lock(mu_);
  auto* slot = find(player);
  if (!slot || slot->peer != peer) return closed_;
  if (!game_ || over_) {
    ctx_.log->write("player_left", {{"room", name_}, {"player", player}});
    return remove_member(player);
  }
  slot->peer.reset();
  slot->disconnected_at = now;
  ready_.erase(player);
  ctx_.log->write("player_disconnected", {{"room", name_}, {"player", player}, {"tick", game_->tick}});
  publish(sim::set_connected(*game_, player, false));
  broadcast_room_state();
  if (ctx_.config.lockstep) maybe_step_lockstep();
  return false;
}

bool Room::housekeeping(Clock::time_point now) {
  std::lock_guard lock(mu_);
  if (closed_) return true;
  if (!game_) {
    if (now - created_at_ > std::chrono::duration<double>(ctx_.config.room_idle_secs)) {
      broadcast(protocol::Error{ErrorCode::RoomClosed, "room closed after being idle"});
      ctx_.log->write("room_closed", {{"room", name_}, {"reason", "idle"}});
      members_.clear();
      closed_ = true;
      return true;
    }
    return false;
  }
  if (!over_) {
    const auto grace = std::chrono::duration<double>(ctx_.config.grace_secs);
    for (const auto& m : members_) {
      if (m.disconnected_at && now - *m.disconnected_at >= grace) {
        ctx_.log->write("grace_expired", {{"room", name_}, {"player", m.name}, {"tick", game_->tick}});
        publish(sim::forfeit(*game_, m.name));
        send_snapshots();
        finish();
        break;
      }
    }
  }
  if (over_) {
    members_.erase(std::remove_if(members_.begin(), members_.end(), [](const Slot& s) { return !s.peer; }),
                   members_.end());
    if (members_.empty()) {
      closed_ = true;
      return true;
    }
    if (!find(creator_)) creator_ = members_.front().name;
  }
  return false;
}

// ---- hub --------------------------------------------------------------------

std::shared_ptr<Room> Hub::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  const auto it = rooms_.find(name);
  return it == rooms_.end() ? nullptr : it->second;
}

std::size_t Hub::room_count() const {
  std::lock_guard lock(mu_);
  return rooms_.size();
}

void Hub::drop(const std::shared_ptr<Room>& room) {
  std::lock_guard lock(mu_);
  const auto it = rooms_.find(room->name());
  if (it != rooms_.end() && it->second == room) rooms_.erase(it);
}

void Hub::on_frame(Link& link, std::string_view frame, Clock::time_point now) {
  const auto reply = [&](ErrorCode code, std::string detail) {
    send_message(*link.peer, protocol::Error{code, std::move(detail)});
  };
  protocol::Message msg;
  try {
    msg = protocol::decode(frame);
  } catch (const protocol::ProtocolError& e) {
    ctx_->log->write("bad_frame", {{"code", protocol::to_string(e.code())}, {"detail", e.what()}});
    return reply(e.code(), e.what());
  }
  if (link.room && link.room->closed()) link.room.reset();

  if (const auto* m = std::get_if<protocol::CreateRoom>(&msg)) {
    if (link.room) return reply(ErrorCode::AlreadyInRoom, "already in room '" + link.room->name() + "'");
    std::shared_ptr<Room> room;
    {
      std::lock_guard lock(mu_);
      auto& entry = rooms_[m->room_name];
      if (entry && !entry->closed()) return reply(ErrorCode::RoomExists, "room '" + m->room_name + "' exists");
      entry = std::make_shared<Room>(m->room_name, *ctx_, now);
      room = entry;
    }
    ctx_->log->write("room_created", {{"room", m->room_name}, {"creator", m->player_name}});
    if (auto err = room->join(link.peer, m->player_name, true)) return send_message(*link.peer, *err);
    link.room = room;
    link.player = m->player_name;
    return;
  }
  if (const auto* m = std::get_if<protocol::JoinRoom>(&msg)) {
    if (link.room) return reply(ErrorCode::AlreadyInRoom, "already in room '" + link.room->name() + "'");
    auto room = find(m->room_name);
    if (!room) return reply(ErrorCode::RoomNotFound, "no room named '" + m->room_name + "'");
    if (auto err = room->join(link.peer, m->player_name, false)) return send_message(*link.peer, *err);
    link.room = room;
    link.player = m->player_name;
    return;
  }
  if (std::holds_alternative<protocol::RoomState>(msg) || std::holds_alternative<protocol::AvatarRejected>(msg) ||
      std::holds_alternative<protocol::Snapshot>(msg) || std::holds_alternative<protocol::Event>(msg) ||
      std::holds_alternative<protocol::ChatRelay>(msg) || std::holds_alternative<protocol::Error>(msg) ||
      std::holds_alternative<protocol::GameOver>(msg)) {
    return reply(ErrorCode::SchemaViolation, std::string(protocol::type_name(msg)) + " is a server message");
  }
  if (!link.room) return reply(ErrorCode::NotInRoom, "join or create a room first");
  if (std::holds_alternative<protocol::LeaveRoom>(msg)) {
    auto room = std::move(link.room);
    link.room.reset();
    if (room->leave(link.peer, link.player, now)) drop(room);
    link.player.clear();
    return;
  }
  link.room->handle(link.peer, link.player, msg);
}

void Hub::on_close(Link& link, Clock::time_point now) {
  if (!link.room) return;
  auto room = std::move(link.room);
  link.room.reset();
  if (room->disconnect(link.peer, link.player, now)) drop(room);
}

void Hub::housekeeping(Clock::time_point now) {
  std::vector<std::shared_ptr<Room>> rooms;
  {
    std::lock_guard lock(mu_);
    for (const auto& [_, r] : rooms_) rooms.push_back(r);
  }
  for (const auto& r : rooms)
    if (r->housekeeping(now)) drop(r);
}

}  // namespace coopvax::server
