#include <gtest/gtest.h>

#include <deque>
#include <mutex>

#include "coopvax/protocol/message.hpp"
#include "coopvax/server/room.hpp"
#include "coopvax/sim/game.hpp"
#include "fixtures.hpp"

using namespace coopvax;
using namespace coopvax::server;
using protocol::ErrorCode;
using sim::Role;

namespace {

class FakePeer : public Peer {
 public:
  void send(std::string frame) override {
    std::lock_guard lock(mu_);
    inbox_.push_back(protocol::decode(frame));
  }
  void close() override { closed = true; }

  std::vector<protocol::Message> drain() {
    std::lock_guard lock(mu_);
    std::vector<protocol::Message> out(inbox_.begin(), inbox_.end());
    inbox_.clear();
    return out;
  }

  template <class T>
  std::vector<T> take() {
    std::vector<T> out;
    for (auto& m : drain())
      if (auto* t = std::get_if<T>(&m)) out.push_back(*t);
    return out;
  }

  std::optional<ErrorCode> last_error() {
    const auto errors = take<protocol::Error>();
    if (errors.empty()) return std::nullopt;
    return errors.back().code;
  }

  bool closed = false;

 private:
  std::mutex mu_;
  std::deque<protocol::Message> inbox_;
};

struct Client {
  std::shared_ptr<FakePeer> peer = std::make_shared<FakePeer>();
  Hub::Link link{peer, nullptr, {}};
};

const std::array<Role, 4> kRoles{Role::Citizen, Role::Doctor, Role::SanitationWorker, Role::LawEnforcer};

class HubTest : public ::testing::Test {
 protected:
  HubTest() { make_hub(false); }

  void make_hub(bool lockstep, sim::Campaign campaign = *coopvax::testing::bundled_campaign()) {
    auto ctx = std::make_shared<HubContext>();
    ctx->config.lockstep = lockstep;
    ctx->config.seed = 42;
    ctx->config.grace_secs = 5.0;
    ctx->config.room_idle_secs = 60.0;
    ctx->campaign = std::make_shared<const sim::Campaign>(std::move(campaign));
    hub = std::make_unique<Hub>(ctx);
  }

  void send(Client& c, const protocol::Message& m, Clock::time_point now = Clock::now()) {
    hub->on_frame(c.link, protocol::encode(m), now);
  }

  // Creates `room` with n members, each holding kRoles[i]; optionally starts it.
  std::vector<Client> lobby(const std::string& room, std::size_t n, bool start) {
    std::vector<Client> cs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto name = "p" + std::to_string(i);
      if (i == 0) {
        send(cs[i], protocol::CreateRoom{room, name});
      } else {
        send(cs[i], protocol::JoinRoom{room, name});
      }
    }
    for (std::size_t i = 0; i < n; ++i) send(cs[i], protocol::SelectAvatar{kRoles[i]});
    if (start) send(cs[0], protocol::StartGame{});
    return cs;
  }

  std::unique_ptr<Hub> hub;
};

}  // namespace

TEST_F(HubTest, CreateThenDuplicateName) {
  Client a, b;
  send(a, protocol::CreateRoom{"alpha", "moksha"});
  const auto states = a.peer->take<protocol::RoomState>();
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(states[0].room_name, "alpha");
  ASSERT_EQ(states[0].members.size(), 1u);
  EXPECT_TRUE(states[0].members[0].is_creator);
  EXPECT_FALSE(states[0].started);

  send(b, protocol::CreateRoom{"alpha", "other"});
  EXPECT_EQ(b.peer->last_error(), ErrorCode::RoomExists);
  send(b, protocol::JoinRoom{"beta", "other"});
  EXPECT_EQ(b.peer->last_error(), ErrorCode::RoomNotFound);
  send(a, protocol::CreateRoom{"gamma", "moksha"});
  EXPECT_EQ(a.peer->last_error(), ErrorCode::AlreadyInRoom);
  EXPECT_EQ(hub->room_count(), 1u);
}

TEST_F(HubTest, FifthJoinIsRoomFull) {
  auto cs = lobby("r", 4, false);
  Client fifth;
  send(fifth, protocol::JoinRoom{"r", "p4"});
  EXPECT_EQ(fifth.peer->last_error(), ErrorCode::RoomFull);
  EXPECT_EQ(fifth.link.room, nullptr);
}

TEST_F(HubTest, DuplicatePlayerNameRejected) {
  auto cs = lobby("r", 2, false);
  Client dup;
  send(dup, protocol::JoinRoom{"r", "p1"});
  EXPECT_EQ(dup.peer->last_error(), ErrorCode::NameTaken);
}

TEST_F(HubTest, RoleTakenIsRejected) {
  auto cs = lobby("r", 2, false);
  cs[1].peer->drain();
  send(cs[1], protocol::SelectAvatar{Role::Citizen});
  const auto rejected = cs[1].peer->take<protocol::AvatarRejected>();
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(rejected[0].reason, "role_taken");
  send(cs[1], protocol::SelectAvatar{Role::LawEnforcer});
  const auto states = cs[0].peer->take<protocol::RoomState>();
  ASSERT_FALSE(states.empty());
  EXPECT_EQ(states.back().members[1].role, Role::LawEnforcer);
}

TEST_F(HubTest, OnlyCreatorStartsAndRolesMustBeAssigned) {
  Client a, b;
  send(a, protocol::CreateRoom{"r", "a"});
  send(b, protocol::JoinRoom{"r", "b"});
  send(a, protocol::SelectAvatar{Role::Doctor});
  send(b, protocol::StartGame{});
  EXPECT_EQ(b.peer->last_error(), ErrorCode::NotCreator);
  send(a, protocol::StartGame{});
  EXPECT_EQ(a.peer->last_error(), ErrorCode::UnassignedRoles);
  EXPECT_FALSE(hub->find("r")->started());
}

TEST_F(HubTest, StartSendsInstructionsAndSnapshots) {
  auto cs = lobby("r", 2, true);
  ASSERT_TRUE(hub->find("r")->started());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto msgs = cs[i].peer->drain();
    int instructions = 0, snapshots = 0;
    bool started_state = false;
    for (const auto& m : msgs) {
      if (const auto* c = std::get_if<protocol::ChatRelay>(&m); c && c->player_name == "server") ++instructions;
      if (std::holds_alternative<protocol::Snapshot>(m)) ++snapshots;
      if (const auto* rs = std::get_if<protocol::RoomState>(&m); rs && rs->started) started_state = true;
    }
    EXPECT_GE(instructions, 5);
    EXPECT_EQ(snapshots, 1);
    EXPECT_TRUE(started_state);
  }
}

TEST_F(HubTest, PickAfterStartAndLateJoin) {
  auto cs = lobby("r", 2, true);
  cs[1].peer->drain();
  send(cs[1], protocol::SelectAvatar{Role::LawEnforcer});
  EXPECT_EQ(cs[1].peer->last_error(), ErrorCode::AlreadyStarted);
  Client late;
  send(late, protocol::JoinRoom{"r", "late"});
  EXPECT_EQ(late.peer->last_error(), ErrorCode::AlreadyStarted);
  send(cs[0], protocol::StartGame{});
  EXPECT_EQ(cs[0].peer->last_error(), ErrorCode::AlreadyStarted);
}

TEST_F(HubTest, MalformedFrameKeepsConnection) {
  auto cs = lobby("r", 1, true);
  cs[0].peer->drain();
  hub->on_frame(cs[0].link, "{\"v\":1,\"type\":\"input\",\"command\":{\"kind\":\"fly\"}}");
  EXPECT_EQ(cs[0].peer->last_error(), ErrorCode::SchemaViolation);
  hub->on_frame(cs[0].link, "{not json");
  EXPECT_EQ(cs[0].peer->last_error(), ErrorCode::MalformedInput);
  EXPECT_FALSE(cs[0].peer->closed);
  ASSERT_NE(cs[0].link.room, nullptr);
  send(cs[0], protocol::Input{sim::cmd::Move{1, 0}});
  EXPECT_EQ(cs[0].peer->last_error(), std::nullopt);
}

TEST_F(HubTest, ServerMessagesFromClientsAreRejected) {
  Client a;
  send(a, protocol::GameOver{true, "cleared", {}});
  EXPECT_EQ(a.peer->last_error(), ErrorCode::SchemaViolation);
  send(a, protocol::Input{sim::cmd::Idle{}});
  EXPECT_EQ(a.peer->last_error(), ErrorCode::NotInRoom);
}

TEST_F(HubTest, InputBeforeStartAndAbandonedRoomIsDropped) {
  auto cs = lobby("r", 1, false);
  cs[0].peer->drain();
  send(cs[0], protocol::Input{sim::cmd::Idle{}});
  EXPECT_EQ(cs[0].peer->last_error(), ErrorCode::NotRunning);

  send(cs[0], protocol::StartGame{});
  auto room = hub->find("r");
  const auto t0 = Clock::now();
  hub->on_close(cs[0].link, t0);
  hub->housekeeping(t0 + std::chrono::seconds(6));
  EXPECT_EQ(hub->room_count(), 0u);
  Client back;
  send(back, protocol::JoinRoom{"r", "p0"});
  EXPECT_EQ(back.peer->last_error(), ErrorCode::RoomNotFound);
}

TEST_F(HubTest, ChatIsRelayedToTheRoom) {
  auto cs = lobby("r", 2, false);
  cs[0].peer->drain();
  cs[1].peer->drain();
  send(cs[1], protocol::Chat{"hello there"});
  for (auto& c : cs) {
    const auto relays = c.peer->take<protocol::ChatRelay>();
    ASSERT_EQ(relays.size(), 1u);
    EXPECT_EQ(relays[0].player_name, "p1");
    EXPECT_EQ(relays[0].text, "hello there");
  }
}

TEST_F(HubTest, CreatorHandoffInLobby) {
  auto cs = lobby("r", 3, false);
  send(cs[0], protocol::LeaveRoom{});
  EXPECT_EQ(hub->find("r")->creator(), "p1");
  const auto states = cs[2].peer->take<protocol::RoomState>();
  ASSERT_FALSE(states.empty());
  ASSERT_EQ(states.back().members.size(), 2u);
  EXPECT_TRUE(states.back().members[0].is_creator);
  EXPECT_EQ(states.back().members[0].player_name, "p1");
  send(cs[1], protocol::LeaveRoom{});
  send(cs[2], protocol::LeaveRoom{});
  EXPECT_EQ(hub->room_count(), 0u);
}

TEST_F(HubTest, GraceExpiryEndsGameForEveryone) {
  auto cs = lobby("r", 3, true);
  for (auto& c : cs) c.peer->drain();
  const auto t0 = Clock::now();
  hub->on_close(cs[2].link, t0);
  auto room = hub->find("r");
  room->advance();
  hub->housekeeping(t0 + std::chrono::seconds(4));
  EXPECT_EQ(room->game()->phase, sim::Phase::Running);
  hub->housekeeping(t0 + std::chrono::seconds(5));
  EXPECT_EQ(room->game()->phase, sim::Phase::Lost);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto overs = cs[i].peer->take<protocol::GameOver>();
    ASSERT_EQ(overs.size(), 1u);
    EXPECT_FALSE(overs[0].won);
    EXPECT_EQ(overs[0].reason, "disconnect");
    EXPECT_EQ(overs[0].final_scores.size(), 3u);
  }
  EXPECT_FALSE(room->advance());
  send(cs[0], protocol::Input{sim::cmd::Idle{}});
  EXPECT_EQ(cs[0].peer->last_error(), ErrorCode::NotRunning);
}

TEST_F(HubTest, ReconnectWithinGrace) {
  auto cs = lobby("r", 2, true);
  const auto t0 = Clock::now();
  hub->on_close(cs[1].link, t0);
  auto room = hub->find("r");
  EXPECT_FALSE(room->game()->find_player("p1")->connected);
  for (auto& c : cs) c.peer->drain();

  Client back;
  send(back, protocol::JoinRoom{"r", "p1"}, t0 + std::chrono::seconds(2));
  EXPECT_EQ(back.peer->last_error(), std::nullopt);
  EXPECT_TRUE(room->game()->find_player("p1")->connected);
  hub->housekeeping(t0 + std::chrono::seconds(30));
  EXPECT_EQ(room->game()->phase, sim::Phase::Running);
  send(back, protocol::Input{sim::cmd::Move{0, 1}});
  EXPECT_EQ(back.peer->last_error(), std::nullopt);
  // An impostor cannot take over a connected slot.
  Client impostor;
  send(impostor, protocol::JoinRoom{"r", "p1"});
  EXPECT_EQ(impostor.peer->last_error(), ErrorCode::NameTaken);
}

TEST_F(HubTest, RoomsAreIsolated) {
  auto a = lobby("a", 2, true);
  auto b = lobby("b", 2, false);
  for (auto& c : b) c.peer->drain();
  send(a[0], protocol::Chat{"only for a"});
  hub->find("a")->advance();
  for (auto& c : b) EXPECT_TRUE(c.peer->drain().empty());
  EXPECT_FALSE(hub->find("b")->started());
  EXPECT_EQ(hub->room_count(), 2u);
}

TEST_F(HubTest, SnapshotsDifferOnlyInHint) {
  auto cs = lobby("r", 4, true);
  auto room = hub->find("r");
  for (int i = 0; i < 20; ++i) room->advance();
  std::vector<protocol::Snapshot> last;
  for (auto& c : cs) {
    const auto snaps = c.peer->take<protocol::Snapshot>();
    ASSERT_FALSE(snaps.empty());
    last.push_back(snaps.back());
  }
  for (auto& s : last) {
    EXPECT_EQ(s.tick, last[0].tick);
    EXPECT_TRUE(s.view.hint.has_value());
    s.view.hint.reset();
    EXPECT_EQ(s.view, last[0].view);
  }
}

TEST_F(HubTest, FreeRunningSnapshotCadence) {
  auto cs = lobby("r", 1, true);
  cs[0].peer->drain();
  auto room = hub->find("r");
  for (int i = 0; i < 20; ++i) room->advance();
  const auto snaps = cs[0].peer->take<protocol::Snapshot>();
  ASSERT_EQ(snaps.size(), 10u);
  EXPECT_EQ(snaps[0].tick, 2u);
}

TEST_F(HubTest, LockstepWaitsForEveryInputAndAppliesThemOnOneTick) {
  make_hub(true);
  auto cs = lobby("r", 2, true);
  auto room = hub->find("r");
  const auto before = *room->game();
  send(cs[0], protocol::Input{sim::cmd::Move{1, 0}});
  EXPECT_EQ(room->game()->tick, 0u);
  send(cs[1], protocol::Input{sim::cmd::Move{0, 1}});
  const auto after = *room->game();
  ASSERT_EQ(after.tick, 1u);
  EXPECT_GT(after.players[0].position.x, before.players[0].position.x);
  EXPECT_GT(after.players[1].position.y, before.players[1].position.y);
  EXPECT_EQ(after.players[0].position.y, before.players[0].position.y);
  const auto snaps = cs[1].peer->take<protocol::Snapshot>();
  ASSERT_FALSE(snaps.empty());
  EXPECT_EQ(snaps.back().tick, 1u);
}

TEST_F(HubTest, LockstepDisconnectDoesNotStall) {
  make_hub(true);
  auto cs = lobby("r", 2, true);
  auto room = hub->find("r");
  send(cs[0], protocol::Input{sim::cmd::Idle{}});
  hub->on_close(cs[1].link);
  EXPECT_EQ(room->game()->tick, 1u);
  send(cs[0], protocol::Input{sim::cmd::Idle{}});
  EXPECT_EQ(room->game()->tick, 2u);
}

TEST_F(HubTest, IdleLobbyIsClosed) {
  auto cs = lobby("r", 1, false);
  cs[0].peer->drain();
  hub->housekeeping(Clock::now() + std::chrono::seconds(61));
  EXPECT_EQ(cs[0].peer->last_error(), ErrorCode::RoomClosed);
  EXPECT_EQ(hub->room_count(), 0u);
  Client again;
  send(again, protocol::CreateRoom{"r", "x"});
  EXPECT_EQ(again.peer->last_error(), std::nullopt);
}

TEST_F(HubTest, SeedsAreAllocatedFromConfig) {
  auto a = lobby("a", 1, true);
  auto b = lobby("b", 1, true);
  EXPECT_EQ(hub->find("a")->game()->rng_seed, 42u);
  EXPECT_EQ(hub->find("b")->game()->rng_seed, 43u);
}

TEST(Endpoint, Parsing) {
  const auto a = parse_endpoint("0.0.0.0:8080");
  EXPECT_EQ(a.host, "0.0.0.0");
  EXPECT_EQ(a.port, 8080);
  EXPECT_EQ(parse_endpoint(":7070").port, 7070);
  EXPECT_EQ(parse_endpoint("9000").port, 9000);
  EXPECT_THROW(parse_endpoint("host:notaport"), std::invalid_argument);
}

TEST(Config, Validation) {
  ServerConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.snapshot_interval_ticks(), 2);
  c.lockstep = true;
  EXPECT_EQ(c.snapshot_interval_ticks(), 1);
  c.snapshot_rate = 40;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.snapshot_rate = 10;
  c.tick_rate = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
