#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "coopvax/maps/stage_io.hpp"
#include "coopvax/rng.hpp"
#include "coopvax/sim/game.hpp"
#include "coopvax/sim/serialize.hpp"
#include "fixtures.hpp"

using namespace coopvax;
using namespace coopvax::sim;
using coopvax::testing::bundled_campaign;
using coopvax::testing::roster_of;

namespace {

const std::vector<Role> kFour{Role::Citizen, Role::Doctor, Role::SanitationWorker, Role::LawEnforcer};

PlayerCommand random_command(Rng& rng, const GameState& s) {
  switch (rng.below(12)) {
    case 0:
      return cmd::Idle{};
    case 1:
      return cmd::Act{};
    case 2:
      return cmd::UseSanitizer{};
    case 3: {
      const auto& target = s.players[rng.below(s.players.size())].id;
      return cmd::ProposeTrade{target, static_cast<int>(rng.below(30)), std::nullopt};
    }
    case 4:
      return cmd::RespondTrade{rng.below(2) == 0};
    default:
      return cmd::Move{static_cast<int>(rng.below(3)) - 1, static_cast<int>(rng.below(3)) - 1};
  }
}

// A scripted command stream: the same script drives every replay.
struct Script {
  std::uint64_t seed;
  std::vector<PlayerCommand> next(const GameState& s) {
    std::vector<PlayerCommand> out;
    for (std::size_t i = 0; i < s.players.size(); ++i) out.push_back(random_command(rng, s));
    return out;
  }
  Rng rng{seed};
};

// At most three viruses per stage keeps random players alive long enough to
// replay a thousand ticks while viruses still move and crowds still spawn.
std::shared_ptr<const Campaign> long_campaign() {
  auto c = *bundled_campaign();
  for (auto& st : c) {
    st.map.viruses.resize(std::min<std::size_t>(st.map.viruses.size(), 3));
    st.goals[index_of(Role::SanitationWorker)] = std::min<int>(st.goals[index_of(Role::SanitationWorker)], 3);
  }
  return std::make_shared<const Campaign>(std::move(c));
}

struct Checker {
  std::vector<std::string> failures;

  void fail(std::string what) {
    if (failures.size() < 20) failures.push_back(std::move(what));
  }

  void bounds(const GameState& s) {
    const auto& m = s.stage().map;
    for (const auto& p : s.players) {
      if (p.health < 0.0 || p.health > 100.0) fail("health out of range for " + p.id);
      if (p.mask_meter < 0.0 || p.mask_meter > 100.0) fail("mask meter out of range for " + p.id);
      if (!s.walkable(cell_of(p.position))) fail("player off the walkable grid at tick " + std::to_string(s.tick));
      if (p.position.x < 0.0 || p.position.y < 0.0 || p.position.x >= m.width || p.position.y >= m.height)
        fail("player outside grid");
    }
    for (const auto& v : s.viruses)
      if (v.alive && !s.walkable(cell_of(v.position))) fail("virus inside a wall at tick " + std::to_string(s.tick));
  }

  void conservation(const GameState& s) {
    for (auto k : kAllPickupKinds) {
      const auto remaining = std::count_if(s.remaining_pickups.begin(), s.remaining_pickups.end(),
                                           [&](const auto& p) { return p.kind == k; });
      if (s.placed_total[index_of(k)] != s.collected_total[index_of(k)] + remaining)
        fail("pickup conservation broken for " + std::string(to_string(k)) + " at tick " + std::to_string(s.tick));
    }
  }

  void roles_unique(const GameState& s) {
    std::set<Role> roles;
    for (const auto& p : s.players) roles.insert(p.role);
    if (roles.size() != s.players.size()) fail("duplicate role at tick " + std::to_string(s.tick));
  }

  // `before` is the state entering the tick, `after` the state leaving it.
  void shields(const GameState& before, const GameState& after, const std::vector<GameEvent>& events) {
    for (const auto& e : events) {
      const auto* hit = std::get_if<ev::PlayerInfected>(&e);
      if (!hit) continue;
      const auto* p0 = before.find_player(hit->player);
      const auto* p1 = after.find_player(hit->player);
      if (p0->shield_ticks > 0 || p0->mask_meter > 0.0) fail("infected while shielded entering tick " + std::to_string(after.tick));
      if (p1->shield_ticks > 0) fail("infected during a tick that ends shielded " + std::to_string(after.tick));
    }
  }

  void loss(const GameState& s, const std::vector<GameEvent>& events) {
    if (s.phase != Phase::Lost) return;
    const auto* lost = coopvax::testing::first_event<ev::GameLost>(events);
    if (!lost) return fail("Lost without GameLost");
    if (lost->reason == LossReason::Disconnect) return;
    const auto* p = s.find_player(lost->player);
    bool infected = false;
    for (const auto& e : events)
      if (const auto* h = std::get_if<ev::PlayerInfected>(&e)) infected |= h->player == lost->player && h->health == 0.0;
    if (!p || p->health != 0.0 || !infected) fail("Lost without a player reaching zero health");
  }
};

std::uint64_t run_script(std::shared_ptr<const Campaign> campaign, std::uint64_t seed, std::uint64_t ticks,
                         Checker* check, std::vector<std::string>* trace) {
  auto s = new_game(campaign, roster_of(kFour), seed);
  Script script{seed * 31 + 7};
  while (s.phase == Phase::Running && s.tick < ticks) {
    const auto cmds = script.next(s);
    for (std::size_t i = 0; i < s.players.size(); ++i) queue_command(s, s.players[i].id, cmds[i]);
    const auto before = check ? std::optional<GameState>(s) : std::nullopt;
    const auto events = tick(s);
    if (check) {
      check->bounds(s);
      check->conservation(s);
      check->roles_unique(s);
      check->shields(*before, s, events);
      check->loss(s, events);
    }
    if (trace) trace->push_back(serialize_state(s));
  }
  return s.tick;
}

}  // namespace

TEST(Property, ReplayIsBitIdentical) {
  const auto campaign = long_campaign();
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    std::vector<std::string> a, b;
    const auto ticks = run_script(campaign, seed, 1200, nullptr, &a);
    run_script(campaign, seed, 1200, nullptr, &b);
    EXPECT_GE(ticks, 1000u) << "script " << seed << " ended early";
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << "seed " << seed << " tick " << i + 1;
  }
}

TEST(Property, DifferentSeedsDiverge) {
  std::vector<std::string> a, b;
  run_script(long_campaign(), 1, 200, nullptr, &a);
  run_script(long_campaign(), 2, 200, nullptr, &b);
  EXPECT_NE(a.back(), b.back());
}

TEST(Property, InvariantsHoldUnderRandomPlay) {
  Checker check;
  for (std::uint64_t seed = 100; seed < 130; ++seed) run_script(bundled_campaign(), seed, 3000, &check, nullptr);
  for (std::uint64_t seed = 200; seed < 210; ++seed) run_script(long_campaign(), seed, 3000, &check, nullptr);
  for (const auto& f : check.failures) ADD_FAILURE() << f;
}

TEST(Property, LossIsAlwaysCollective) {
  int losses = 0;
  for (std::uint64_t seed = 300; seed < 340; ++seed) {
    auto s = new_game(bundled_campaign(), roster_of(kFour), seed);
    Script script{seed};
    std::vector<GameEvent> last;
    while (s.phase == Phase::Running && s.tick < 4000) {
      const auto cmds = script.next(s);
      for (std::size_t i = 0; i < s.players.size(); ++i) queue_command(s, s.players[i].id, cmds[i]);
      last = tick(s);
    }
    if (s.phase != Phase::Lost) continue;
    ++losses;
    const auto* lost = coopvax::testing::first_event<ev::GameLost>(last);
    ASSERT_NE(lost, nullptr);
    EXPECT_EQ(s.find_player(lost->player)->health, 0.0);
    for (const auto& p : s.players) EXPECT_THROW(queue_command(s, p.id, cmd::Idle{}), SimError);
  }
  EXPECT_GT(losses, 0);
}

TEST(Property, SpeedMonotoneInHealth) {
  for (int a = 0; a <= 10000; ++a) {
    const double h = a / 100.0;
    const double m = speed_multiplier(h);
    ASSERT_GE(m, 0.5);
    ASSERT_LE(m, 1.0);
    if (a > 0) {
      ASSERT_GE(m, speed_multiplier((a - 1) / 100.0)) << h;
    }
  }
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    double x = rng.unit() * 100.0, y = rng.unit() * 100.0;
    if (x < y) std::swap(x, y);
    ASSERT_GE(speed_multiplier(x), speed_multiplier(y));
  }
}

TEST(Property, TradeSequencesPreserveRoleUniqueness) {
  auto base_stage = coopvax::testing::blank_stage();
  base_stage.goals = {0, 0, 0, 0};
  auto start = new_game(Campaign{base_stage}, roster_of(kFour), 1);
  for (auto& p : start.players) p.score = 100;

  struct Step {
    std::size_t from, to;
    bool accept;
  };
  std::vector<Step> steps;
  for (std::size_t f = 0; f < 4; ++f)
    for (std::size_t t = 0; t < 4; ++t)
      if (f != t)
        for (bool a : {false, true}) steps.push_back({f, t, a});

  std::size_t sequences = 0;
  const auto apply = [&](GameState& s, const Step& step) {
    const TradeOffer offer{s.players[step.from].id, s.players[step.to].id, 10, s.tick + 200};
    s.pending_trade = offer;
    resolve_trade(s, offer, step.accept);
    std::set<Role> roles;
    int total = 0;
    for (const auto& p : s.players) {
      roles.insert(p.role);
      total += p.score;
    }
    EXPECT_EQ(roles.size(), 4u);
    EXPECT_EQ(total, 400);
    EXPECT_FALSE(s.pending_trade);
  };
  for (const auto& a : steps) {
    auto s1 = start;
    apply(s1, a);
    ++sequences;
    for (const auto& b : steps) {
      auto s2 = s1;
      apply(s2, b);
      ++sequences;
      for (const auto& c : steps) {
        auto s3 = s2;
        apply(s3, c);
        ++sequences;
      }
    }
  }
  EXPECT_EQ(sequences, 24u + 24u * 24u + 24u * 24u * 24u);
}

TEST(Property, BundledStagesStrictlyHarder) {
  const auto& c = *bundled_campaign();
  ASSERT_EQ(c.size(), 4u);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_GT(c[i].strain_level, c[i - 1].strain_level);
    EXPECT_GT(c[i].vaccine_target, c[i - 1].vaccine_target);
  }
}
