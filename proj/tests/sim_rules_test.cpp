#include <gtest/gtest.h>

#include <cmath>

#include "coopvax/sim/game.hpp"
#include "coopvax/sim/rules.hpp"
#include "fixtures.hpp"

using namespace coopvax;
using namespace coopvax::sim;
using coopvax::testing::blank_stage;
using coopvax::testing::count_events;
using coopvax::testing::first_event;
using coopvax::testing::roster_of;

namespace {

GameState solo(StageSpec stage, Role role, std::uint64_t seed = 1) {
  const RosterEntry r{"p0", role};
  return new_game(Campaign{std::move(stage)}, std::span(&r, 1), seed);
}

// Keeps a one-player stage from clearing: the player's own goal is unreachable by standing still.
StageSpec idle_stage() {
  auto s = blank_stage();
  s.goals = {0, 1, 0, 0};
  s.map.civilians = {{9, 9}};
  return s;
}

}  // namespace

TEST(NewGame, FourDistinctRolesOnDistinctSpawns) {
  const auto campaign = coopvax::testing::bundled_campaign();
  const auto roster = roster_of({Role::Citizen, Role::Doctor, Role::SanitationWorker, Role::LawEnforcer});
  const auto s = new_game(campaign, roster, 42);
  EXPECT_EQ(s.phase, Phase::Running);
  EXPECT_EQ(s.tick, 0u);
  EXPECT_EQ(s.team_vaccines, 0);
  ASSERT_EQ(s.players.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(s.players[i].position, center_of(s.stage().map.spawns[i]));
    for (std::size_t j = i + 1; j < 4; ++j) EXPECT_NE(s.players[i].position, s.players[j].position);
  }
}

TEST(NewGame, MissingRolesHaveWaivedGoals) {
  auto s = new_game(coopvax::testing::bundled_campaign(), roster_of({Role::Citizen, Role::Doctor}), 1);
  EXPECT_FALSE(s.waived[index_of(Role::Citizen)]);
  EXPECT_FALSE(s.waived[index_of(Role::Doctor)]);
  EXPECT_TRUE(s.waived[index_of(Role::SanitationWorker)]);
  EXPECT_TRUE(s.waived[index_of(Role::LawEnforcer)]);
  EXPECT_EQ(s.stage().vaccine_target, 2);

  // Enumerate goal/vaccine combinations: clear iff vaccines and both held goals are met.
  const auto& st = s.stage();
  for (int v = 0; v <= st.vaccine_target; ++v)
    for (int g = 0; g <= st.goal_for(Role::Citizen); ++g)
      for (int t = 0; t <= st.goal_for(Role::Doctor); ++t) {
        s.team_vaccines = v;
        s.players[0].goal_progress = g;
        s.players[1].goal_progress = t;
        const bool expect = v >= st.vaccine_target && g >= st.goal_for(Role::Citizen) && t >= st.goal_for(Role::Doctor);
        EXPECT_EQ(check_stage_clear(s), expect) << v << ' ' << g << ' ' << t;
      }
}

TEST(NewGame, RosterErrors) {
  const auto c = coopvax::testing::bundled_campaign();
  const auto code = [&](const std::vector<RosterEntry>& r) {
    try {
      new_game(c, r, 1);
    } catch (const SimError& e) {
      return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return SimErrc::InvalidTrade;
  };
  EXPECT_EQ(code(roster_of({Role::Doctor, Role::Doctor})), SimErrc::DuplicateRole);
  EXPECT_EQ(code({}), SimErrc::EmptyRoster);
  EXPECT_EQ(code({{"a", Role::Citizen}, {"b", Role::Doctor}, {"c", Role::LawEnforcer}, {"d", Role::SanitationWorker},
                  {"e", Role::Citizen}}),
            SimErrc::RosterTooLarge);

  auto st = blank_stage();
  st.goals = {3, 0, 0, 0};
  st.map.pickups.push_back({PickupKind::Grocery, {5, 5}});
  try {
    solo(st, Role::Citizen);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), SimErrc::UnachievableGoals);
  }
}

TEST(QueueCommand, LaterCommandOverwritesEarlier) {
  auto s = solo(idle_stage(), Role::Citizen);
  const auto start = s.players[0].position;
  queue_command(s, "p0", cmd::Move{1, 0});
  queue_command(s, "p0", cmd::Move{0, 1});
  tick(s);
  EXPECT_DOUBLE_EQ(s.players[0].position.x, start.x);
  EXPECT_DOUBLE_EQ(s.players[0].position.y, start.y + rules::kPlayerSpeedPerTick);
}

TEST(QueueCommand, UnknownPlayerAndNotRunning) {
  auto s = solo(idle_stage(), Role::Citizen);
  try {
    queue_command(s, "nobody", cmd::Idle{});
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), SimErrc::UnknownPlayer);
  }
  s.phase = Phase::Lost;
  try {
    queue_command(s, "p0", cmd::Idle{});
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), SimErrc::NotRunning);
  }
  EXPECT_THROW(tick(s), SimError);
}

TEST(QueueCommand, DoctorActNextToCivilianTreatsOnNextTick) {
  auto st = blank_stage();
  st.goals = {0, 2, 0, 0};
  st.map.civilians = {{2, 1}, {8, 8}};
  auto s = solo(st, Role::Doctor);
  queue_command(s, "p0", cmd::Act{});
  const auto events = tick(s);
  const auto* treated = first_event<ev::CivilianTreated>(events);
  ASSERT_NE(treated, nullptr);
  EXPECT_EQ(treated->cell, (Cell{2, 1}));
  EXPECT_EQ(s.players[0].ammo, rules::kStartingAmmo - 1);
  EXPECT_EQ(s.players[0].goal_progress, 1);
}

TEST(Tick, CitizenOnGroceryCollectsIt) {
  auto st = idle_stage();
  st.goals = {1, 1, 0, 0};
  st.map.pickups.push_back({PickupKind::Grocery, {1, 1}});
  st.map.pickups.push_back({PickupKind::Grocery, {6, 6}});
  auto s = solo(st, Role::Citizen);
  const auto events = tick(s);
  const auto* got = first_event<ev::PickupCollected>(events);
  ASSERT_NE(got, nullptr);
  EXPECT_EQ(got->kind, PickupKind::Grocery);
  EXPECT_EQ(s.players[0].goal_progress, 1);
  EXPECT_EQ(s.players[0].score, 10);
}

TEST(Tick, ContactWithStrainOneVirusDealsFive) {
  auto st = idle_stage();
  st.map.viruses = {{{1, 1}, 1}};
  auto s = solo(st, Role::Citizen);
  const auto events = tick(s);
  const auto* hit = first_event<ev::PlayerInfected>(events);
  ASSERT_NE(hit, nullptr);
  EXPECT_EQ(hit->damage, 5.0);
  EXPECT_EQ(s.players[0].health, 95.0);

  // Cooldown: the same virus cannot hit again for one second.
  for (int i = 1; i < rules::kTickRate; ++i) EXPECT_EQ(count_events<ev::PlayerInfected>(tick(s)), 0u) << i;
  EXPECT_EQ(count_events<ev::PlayerInfected>(tick(s)), 1u);
  EXPECT_EQ(s.players[0].health, 90.0);
}

TEST(Tick, ZeroHealthLosesForEveryone) {
  auto st = idle_stage();
  st.map.viruses = {{{1, 1}, 4}};
  const auto roster = roster_of({Role::Doctor, Role::Citizen});
  auto s = new_game(Campaign{st}, roster, 3);
  s.players[0].health = 20.0;
  const auto events = tick(s);
  EXPECT_EQ(s.phase, Phase::Lost);
  const auto* lost = first_event<ev::GameLost>(events);
  ASSERT_NE(lost, nullptr);
  EXPECT_EQ(lost->player, "p0");
  EXPECT_THROW(queue_command(s, "p1", cmd::Idle{}), SimError);
}

TEST(SpeedMultiplier, Examples) {
  EXPECT_EQ(speed_multiplier(100.0), 1.0);
  EXPECT_EQ(speed_multiplier(0.0), 0.5);
  EXPECT_EQ(speed_multiplier(50.0), 0.75);
}

TEST(VirusStep, ChasesNearestPlayer) {
  auto st = idle_stage();
  st.map.viruses = {{{1, 4}, 1}};
  auto s = solo(st, Role::Citizen);
  const auto before = s.viruses[0].position;
  const auto rng_before = s.rng;
  const auto after = virus_step(s, s.viruses[0]);
  const Vec2 to_player{s.players[0].position.x - before.x, s.players[0].position.y - before.y};
  const Vec2 moved{after.x - before.x, after.y - before.y};
  EXPECT_NEAR(moved.x * to_player.y - moved.y * to_player.x, 0.0, 1e-12);
  EXPECT_GT(moved.x * to_player.x + moved.y * to_player.y, 0.0);
  EXPECT_EQ(s.rng, rng_before);
}

TEST(VirusStep, WandersFromRngWhenAlone) {
  auto st = blank_stage(30, 30);
  st.goals = {0, 1, 0, 0};
  st.map.civilians = {{29, 29}};
  st.map.viruses = {{{20, 20}, 1}};
  auto a = solo(st, Role::Citizen, 5);
  auto b = solo(st, Role::Citizen, 5);
  for (int i = 0; i < 50; ++i) {
    const auto pa = virus_step(a, a.viruses[0]);
    const auto pb = virus_step(b, b.viruses[0]);
    EXPECT_EQ(pa, pb);
    a.viruses[0].position = pa;
    b.viruses[0].position = pb;
  }
  EXPECT_NE(a.viruses[0].position, center_of({20, 20}));
}

TEST(VirusStep, StrainThreeStepsTwelveTenths) {
  EXPECT_DOUBLE_EQ(virus_step_length(3) / virus_step_length(1), 1.2);
}

TEST(VirusStep, NeverEntersWall) {
  auto st = idle_stage();
  st.map.walls = {{1, 3}, {2, 3}, {0, 3}};
  st.map.viruses = {{{1, 4}, 4}};
  auto s = solo(st, Role::Citizen);
  for (int i = 0; i < 200; ++i) {
    s.viruses[0].position = virus_step(s, s.viruses[0]);
    EXPECT_TRUE(s.walkable(cell_of(s.viruses[0].position)));
  }
}

TEST(RoleAction, DoctorSpendsAmmo) {
  auto st = blank_stage();
  st.goals = {0, 1, 0, 0};
  st.map.civilians = {{1, 2}};
  auto s = solo(st, Role::Doctor);
  s.players[0].ammo = 3;
  const auto events = apply_role_action(s, "p0");
  EXPECT_EQ(s.players[0].ammo, 2);
  EXPECT_EQ(count_events<ev::CivilianTreated>(events), 1u);
}

TEST(RoleAction, SanitationAreaEffect) {
  auto st = idle_stage();
  st.goals = {0, 1, 2, 0};
  st.map.viruses = {{{2, 1}, 1}, {{1, 2}, 1}, {{7, 7}, 1}};
  auto s = solo(st, Role::SanitationWorker);
  s.players[0].ammo = 1;
  const auto events = apply_role_action(s, "p0");
  EXPECT_EQ(count_events<ev::VirusKilled>(events), 2u);
  EXPECT_EQ(s.players[0].ammo, 0);
  EXPECT_EQ(s.players[0].goal_progress, 2);
  EXPECT_EQ(s.players[0].score, 20);
  const auto again = apply_role_action(s, "p0");
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(std::get<ev::ActionFailed>(again[0]).reason, FailReason::NoAmmo);
}

TEST(RoleAction, EnforcerWithoutCrowdIsNoTarget) {
  auto st = idle_stage();
  st.goals = {0, 1, 0, 1};
  st.map.crowds = {{8, 8}};
  auto s = solo(st, Role::LawEnforcer);
  const auto before = s;
  const auto events = apply_role_action(s, "p0");
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(std::get<ev::ActionFailed>(events[0]).reason, FailReason::NoTarget);
  EXPECT_EQ(s.players, before.players);
  EXPECT_EQ(s.crowds, before.crowds);
}

TEST(VaccineHint, AxisAlignedNearestAndAbsent) {
  auto st = idle_stage();
  st.map.pickups = {{PickupKind::VaccinePart, {5, 1}}};
  auto s = solo(st, Role::Citizen);
  auto h = vaccine_direction_hint(s, "p0");
  ASSERT_TRUE(h);
  EXPECT_EQ(*h, (Vec2{1.0, 0.0}));

  st.map.pickups = {{PickupKind::VaccinePart, {1, 6}}, {PickupKind::VaccinePart, {3, 1}}};
  s = solo(st, Role::Citizen);
  h = vaccine_direction_hint(s, "p0");
  ASSERT_TRUE(h);
  EXPECT_EQ(*h, (Vec2{1.0, 0.0}));

  s.remaining_pickups.clear();
  EXPECT_FALSE(vaccine_direction_hint(s, "p0"));
  EXPECT_THROW(vaccine_direction_hint(s, "ghost"), SimError);
}

namespace {

GameState trading_pair() {
  auto st = idle_stage();
  return new_game(Campaign{st}, roster_of({Role::Doctor, Role::Citizen}), 9);
}

}  // namespace

TEST(Trade, AcceptedSwapsRolesAndMovesPoints) {
  auto s = trading_pair();
  s.players[0].score = 50;
  s.players[1].score = 10;
  s.players[0].ammo = 4;
  s.players[1].goal_progress = 2;
  queue_command(s, "p0", cmd::ProposeTrade{"p1", 20, std::nullopt});
  tick(s);
  ASSERT_TRUE(s.pending_trade);
  queue_command(s, "p1", cmd::RespondTrade{true});
  const auto events = tick(s);
  EXPECT_EQ(count_events<ev::TradeCompleted>(events), 1u);
  EXPECT_EQ(s.players[0].role, Role::Citizen);
  EXPECT_EQ(s.players[1].role, Role::Doctor);
  EXPECT_EQ(s.players[0].score, 30);
  EXPECT_EQ(s.players[1].score, 30);
  EXPECT_EQ(s.players[0].ammo, 0);
  EXPECT_EQ(s.players[1].ammo, 4);
  EXPECT_EQ(s.players[0].goal_progress, 2);
  EXPECT_FALSE(s.pending_trade);
}

TEST(Trade, DeclinedLeavesStateExceptOffer) {
  auto s = trading_pair();
  s.players[0].score = 50;
  queue_command(s, "p0", cmd::ProposeTrade{"p1", 20, std::nullopt});
  tick(s);
  const auto players = s.players;
  queue_command(s, "p1", cmd::RespondTrade{false});
  const auto events = tick(s);
  EXPECT_EQ(count_events<ev::TradeCancelled>(events), 1u);
  EXPECT_EQ(s.players, players);
  EXPECT_FALSE(s.pending_trade);
}

TEST(Trade, OverdrawnOfferRejectedAtProposal) {
  auto s = trading_pair();
  s.players[0].score = 50;
  queue_command(s, "p0", cmd::ProposeTrade{"p1", 60, std::nullopt});
  const auto events = tick(s);
  ASSERT_EQ(count_events<ev::ActionFailed>(events), 1u);
  EXPECT_EQ(first_event<ev::ActionFailed>(events)->reason, FailReason::InsufficientPoints);
  EXPECT_FALSE(s.pending_trade);
}

TEST(Trade, ExpiresAfterTtl) {
  auto s = trading_pair();
  s.players[0].score = 50;
  queue_command(s, "p0", cmd::ProposeTrade{"p1", 5, std::nullopt});
  tick(s);
  const auto offer = *s.pending_trade;
  bool expired = false;
  for (std::uint64_t i = 0; i <= rules::kTradeTtlTicks && !expired; ++i) {
    for (const auto& e : tick(s))
      if (const auto* c = std::get_if<ev::TradeCancelled>(&e)) expired = c->expired;
  }
  EXPECT_TRUE(expired);
  EXPECT_GT(s.tick, offer.expires_at_tick);
  s.pending_trade = offer;
  try {
    resolve_trade(s, offer, true);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), SimErrc::TradeExpired);
  }
  EXPECT_THROW(resolve_trade(s, offer, true), SimError);
}

TEST(Trade, SoloSelfSwapCostsFlatFee) {
  auto s = solo(idle_stage(), Role::Doctor);
  s.players[0].score = 25;
  queue_command(s, "p0", cmd::ProposeTrade{"p0", 0, Role::LawEnforcer});
  tick(s);
  EXPECT_EQ(s.players[0].role, Role::LawEnforcer);
  EXPECT_EQ(s.players[0].score, 5);
  EXPECT_TRUE(s.waived[index_of(Role::Doctor)]);
  EXPECT_FALSE(s.waived[index_of(Role::LawEnforcer)]);
}

TEST(StageClear, LastStageWins) {
  auto st = blank_stage();
  st.vaccine_target = 1;
  st.map.pickups = {{PickupKind::VaccinePart, {1, 1}}};
  auto s = solo(st, Role::Citizen);
  const auto events = tick(s);
  EXPECT_EQ(count_events<ev::StageCleared>(events), 1u);
  EXPECT_EQ(count_events<ev::GameWon>(events), 1u);
  EXPECT_EQ(s.phase, Phase::Won);
}

TEST(StageClear, PersonalGoalsBlockCollectiveProgress) {
  auto s = new_game(coopvax::testing::bundled_campaign(),
                    roster_of({Role::Citizen, Role::Doctor, Role::SanitationWorker, Role::LawEnforcer}), 4);
  s.team_vaccines = s.stage().vaccine_target;
  for (auto& p : s.players) p.goal_progress = s.stage().goal_for(p.role);
  EXPECT_TRUE(check_stage_clear(s));
  s.players[0].goal_progress = s.stage().goal_for(Role::Citizen) - 2;
  EXPECT_FALSE(check_stage_clear(s));
}

TEST(StageClear, VaccinationHalvesOlderStrainsOnly) {
  auto one = blank_stage(10, 10, 1);
  one.map.pickups = {{PickupKind::VaccinePart, {1, 1}}};
  auto two = blank_stage(10, 10, 2);
  two.goals = {0, 1, 0, 0};
  two.map.civilians = {{9, 9}};
  two.map.viruses = {{{1, 1}, 1}, {{1, 1}, 2}};
  auto s = new_game(Campaign{one, two}, std::vector<RosterEntry>{{"p0", Role::Citizen}}, 1);
  const auto first = tick(s);
  EXPECT_EQ(count_events<ev::StageCleared>(first), 1u);
  EXPECT_EQ(s.stage().stage_index, 2);
  EXPECT_EQ(s.vaccinated_through, 1);
  const auto hits = tick(s);
  ASSERT_EQ(count_events<ev::PlayerInfected>(hits), 2u);
  std::map<std::uint32_t, double> by_virus;
  for (const auto& e : hits)
    if (const auto* h = std::get_if<ev::PlayerInfected>(&e)) by_virus[h->virus_id] = h->damage;
  EXPECT_EQ(by_virus[s.viruses[0].id], 2.5);
  EXPECT_EQ(by_virus[s.viruses[1].id], 10.0);
}

TEST(Shield, MaskAndSanitizerBlockContact) {
  auto st = idle_stage();
  st.map.pickups.push_back({PickupKind::Mask, {1, 1}});
  st.map.pickups.push_back({PickupKind::Sanitizer, {2, 1}});
  auto s = solo(st, Role::Citizen);
  tick(s);
  EXPECT_EQ(s.players[0].mask_meter, rules::kMaskMeterFull);
  EXPECT_EQ(s.players[0].score, 5);
  s.viruses.push_back({99, s.players[0].position, 1, true});
  for (int i = 0; i < 100; ++i) ASSERT_EQ(count_events<ev::PlayerInfected>(tick(s)), 0u) << i;
  // 100 meter at 0.5 per tick: exactly 200 ticks of cover
  for (int i = 0; i < 100; ++i) ASSERT_EQ(count_events<ev::PlayerInfected>(tick(s)), 0u) << i;
  EXPECT_EQ(s.players[0].mask_meter, 0.0);
  EXPECT_EQ(count_events<ev::PlayerInfected>(tick(s)), 1u);

  s.players[0].sanitizer_count = 1;
  s.players[0].health = 100.0;
  queue_command(s, "p0", cmd::UseSanitizer{});
  EXPECT_EQ(count_events<ev::SanitizerUsed>(tick(s)), 1u);
  EXPECT_EQ(s.players[0].shield_ticks, rules::kSanitizerShieldTicks - 1);
  queue_command(s, "p0", cmd::UseSanitizer{});
  const auto failed = tick(s);
  ASSERT_NE(first_event<ev::ActionFailed>(failed), nullptr);
  EXPECT_EQ(first_event<ev::ActionFailed>(failed)->reason, FailReason::NoSanitizer);
}

TEST(Healing, CampAndVitamin) {
  auto st = idle_stage();
  st.map.camps = {{2, 2}};
  st.map.pickups.push_back({PickupKind::HealthVitamin, {1, 1}});
  auto s = solo(st, Role::Citizen);
  s.players[0].health = 50.0;
  tick(s);
  EXPECT_EQ(s.players[0].health, 50.0 + rules::kCampHealPerTick + rules::kVitaminHeal);
}

TEST(Crowds, SpawnEveryFifteenSecondsUntilDispersed) {
  auto st = blank_stage(30, 30);
  st.strain_level = 2;
  st.goals = {0, 1, 0, 1};
  st.map.civilians = {{29, 0}};
  st.map.crowds = {{28, 28}};
  auto s = solo(st, Role::Citizen);
  std::size_t spawned = 0;
  for (std::uint64_t t = 1; t <= 2 * rules::kCrowdSpawnPeriodTicks; ++t) {
    const auto events = tick(s);
    const auto n = count_events<ev::VirusSpawned>(events);
    EXPECT_EQ(n, t % rules::kCrowdSpawnPeriodTicks == 0 ? 1u : 0u);
    if (n) {
      EXPECT_EQ(first_event<ev::VirusSpawned>(events)->strain, 2);
    }
    spawned += n;
  }
  EXPECT_EQ(spawned, 2u);
  s.crowds[0].dispersed = true;
  for (std::uint64_t t = 0; t < rules::kCrowdSpawnPeriodTicks; ++t) EXPECT_EQ(count_events<ev::VirusSpawned>(tick(s)), 0u);
}

TEST(Disconnect, ForfeitLosesWithDisconnectReason) {
  auto s = trading_pair();
  const auto ev1 = set_connected(s, "p1", false);
  EXPECT_EQ(count_events<ev::ConnectionChanged>(ev1), 1u);
  EXPECT_FALSE(s.players[1].connected);
  const auto ev2 = forfeit(s, "p1");
  EXPECT_EQ(s.phase, Phase::Lost);
  EXPECT_EQ(s.loss_reason, LossReason::Disconnect);
  EXPECT_EQ(std::get<ev::GameLost>(ev2.at(0)).reason, LossReason::Disconnect);
}
