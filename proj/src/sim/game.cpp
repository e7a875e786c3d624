#include "coopvax/sim/game.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "coopvax/sim/rules.hpp"

namespace coopvax::sim {

using namespace rules;

namespace {

[[noreturn]] void fail(SimErrc code, const std::string& what) { throw SimError(code, what); }

int default_ammo(Role r) { return (r == Role::Doctor || r == Role::SanitationWorker) ? kStartingAmmo : 0; }

void require_running(const GameState& s) {
  if (s.phase != Phase::Running) fail(SimErrc::NotRunning, "game is not running");
}

PlayerState& require_player(GameState& s, const PlayerId& id) {
  auto* p = s.find_player(id);
  if (!p) fail(SimErrc::UnknownPlayer, "unknown player '" + id + "'");
  return *p;
}

void check_achievable(const StageSpec& st) {
  const auto& m = st.map;
  const auto fail_goal = [&](const char* what) {
    fail(SimErrc::UnachievableGoals, "stage " + std::to_string(st.stage_index) + ": " + what + " target exceeds map supply");
  };
  if (st.vaccine_target > m.count_pickups(PickupKind::VaccinePart)) fail_goal("vaccine");
  if (st.goal_for(Role::Citizen) > m.count_pickups(PickupKind::Grocery)) fail_goal("grocery");
  if (st.goal_for(Role::Doctor) > static_cast<int>(m.civilians.size())) fail_goal("treat");
  if (st.goal_for(Role::SanitationWorker) > static_cast<int>(m.viruses.size())) fail_goal("disinfect");
  if (st.goal_for(Role::LawEnforcer) > static_cast<int>(m.crowds.size())) fail_goal("crowd");
}

void load_stage(GameState& s) {
  const auto& st = s.stage();
  const auto& m = st.map;
  s.blocked.assign(static_cast<std::size_t>(m.width) * m.height, 0);
  for (const auto& w : m.walls)
    if (m.in_bounds(w)) s.blocked[static_cast<std::size_t>(w.y) * m.width + w.x] = 1;

  s.stage_tick = 0;
  s.viruses.clear();
  for (const auto& v : m.viruses) s.viruses.push_back({s.next_virus_id++, center_of(v.cell), v.strain, true});
  s.civilians.clear();
  for (const auto& c : m.civilians) s.civilians.push_back({c, false});
  s.crowds.clear();
  for (const auto& c : m.crowds) s.crowds.push_back({c, false});
  s.remaining_pickups = m.pickups;
  for (const auto& p : m.pickups) ++s.placed_total[index_of(p.kind)];

  s.team_vaccines = 0;
  s.contact_ready_at.clear();
  s.pending_trade.reset();
  s.queued.clear();

  for (std::size_t i = 0; i < s.players.size(); ++i) {
    auto& p = s.players[i];
    p.position = center_of(m.spawns[i]);
    p.health = kMaxHealth;
    p.mask_meter = 0.0;
    p.shield_ticks = 0;
    p.ammo = default_ammo(p.role);
    p.goal_progress = 0;
  }
}

Vec2 slide(const GameState& s, Vec2 from, Vec2 delta) {
  const Vec2 full{from.x + delta.x, from.y + delta.y};
  if (s.walkable(cell_of(full))) return full;
  const Vec2 x_only{from.x + delta.x, from.y};
  if (delta.x != 0.0 && s.walkable(cell_of(x_only))) return x_only;
  const Vec2 y_only{from.x, from.y + delta.y};
  if (delta.y != 0.0 && s.walkable(cell_of(y_only))) return y_only;
  return from;
}

Vec2 unit_direction(int dx, int dy) {
  const double len = (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
  return {dx / len, dy / len};
}

int sign(int v) { return (v > 0) - (v < 0); }

double contact_damage(const GameState& s, int strain) {
  const double base = kDamagePerStrain * strain;
  return strain <= s.vaccinated_through ? base / 2.0 : base;
}

bool near_camp(const GameState& s, Vec2 pos) {
  const Cell c = cell_of(pos);
  for (const auto& camp : s.stage().map.camps)
    if (std::abs(camp.x - c.x) <= kCampReach && std::abs(camp.y - c.y) <= kCampReach) return true;
  return false;
}

void collect(GameState& s, PlayerState& p, const PickupPlacement& pick, std::vector<GameEvent>& events) {
  ++s.collected_total[index_of(pick.kind)];
  events.push_back(ev::PickupCollected{p.id, pick.kind, pick.cell});
  switch (pick.kind) {
    case PickupKind::Grocery:
      ++p.goal_progress;
      p.score += kGoalActionPoints;
      break;
    case PickupKind::MedicineRefill:
    case PickupKind::DisinfectantRefill:
      p.ammo += kRefillAmmo;
      p.score += kRefillPoints;
      break;
    case PickupKind::HealthVitamin: {
      const double before = p.health;
      p.health = std::min(kMaxHealth, p.health + kVitaminHeal);
      if (p.health > before) events.push_back(ev::PlayerHealed{p.id, p.health - before, HealSource::Vitamin});
      break;
    }
    case PickupKind::VaccinePart:
      ++s.team_vaccines;
      ++s.vaccines_total;
      p.score += kVaccinePoints;
      break;
    case PickupKind::Mask:
      p.mask_meter = kMaskMeterFull;
      p.score += kProtectionPickupPoints;
      break;
    case PickupKind::Sanitizer:
      ++p.sanitizer_count;
      p.score += kProtectionPickupPoints;
      break;
  }
}

void cancel_trade(GameState& s, bool expired, std::vector<GameEvent>& events) {
  if (!s.pending_trade) return;
  events.push_back(ev::TradeCancelled{s.pending_trade->from, s.pending_trade->to, expired});
  s.pending_trade.reset();
}

void handle_proposal(GameState& s, PlayerState& p, const cmd::ProposeTrade& offer, std::vector<GameEvent>& events) {
  const auto failed = [&](FailReason r) { events.push_back(ev::ActionFailed{p.id, r}); };

  if (offer.target == p.id) {
    // One-player role change: no counterparty, flat cost.
    if (s.players.size() != 1 || !offer.role || *offer.role == p.role) return failed(FailReason::InvalidTarget);
    if (p.score < kSelfSwapCost) return failed(FailReason::InsufficientPoints);
    p.score -= kSelfSwapCost;
    s.waived[index_of(p.role)] = true;
    s.waived[index_of(*offer.role)] = false;
    p.role = *offer.role;
    p.ammo = default_ammo(p.role);
    p.goal_progress = 0;
    events.push_back(ev::TradeCompleted{p.id, p.id, kSelfSwapCost});
    return;
  }

  if (s.pending_trade) return failed(FailReason::TradePending);
  const auto* target = s.find_player(offer.target);
  if (!target || !target->connected || offer.points <= 0) return failed(FailReason::InvalidTarget);
  if (offer.points > p.score) return failed(FailReason::InsufficientPoints);
  s.pending_trade = TradeOffer{p.id, target->id, offer.points, s.tick + kTradeTtlTicks};
  events.push_back(ev::TradeProposed{p.id, target->id, offer.points});
}

void handle_response(GameState& s, PlayerState& p, const cmd::RespondTrade& reply, std::vector<GameEvent>& events) {
  if (!s.pending_trade || s.pending_trade->to != p.id) {
    events.push_back(ev::ActionFailed{p.id, FailReason::NoPendingTrade});
    return;
  }
  const auto* from = s.find_player(s.pending_trade->from);
  if (!from || !from->connected || !p.connected) return cancel_trade(s, false, events);
  const auto out = resolve_trade(s, *s.pending_trade, reply.accept);
  events.insert(events.end(), out.begin(), out.end());
}

}  // namespace

GameState new_game(Campaign stages, std::span<const RosterEntry> roster, std::uint64_t seed) {
  return new_game(std::make_shared<const Campaign>(std::move(stages)), roster, seed);
}

GameState new_game(std::shared_ptr<const Campaign> stages, std::span<const RosterEntry> roster, std::uint64_t seed) {
  if (roster.empty()) fail(SimErrc::EmptyRoster, "roster is empty");
  if (roster.size() > kMaxPlayers) fail(SimErrc::RosterTooLarge, "at most four players");
  if (!stages || stages->empty()) fail(SimErrc::EmptyCampaign, "no stages");

  std::array<bool, kRoleCount> held{};
  std::set<PlayerId> ids;
  for (const auto& r : roster) {
    if (held[index_of(r.role)]) fail(SimErrc::DuplicateRole, "role '" + std::string(to_string(r.role)) + "' taken twice");
    held[index_of(r.role)] = true;
    if (!ids.insert(r.id).second) fail(SimErrc::DuplicatePlayer, "player '" + r.id + "' listed twice");
  }
  for (const auto& st : *stages) {
    check_achievable(st);
    if (st.map.spawns.size() < roster.size())
      fail(SimErrc::NotEnoughSpawns, "stage " + std::to_string(st.stage_index) + " has too few spawns");
  }

  GameState s;
  s.rng_seed = seed;
  s.rng.reseed(seed);
  s.campaign = std::move(stages);
  s.stage_pos = 0;
  for (const auto& r : roster) {
    PlayerState p;
    p.id = r.id;
    p.role = r.role;
    s.players.push_back(std::move(p));
  }
  for (auto role : kAllRoles) s.waived[index_of(role)] = !held[index_of(role)];
  load_stage(s);
  s.phase = Phase::Running;
  return s;
}

void queue_command(GameState& state, const PlayerId& player, PlayerCommand command) {
  require_player(state, player);
  require_running(state);
  state.queued.insert_or_assign(player, std::move(command));
}

double speed_multiplier(double health) {
  const double h = std::clamp(health, 0.0, kMaxHealth);
  return 0.5 + 0.5 * (h / kMaxHealth);
}

double virus_step_length(int strain_level) {
  return kVirusBaseStep * (1.0 + 0.1 * (strain_level - 1)) * kVirusTickScale;
}

Vec2 virus_step(GameState& state, const VirusState& virus) {
  const PlayerState* target = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : state.players) {
    const double d = distance(virus.position, p.position);
    if (d > kAggroRadius) continue;
    if (d < best || (d == best && target && p.id < target->id)) {
      best = d;
      target = &p;
    }
  }

  const double step = virus_step_length(virus.strain_level);
  Vec2 delta;
  if (target) {
    const double dx = target->position.x - virus.position.x;
    const double dy = target->position.y - virus.position.y;
    if (best <= step) {
      delta = {dx, dy};
    } else {
      delta = {dx / best * step, dy / best * step};
    }
  } else {
    // 8 compass directions plus "stay"
    static constexpr std::array<std::array<int, 2>, 8> kDirs{
        {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
    const auto r = state.rng.below(9);
    if (r < 8) {
      const Vec2 u = unit_direction(kDirs[r][0], kDirs[r][1]);
      delta = {u.x * step, u.y * step};
    }
  }
  return slide(state, virus.position, delta);
}

std::vector<GameEvent> apply_role_action(GameState& state, const PlayerId& player) {
  require_running(state);
  auto& p = require_player(state, player);
  std::vector<GameEvent> events;
  const auto failed = [&](FailReason r) {
    events.push_back(ev::ActionFailed{p.id, r});
    return events;
  };

  switch (p.role) {
    case Role::Citizen:
      return events;

    case Role::Doctor: {
      if (p.ammo <= 0) return failed(FailReason::NoAmmo);
      CivilianState* best = nullptr;
      double best_d = kActionRadius;
      for (auto& c : state.civilians) {
        if (c.treated) continue;
        const double d = distance(p.position, center_of(c.cell));
        if (d <= best_d && (!best || d < best_d)) {
          best = &c;
          best_d = d;
        }
      }
      if (!best) return failed(FailReason::NoTarget);
      best->treated = true;
      --p.ammo;
      ++p.goal_progress;
      p.score += kGoalActionPoints;
      events.push_back(ev::CivilianTreated{p.id, best->cell});
      return events;
    }

    case Role::SanitationWorker: {
      if (p.ammo <= 0) return failed(FailReason::NoAmmo);
      std::vector<VirusState*> hits;
      for (auto& v : state.viruses)
        if (v.alive && distance(p.position, v.position) <= kActionRadius) hits.push_back(&v);
      if (hits.empty()) return failed(FailReason::NoTarget);
      --p.ammo;
      for (auto* v : hits) {
        v->alive = false;
        std::erase_if(state.contact_ready_at, [&](const auto& kv) { return kv.first.first == v->id; });
        ++p.goal_progress;
        p.score += kGoalActionPoints;
        events.push_back(ev::VirusKilled{v->id, p.id});
      }
      return events;
    }

    case Role::LawEnforcer: {
      CrowdState* best = nullptr;
      double best_d = kActionRadius;
      for (auto& c : state.crowds) {
        if (c.dispersed) continue;
        const double d = distance(p.position, center_of(c.cell));
        if (d <= best_d && (!best || d < best_d)) {
          best = &c;
          best_d = d;
        }
      }
      if (!best) return failed(FailReason::NoTarget);
      best->dispersed = true;
      ++p.goal_progress;
      p.score += kGoalActionPoints;
      events.push_back(ev::CrowdDispersed{p.id, best->cell});
      return events;
    }
  }
  return events;
}

std::optional<Vec2> vaccine_direction_hint(const GameState& state, const PlayerId& player) {
  const auto* p = state.find_player(player);
  if (!p) fail(SimErrc::UnknownPlayer, "unknown player '" + player + "'");
  const PickupPlacement* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& pick : state.remaining_pickups) {
    if (pick.kind != PickupKind::VaccinePart) continue;
    const double d = distance(p->position, center_of(pick.cell));
    if (d < best_d) {
      best_d = d;
      best = &pick;
    }
  }
  if (!best) return std::nullopt;
  if (best_d == 0.0) return Vec2{0.0, 0.0};
  const Vec2 to = center_of(best->cell);
  return Vec2{(to.x - p->position.x) / best_d, (to.y - p->position.y) / best_d};
}

std::vector<GameEvent> resolve_trade(GameState& state, const TradeOffer& offer, bool accepted) {
  if (!state.pending_trade || *state.pending_trade != offer) fail(SimErrc::NoPendingTrade, "offer is not pending");
  std::vector<GameEvent> events;
  if (state.tick > offer.expires_at_tick) {
    cancel_trade(state, true, events);
    fail(SimErrc::TradeExpired, "offer expired");
  }
  auto& from = require_player(state, offer.from);
  auto& to = require_player(state, offer.to);
  if (!from.connected || !to.connected) fail(SimErrc::InvalidTrade, "both players must be connected");

  if (!accepted) {
    cancel_trade(state, false, events);
    return events;
  }
  if (from.score < offer.points) fail(SimErrc::InsufficientPoints, "proposer cannot cover the offer");

  std::swap(from.role, to.role);
  std::swap(from.ammo, to.ammo);
  std::swap(from.goal_progress, to.goal_progress);
  from.score -= offer.points;
  to.score += offer.points;
  state.pending_trade.reset();
  events.push_back(ev::TradeCompleted{offer.from, offer.to, offer.points});
  return events;
}

bool check_stage_clear(const GameState& state) {
  const auto& st = state.stage();
  if (state.team_vaccines < st.vaccine_target) return false;
  for (auto role : kAllRoles) {
    if (state.waived[index_of(role)]) continue;
    const auto* holder = state.holder_of(role);
    if (!holder || holder->goal_progress < st.goal_for(role)) return false;
  }
  return true;
}

std::vector<GameEvent> tick(GameState& s) {
  require_running(s);
  std::vector<GameEvent> events;
  ++s.tick;
  ++s.stage_tick;
  auto commands = std::move(s.queued);
  s.queued.clear();

  const auto command_for = [&](const PlayerState& p) -> const PlayerCommand* {
    if (!p.connected) return nullptr;
    const auto it = commands.find(p.id);
    return it == commands.end() ? nullptr : &it->second;
  };

  // 1. movement
  for (auto& p : s.players) {
    const auto* c = command_for(p);
    const auto* move = c ? std::get_if<cmd::Move>(c) : nullptr;
    if (!move) continue;
    const int dx = sign(move->dx);
    const int dy = sign(move->dy);
    if (dx == 0 && dy == 0) continue;
    const Vec2 u = unit_direction(dx, dy);
    const double step = kPlayerSpeedPerTick * speed_multiplier(p.health);
    p.position = slide(s, p.position, {u.x * step, u.y * step});
  }

  // 2. role actions and sanitizer use
  for (auto& p : s.players) {
    const auto* c = command_for(p);
    if (!c) continue;
    if (std::holds_alternative<cmd::Act>(*c)) {
      auto out = apply_role_action(s, p.id);
      events.insert(events.end(), out.begin(), out.end());
    } else if (std::holds_alternative<cmd::UseSanitizer>(*c)) {
      if (p.sanitizer_count <= 0) {
        events.push_back(ev::ActionFailed{p.id, FailReason::NoSanitizer});
      } else {
        --p.sanitizer_count;
        p.shield_ticks += kSanitizerShieldTicks;
        events.push_back(ev::SanitizerUsed{p.id});
      }
    }
  }

  // 3. virus AI, then crowd spawns
  for (auto& v : s.viruses)
    if (v.alive) v.position = virus_step(s, v);
  if (s.stage_tick % kCrowdSpawnPeriodTicks == 0) {
    for (const auto& c : s.crowds) {
      if (c.dispersed) continue;
      const VirusState v{s.next_virus_id++, center_of(c.cell), s.stage().strain_level, true};
      s.viruses.push_back(v);
      events.push_back(ev::VirusSpawned{v.id, c.cell, v.strain_level});
    }
  }

  // 4. contact damage
  std::vector<PlayerId> downed;
  for (const auto& v : s.viruses) {
    if (!v.alive) continue;
    for (auto& p : s.players) {
      if (p.health <= 0.0 || distance(v.position, p.position) >= kContactRadius || p.shielded()) continue;
      const auto key = std::make_pair(v.id, p.id);
      const auto it = s.contact_ready_at.find(key);
      if (it != s.contact_ready_at.end() && s.tick < it->second) continue;
      const double dmg = contact_damage(s, v.strain_level);
      p.health = std::max(0.0, p.health - dmg);
      s.contact_ready_at[key] = s.tick + kContactCooldownTicks;
      events.push_back(ev::PlayerInfected{p.id, v.id, dmg, p.health});
      if (p.health <= 0.0) downed.push_back(p.id);
    }
  }

  // 5. shield decay
  for (auto& p : s.players) {
    p.mask_meter = std::max(0.0, p.mask_meter - kMaskDecayPerTick);
    if (p.shield_ticks > 0) --p.shield_ticks;
  }

  // 6. camp healing
  for (auto& p : s.players) {
    if (p.health <= 0.0 || p.health >= kMaxHealth || !near_camp(s, p.position)) continue;
    const double before = p.health;
    p.health = std::min(kMaxHealth, p.health + kCampHealPerTick);
    events.push_back(ev::PlayerHealed{p.id, p.health - before, HealSource::Camp});
  }

  // 7. pickups under players
  for (auto& p : s.players) {
    if (p.health <= 0.0) continue;
    const Cell here = cell_of(p.position);
    for (auto it = s.remaining_pickups.begin(); it != s.remaining_pickups.end();) {
      if (it->cell == here && can_collect(p.role, it->kind)) {
        const PickupPlacement pick = *it;
        it = s.remaining_pickups.erase(it);
        collect(s, p, pick, events);
      } else {
        ++it;
      }
    }
  }

  // 8. trades
  for (auto& p : s.players) {
    const auto* c = command_for(p);
    if (!c) continue;
    if (const auto* offer = std::get_if<cmd::ProposeTrade>(c)) {
      handle_proposal(s, p, *offer, events);
    } else if (const auto* reply = std::get_if<cmd::RespondTrade>(c)) {
      handle_response(s, p, *reply, events);
    }
  }
  if (s.pending_trade && s.tick > s.pending_trade->expires_at_tick) cancel_trade(s, true, events);

  // 9. stage / win / loss
  if (!downed.empty()) {
    s.phase = Phase::Lost;
    s.loss_reason = LossReason::Health;
    events.push_back(ev::GameLost{downed.front(), LossReason::Health});
  } else if (check_stage_clear(s)) {
    const int cleared = s.stage().stage_index;
    events.push_back(ev::StageCleared{cleared});
    s.vaccinated_through = std::max(s.vaccinated_through, cleared);
    if (s.is_last_stage()) {
      s.phase = Phase::Won;
      events.push_back(ev::GameWon{});
    } else {
      ++s.stage_pos;
      load_stage(s);
    }
  }
  return events;
}

std::vector<GameEvent> set_connected(GameState& state, const PlayerId& player, bool connected) {
  auto& p = require_player(state, player);
  std::vector<GameEvent> events;
  if (p.connected == connected) return events;
  p.connected = connected;
  if (!connected) {
    state.queued.erase(player);
    if (state.pending_trade && (state.pending_trade->from == player || state.pending_trade->to == player))
      cancel_trade(state, false, events);
  }
  events.push_back(ev::ConnectionChanged{player, connected});
  return events;
}

std::vector<GameEvent> forfeit(GameState& state, const PlayerId& player) {
  require_running(state);
  require_player(state, player);
  state.phase = Phase::Lost;
  state.loss_reason = LossReason::Disconnect;
  return {ev::GameLost{player, LossReason::Disconnect}};
}

}  // namespace coopvax::sim
