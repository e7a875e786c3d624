#include "coopvax/bots/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "coopvax/sim/rules.hpp"

namespace coopvax::bots {

namespace {

using protocol::ClientView;
using protocol::PlayerView;
using sim::Cell;
using sim::Role;
using sim::Vec2;

constexpr double kHealBelow = 60.0;
constexpr double kHealUntil = 95.0;
constexpr double kSanitizerThreat = 2.0;
constexpr double kMaskThreat = 4.0;
constexpr double kFleeRadius = 1.5;
constexpr double kFleeLookahead = 1.5;
constexpr int kFleeCommit = 8;
constexpr double kIdleWary = 4.0;
constexpr int kShieldMargin = 10;
constexpr double kActReach = sim::rules::kActionRadius - 0.05;
constexpr int kStuckLimit = 3;

constexpr std::array<std::pair<int, int>, 8> kDirections{
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

struct Nearest {
  Vec2 at;
  double dist = std::numeric_limits<double>::infinity();
  explicit operator bool() const { return std::isfinite(dist); }
};

void consider(Nearest& best, Vec2 from, Vec2 candidate) {
  const double d = sim::distance(from, candidate);
  if (d < best.dist) best = {candidate, d};
}

Nearest nearest_virus(const ClientView& v, Vec2 from) {
  Nearest best;
  for (const auto& x : v.viruses) consider(best, from, x.position);
  return best;
}

Nearest nearest_pickup(const ClientView& v, Vec2 from, Role role, std::initializer_list<sim::PickupKind> kinds) {
  Nearest best;
  for (const auto& p : v.pickups)
    if (std::find(kinds.begin(), kinds.end(), p.kind) != kinds.end() && sim::can_collect(role, p.kind))
      consider(best, from, sim::center_of(p.cell));
  return best;
}

Nearest nearest_site(const std::vector<protocol::SiteView>& sites, Vec2 from) {
  Nearest best;
  for (const auto& s : sites)
    if (!s.done) consider(best, from, sim::center_of(s.cell));
  return best;
}

bool shielded(const PlayerView& p) { return p.shield_ticks > kShieldMargin || p.mask_meter > kShieldMargin * 0.5; }

int sign_of(double v, double dead) { return v > dead ? 1 : (v < -dead ? -1 : 0); }

}  // namespace

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Greedy:
      return "greedy";
    case PolicyKind::Random:
      return "random";
    case PolicyKind::Scripted:
      return "scripted";
  }
  return "?";
}

std::optional<PolicyKind> policy_from_string(std::string_view s) {
  if (s == "greedy") return PolicyKind::Greedy;
  if (s == "random") return PolicyKind::Random;
  if (s == "scripted") return PolicyKind::Scripted;
  return std::nullopt;
}

std::uint64_t policy_seed(std::uint64_t game_seed, std::size_t slot) {
  std::uint64_t x = game_seed ^ (0xa0761d6478bd642fULL * (slot + 1));
  return Rng::splitmix64(x);
}

Bot Bot::greedy(std::uint64_t seed) { return Bot(PolicyKind::Greedy, seed); }
Bot Bot::random_walker(std::uint64_t seed) { return Bot(PolicyKind::Random, seed); }

Bot Bot::scripted(std::vector<ScriptStep> script) {
  Bot b(PolicyKind::Scripted, 0);
  std::stable_sort(script.begin(), script.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
  b.script_ = std::move(script);
  return b;
}

Bot Bot::make(PolicyKind kind, std::uint64_t seed, std::vector<ScriptStep> script) {
  switch (kind) {
    case PolicyKind::Greedy:
      return greedy(seed);
    case PolicyKind::Random:
      return random_walker(seed);
    case PolicyKind::Scripted:
      return scripted(std::move(script));
  }
  return greedy(seed);
}

sim::PlayerCommand Bot::decide(const ClientView& view, const sim::PlayerId& self, std::uint64_t tick) {
  switch (kind_) {
    case PolicyKind::Scripted:
      return decide_scripted(tick);
    case PolicyKind::Random:
      return decide_random();
    case PolicyKind::Greedy:
      break;
  }
  const auto* me = view.find(self);
  if (!me || view.phase != sim::Phase::Running) return sim::cmd::Idle{};
  auto cmd = decide_greedy(view, *me);
  last_position_ = me->position;
  last_was_move_ = std::holds_alternative<sim::cmd::Move>(cmd);
  return cmd;
}

sim::PlayerCommand Bot::decide_scripted(std::uint64_t tick) {
  while (script_pos_ < script_.size() && script_[script_pos_].tick < tick) ++script_pos_;
  sim::PlayerCommand out = sim::cmd::Idle{};
  // Several steps stamped with the same tick: the last one wins, as in the sim.
  while (script_pos_ < script_.size() && script_[script_pos_].tick == tick) out = script_[script_pos_++].command;
  return out;
}

sim::PlayerCommand Bot::decide_random() {
  if (rng_.unit() < 0.1) return sim::cmd::Act{};
  if (walk_left_ <= 0) {
    const auto pick = rng_.below(9);
    if (pick == 8) {
      walk_dx_ = walk_dy_ = 0;
    } else {
      walk_dx_ = kDirections[pick].first;
      walk_dy_ = kDirections[pick].second;
    }
    walk_left_ = 5 + static_cast<int>(rng_.below(16));
  }
  --walk_left_;
  if (walk_dx_ == 0 && walk_dy_ == 0) return sim::cmd::Idle{};
  return sim::cmd::Move{walk_dx_, walk_dy_};
}

sim::PlayerCommand Bot::decide_greedy(const ClientView& view, const PlayerView& me) {
  const Vec2 pos = me.position;

  if (view.pending_trade && view.pending_trade->to == me.id && view.pending_trade->from != me.id)
    return sim::cmd::RespondTrade{false};

  const auto virus = nearest_virus(view, pos);
  if (!shielded(me) && me.sanitizer_count > 0 && virus && virus.dist <= kSanitizerThreat)
    return sim::cmd::UseSanitizer{};

  // Role action when something is in reach.
  switch (me.role) {
    case Role::Doctor:
      if (me.ammo > 0) {
        if (const auto c = nearest_site(view.civilians, pos); c && c.dist <= kActReach) return sim::cmd::Act{};
      }
      break;
    case Role::SanitationWorker:
      if (me.ammo > 0 && virus && virus.dist <= kActReach) return sim::cmd::Act{};
      break;
    case Role::LawEnforcer:
      if (const auto c = nearest_site(view.crowds, pos); c && c.dist <= kActReach) return sim::cmd::Act{};
      break;
    case Role::Citizen:
      break;
  }

  if (me.health < kHealBelow) healing_ = true;
  if (me.health >= kHealUntil) healing_ = false;
  if (healing_ && !view.map.camps.empty()) {
    Nearest camp;
    for (const auto& c : view.map.camps) consider(camp, pos, sim::center_of(c));
    const Cell here = sim::cell_of(pos);
    const Cell target = sim::cell_of(camp.at);
    if (std::max(std::abs(here.x - target.x), std::abs(here.y - target.y)) <= sim::rules::kCampReach &&
        camp.dist < 1.0) {
      return sim::cmd::Idle{};
    }
    return steer(me, camp.at);
  }

  const bool can_fight = me.role == Role::SanitationWorker && me.ammo > 0;
  if (shielded(me) || can_fight) flee_left_ = 0;
  if (flee_left_ > 0 || (!shielded(me) && !can_fight && virus && virus.dist < kFleeRadius)) return flee(view, me);

  if (!shielded(me) && virus && virus.dist <= kMaskThreat) {
    if (const auto mask = nearest_pickup(view, pos, me.role, {sim::PickupKind::Mask}); mask && mask.dist < 8.0)
      return steer(me, mask.at);
  }

  Nearest goal;
  const bool goal_open = me.goal_progress < me.goal_target;
  switch (me.role) {
    case Role::Citizen:
      if (goal_open) goal = nearest_pickup(view, pos, me.role, {sim::PickupKind::Grocery});
      break;
    case Role::Doctor:
      if (me.ammo == 0) {
        goal = nearest_pickup(view, pos, me.role, {sim::PickupKind::MedicineRefill});
      } else if (goal_open) {
        goal = nearest_site(view.civilians, pos);
      }
      break;
    case Role::SanitationWorker:
      if (me.ammo == 0) {
        goal = nearest_pickup(view, pos, me.role, {sim::PickupKind::DisinfectantRefill});
      } else {
        goal = virus;
      }
      break;
    case Role::LawEnforcer:
      goal = nearest_site(view.crowds, pos);
      break;
  }
  if (view.team_vaccines < view.vaccine_target) {
    const auto part = nearest_pickup(view, pos, me.role, {sim::PickupKind::VaccinePart});
    if (part.dist < goal.dist) goal = part;
  }
  if (!goal) {
    goal = nearest_pickup(view, pos, me.role, {sim::PickupKind::Mask, sim::PickupKind::Sanitizer});
    if (me.health < sim::rules::kMaxHealth) {
      const auto vit = nearest_pickup(view, pos, me.role, {sim::PickupKind::HealthVitamin});
      if (vit.dist < goal.dist) goal = vit;
    }
  }
  if (!goal) {
    if (virus && virus.dist < kIdleWary && !can_fight) return flee(view, me);
    return sim::cmd::Idle{};
  }
  return steer(me, goal.at);
}

sim::PlayerCommand Bot::flee(const ClientView& view, const PlayerView& me) {
  const Vec2 pos = me.position;
  if (flee_left_ == 0) {
    std::set<std::pair<int, int>> walls;
    for (const auto& w : view.map.walls) walls.emplace(w.x, w.y);
    const auto open = [&](Vec2 p) {
      const Cell c = sim::cell_of(p);
      return c.x >= 0 && c.y >= 0 && c.x < view.map.width && c.y < view.map.height && !walls.contains({c.x, c.y});
    };
    double best = -1.0;
    for (const auto& [dx, dy] : kDirections) {
      const double norm = (dx != 0 && dy != 0) ? M_SQRT1_2 : 1.0;
      const Vec2 probe{pos.x + dx * norm * kFleeLookahead, pos.y + dy * norm * kFleeLookahead};
      const Vec2 near{pos.x + dx * norm * 0.5, pos.y + dy * norm * 0.5};
      if (!open(probe) || !open(near)) continue;
      double closest = std::numeric_limits<double>::infinity();
      for (const auto& v : view.viruses) closest = std::min(closest, sim::distance(probe, v.position));
      if (closest > best) {
        best = closest;
        flee_dx_ = dx;
        flee_dy_ = dy;
      }
    }
    if (best < 0.0) return sim::cmd::Idle{};
    flee_left_ = kFleeCommit;
  }
  --flee_left_;
  return sim::cmd::Move{flee_dx_, flee_dy_};
}

sim::PlayerCommand Bot::steer(const PlayerView& me, Vec2 target) {
  const Vec2 pos = me.position;
  if (last_was_move_ && last_position_ && sim::distance(*last_position_, pos) < 1e-6) {
    ++stuck_ticks_;
  } else {
    stuck_ticks_ = 0;
  }

  const double dx = target.x - pos.x;
  const double dy = target.y - pos.y;
  const double len = std::hypot(dx, dy);
  if (len < 0.05) return sim::cmd::Idle{};

  if (stuck_ticks_ >= kStuckLimit) {
    // Blocked on both axes: commit to a sideways detour for a while.
    const int sx = sign_of(dx, 0.0);
    const int sy = sign_of(dy, 0.0);
    const bool left = rng_.below(2) == 0;
    detour_dx_ = left ? -sy : sy;
    detour_dy_ = left ? sx : -sx;
    if (detour_dx_ == 0 && detour_dy_ == 0) {
      const auto& d = kDirections[rng_.below(8)];
      detour_dx_ = d.first;
      detour_dy_ = d.second;
    }
    detour_left_ = 6 + static_cast<int>(rng_.below(15));
    stuck_ticks_ = 0;
  }
  if (detour_left_ > 0) {
    --detour_left_;
    return sim::cmd::Move{detour_dx_, detour_dy_};
  }

  // Quantise to eight directions: an axis counts when it is within 67.5 degrees of the heading.
  const double dead = len * std::sin(M_PI / 8.0);
  int mx = sign_of(dx, dead);
  int my = sign_of(dy, dead);
  if (mx == 0 && my == 0) {
    mx = sign_of(dx, 0.0);
    my = sign_of(dy, 0.0);
  }
  return sim::cmd::Move{mx, my};
}

}  // namespace coopvax::bots
