#include "coopvax/sim/types.hpp"

#include <algorithm>

namespace coopvax::sim {

namespace {

constexpr std::array<std::string_view, kRoleCount> kRoleNames{"citizen", "doctor", "sanitation_worker", "law_enforcer"};
constexpr std::array<std::string_view, kPickupKindCount> kPickupNames{
    "grocery", "medicine_refill", "disinfectant_refill", "health_vitamin", "vaccine_part", "mask", "sanitizer"};
constexpr std::array<std::string_view, 7> kFailNames{"no_ammo",        "no_target",     "no_sanitizer",
                                                     "insufficient_points", "trade_pending", "invalid_target",
                                                     "no_pending_trade"};
constexpr std::array<std::string_view, 4> kPhaseNames{"lobby", "running", "won", "lost"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  const auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) return std::nullopt;
  return static_cast<E>(it - names.begin());
}

}  // namespace

std::string_view to_string(Role r) { return kRoleNames[index_of(r)]; }
std::string_view to_string(PickupKind k) { return kPickupNames[index_of(k)]; }
std::string_view to_string(FailReason r) { return kFailNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

std::optional<Role> role_from_string(std::string_view s) { return lookup<Role>(kRoleNames, s); }
std::optional<PickupKind> pickup_from_string(std::string_view s) { return lookup<PickupKind>(kPickupNames, s); }
std::optional<FailReason> fail_reason_from_string(std::string_view s) { return lookup<FailReason>(kFailNames, s); }
std::optional<Phase> phase_from_string(std::string_view s) { return lookup<Phase>(kPhaseNames, s); }

bool can_collect(Role role, PickupKind kind) {
  switch (kind) {
    case PickupKind::Grocery:
      return role == Role::Citizen;
    case PickupKind::MedicineRefill:
      return role == Role::Doctor;
    case PickupKind::DisinfectantRefill:
      return role == Role::SanitationWorker;
    default:
      return true;
  }
}

int WorldMap::count_pickups(PickupKind kind) const {
  return static_cast<int>(std::count_if(pickups.begin(), pickups.end(), [&](const auto& p) { return p.kind == kind; }));
}

PlayerState* GameState::find_player(const PlayerId& id) {
  for (auto& p : players)
    if (p.id == id) return &p;
  return nullptr;
}

const PlayerState* GameState::find_player(const PlayerId& id) const {
  for (const auto& p : players)
    if (p.id == id) return &p;
  return nullptr;
}

const PlayerState* GameState::holder_of(Role r) const {
  for (const auto& p : players)
    if (p.role == r) return &p;
  return nullptr;
}

std::optional<PlayerId> private_recipient(const GameEvent& e) {
  if (const auto* f = std::get_if<ev::ActionFailed>(&e)) return f->player;
  return std::nullopt;
}

std::string_view to_string(SimErrc c) {
  switch (c) {
    case SimErrc::EmptyRoster: return "empty_roster";
    case SimErrc::RosterTooLarge: return "roster_too_large";
    case SimErrc::DuplicateRole: return "duplicate_role";
    case SimErrc::DuplicatePlayer: return "duplicate_player";
    case SimErrc::EmptyCampaign: return "empty_campaign";
    case SimErrc::NotEnoughSpawns: return "not_enough_spawns";
    case SimErrc::UnachievableGoals: return "unachievable_goals";
    case SimErrc::UnknownPlayer: return "unknown_player";
    case SimErrc::NotRunning: return "not_running";
    case SimErrc::NoPendingTrade: return "no_pending_trade";
    case SimErrc::TradeExpired: return "trade_expired";
    case SimErrc::InsufficientPoints: return "insufficient_points";
    case SimErrc::InvalidTrade: return "invalid_trade";
  }
  return "unknown";
}

}  // namespace coopvax::sim
