#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coopvax/rng.hpp"

namespace coopvax::sim {

enum class Role : std::uint8_t { Citizen, Doctor, SanitationWorker, LawEnforcer };
inline constexpr std::size_t kRoleCount = 4;
inline constexpr std::array<Role, kRoleCount> kAllRoles{Role::Citizen, Role::Doctor, Role::SanitationWorker,
                                                        Role::LawEnforcer};

enum class PickupKind : std::uint8_t {
  Grocery,
  MedicineRefill,
  DisinfectantRefill,
  HealthVitamin,
  VaccinePart,
  Mask,
  Sanitizer,
};
inline constexpr std::size_t kPickupKindCount = 7;
inline constexpr std::array<PickupKind, kPickupKindCount> kAllPickupKinds{
    PickupKind::Grocery,     PickupKind::MedicineRefill, PickupKind::DisinfectantRefill, PickupKind::HealthVitamin,
    PickupKind::VaccinePart, PickupKind::Mask,           PickupKind::Sanitizer};

constexpr std::size_t index_of(Role r) { return static_cast<std::size_t>(r); }
constexpr std::size_t index_of(PickupKind k) { return static_cast<std::size_t>(k); }

std::string_view to_string(Role r);
std::string_view to_string(PickupKind k);
std::optional<Role> role_from_string(std::string_view s);
std::optional<PickupKind> pickup_from_string(std::string_view s);

// Role-restricted refills and groceries; everything else is shared.
bool can_collect(Role role, PickupKind kind);

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

inline Vec2 center_of(Cell c) { return {c.x + 0.5, c.y + 0.5}; }
inline Cell cell_of(Vec2 p) { return {static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))}; }
inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct PickupPlacement {
  PickupKind kind = PickupKind::Grocery;
  Cell cell;
  bool operator==(const PickupPlacement&) const = default;
};

struct VirusPlacement {
  Cell cell;
  int strain = 1;
  bool operator==(const VirusPlacement&) const = default;
};

struct WorldMap {
  int width = 0;
  int height = 0;
  std::vector<Cell> walls;
  std::vector<Cell> spawns;
  std::vector<Cell> camps;
  std::vector<PickupPlacement> pickups;
  std::vector<VirusPlacement> viruses;
  std::vector<Cell> crowds;
  std::vector<Cell> civilians;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  int count_pickups(PickupKind kind) const;
  bool operator==(const WorldMap&) const = default;
};

// Personal goal target per role, indexed by index_of(Role):
// groceries, treatments, disinfections, crowd dispersals.
using GoalTargets = std::array<int, kRoleCount>;

struct StageSpec {
  int stage_index = 1;
  int strain_level = 1;
  int vaccine_target = 1;
  GoalTargets goals{};
  WorldMap map;

  int goal_for(Role r) const { return goals[index_of(r)]; }
  bool operator==(const StageSpec&) const = default;
};

using PlayerId = std::string;

struct PlayerState {
  PlayerId id;
  Role role = Role::Citizen;
  Vec2 position;
  double health = 100.0;
  double mask_meter = 0.0;
  int sanitizer_count = 0;
  int shield_ticks = 0;
  int ammo = 0;
  int goal_progress = 0;
  int score = 0;
  bool connected = true;

  bool shielded() const { return shield_ticks > 0 || mask_meter > 0.0; }
  bool operator==(const PlayerState&) const = default;
};

struct VirusState {
  std::uint32_t id = 0;
  Vec2 position;
  int strain_level = 1;
  bool alive = true;
  bool operator==(const VirusState&) const = default;
};

struct CivilianState {
  Cell cell;
  bool treated = false;
  bool operator==(const CivilianState&) const = default;
};

struct CrowdState {
  Cell cell;
  bool dispersed = false;
  bool operator==(const CrowdState&) const = default;
};

struct TradeOffer {
  PlayerId from;
  PlayerId to;
  int points = 0;
  std::uint64_t expires_at_tick = 0;
  bool operator==(const TradeOffer&) const = default;
};

// ---- commands -------------------------------------------------------------

namespace cmd {
struct Idle {
  bool operator==(const Idle&) const = default;
};
// dx, dy in {-1, 0, 1}; normalised to a unit vector when applied.
struct Move {
  int dx = 0;
  int dy = 0;
  bool operator==(const Move&) const = default;
};
struct Act {
  bool operator==(const Act&) const = default;
};
struct UseSanitizer {
  bool operator==(const UseSanitizer&) const = default;
};
// Targeting yourself is only legal in a one-player game and requires `role`.
struct ProposeTrade {
  PlayerId target;
  int points = 0;
  std::optional<Role> role;
  bool operator==(const ProposeTrade&) const = default;
};
struct RespondTrade {
  bool accept = false;
  bool operator==(const RespondTrade&) const = default;
};
}  // namespace cmd

using PlayerCommand = std::variant<cmd::Idle, cmd::Move, cmd::Act, cmd::UseSanitizer, cmd::ProposeTrade, cmd::RespondTrade>;

// ---- events ---------------------------------------------------------------

enum class FailReason : std::uint8_t {
  NoAmmo,
  NoTarget,
  NoSanitizer,
  InsufficientPoints,
  TradePending,
  InvalidTarget,
  NoPendingTrade,
};
std::string_view to_string(FailReason r);
std::optional<FailReason> fail_reason_from_string(std::string_view s);

enum class HealSource : std::uint8_t { Camp, Vitamin };
enum class LossReason : std::uint8_t { Health, Disconnect };

namespace ev {
struct PickupCollected {
  PlayerId player;
  PickupKind kind = PickupKind::Grocery;
  Cell cell;
  bool operator==(const PickupCollected&) const = default;
};
struct PlayerInfected {
  PlayerId player;
  std::uint32_t virus_id = 0;
  double damage = 0.0;
  double health = 0.0;
  bool operator==(const PlayerInfected&) const = default;
};
struct VirusKilled {
  std::uint32_t virus_id = 0;
  PlayerId by;
  bool operator==(const VirusKilled&) const = default;
};
struct VirusSpawned {
  std::uint32_t virus_id = 0;
  Cell cell;
  int strain = 1;
  bool operator==(const VirusSpawned&) const = default;
};
struct CivilianTreated {
  PlayerId player;
  Cell cell;
  bool operator==(const CivilianTreated&) const = default;
};
struct CrowdDispersed {
  PlayerId player;
  Cell cell;
  bool operator==(const CrowdDispersed&) const = default;
};
struct PlayerHealed {
  PlayerId player;
  double amount = 0.0;
  HealSource source = HealSource::Camp;
  bool operator==(const PlayerHealed&) const = default;
};
struct SanitizerUsed {
  PlayerId player;
  bool operator==(const SanitizerUsed&) const = default;
};
struct ActionFailed {
  PlayerId player;
  FailReason reason = FailReason::NoTarget;
  bool operator==(const ActionFailed&) const = default;
};
struct TradeProposed {
  PlayerId from;
  PlayerId to;
  int points = 0;
  bool operator==(const TradeProposed&) const = default;
};
struct TradeCompleted {
  PlayerId from;
  PlayerId to;
  int points = 0;
  bool operator==(const TradeCompleted&) const = default;
};
struct TradeCancelled {
  PlayerId from;
  PlayerId to;
  bool expired = false;
  bool operator==(const TradeCancelled&) const = default;
};
struct ConnectionChanged {
  PlayerId player;
  bool connected = true;
  bool operator==(const ConnectionChanged&) const = default;
};
struct StageCleared {
  int stage = 1;
  bool operator==(const StageCleared&) const = default;
};
struct GameWon {
  bool operator==(const GameWon&) const = default;
};
struct GameLost {
  PlayerId player;
  LossReason reason = LossReason::Health;
  bool operator==(const GameLost&) const = default;
};
}  // namespace ev

using GameEvent = std::variant<ev::PickupCollected, ev::PlayerInfected, ev::VirusKilled, ev::VirusSpawned,
                               ev::CivilianTreated, ev::CrowdDispersed, ev::PlayerHealed, ev::SanitizerUsed,
                               ev::ActionFailed, ev::TradeProposed, ev::TradeCompleted, ev::TradeCancelled,
                               ev::ConnectionChanged, ev::StageCleared, ev::GameWon, ev::GameLost>;

// ActionFailed is reported only to the acting client.
std::optional<PlayerId> private_recipient(const GameEvent& e);

// ---- game state -----------------------------------------------------------

enum class Phase : std::uint8_t { Lobby, Running, Won, Lost };
std::string_view to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

using Campaign = std::vector<StageSpec>;

struct GameState {
  std::uint64_t rng_seed = 0;
  Rng rng;
  std::uint64_t tick = 0;
  std::uint64_t stage_tick = 0;
  std::shared_ptr<const Campaign> campaign;
  std::size_t stage_pos = 0;

  std::vector<PlayerState> players;  // roster order
  std::vector<VirusState> viruses;
  std::uint32_t next_virus_id = 1;
  std::vector<CivilianState> civilians;
  std::vector<CrowdState> crowds;
  std::vector<PickupPlacement> remaining_pickups;

  int team_vaccines = 0;  // this stage
  int vaccines_total = 0; // whole game, the team score
  int vaccinated_through = 0;
  std::array<bool, kRoleCount> waived{};
  Phase phase = Phase::Lobby;
  std::optional<TradeOffer> pending_trade;
  std::optional<LossReason> loss_reason;

  std::map<PlayerId, PlayerCommand> queued;
  // (virus id, player id) -> first tick at which that virus may damage that player again
  std::map<std::pair<std::uint32_t, PlayerId>, std::uint64_t> contact_ready_at;

  std::array<int, kPickupKindCount> placed_total{};
  std::array<int, kPickupKindCount> collected_total{};

  // Derived from the current stage's walls, row-major; not part of the serialized state.
  std::vector<std::uint8_t> blocked;

  const StageSpec& stage() const { return (*campaign)[stage_pos]; }
  bool is_last_stage() const { return stage_pos + 1 == campaign->size(); }
  bool walkable(Cell c) const {
    const auto& m = stage().map;
    return m.in_bounds(c) && blocked[static_cast<std::size_t>(c.y) * m.width + c.x] == 0;
  }

  PlayerState* find_player(const PlayerId& id);
  const PlayerState* find_player(const PlayerId& id) const;
  const PlayerState* holder_of(Role r) const;
};

// ---- errors ---------------------------------------------------------------

enum class SimErrc {
  EmptyRoster,
  RosterTooLarge,
  DuplicateRole,
  DuplicatePlayer,
  EmptyCampaign,
  NotEnoughSpawns,
  UnachievableGoals,
  UnknownPlayer,
  NotRunning,
  NoPendingTrade,
  TradeExpired,
  InsufficientPoints,
  InvalidTrade,
};
std::string_view to_string(SimErrc c);

class SimError : public std::runtime_error {
 public:
  SimError(SimErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  SimErrc code() const noexcept { return code_; }

 private:
  SimErrc code_;
};

}  // namespace coopvax::sim
