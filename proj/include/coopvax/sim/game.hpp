#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coopvax/sim/types.hpp"

namespace coopvax::sim {

struct RosterEntry {
  PlayerId id;
  Role role = Role::Citizen;
};

// Builds a Running game on the first stage. Players take spawn cells in
// roster order; goals of roles nobody holds are waived.
GameState new_game(Campaign stages, std::span<const RosterEntry> roster, std::uint64_t seed);
GameState new_game(std::shared_ptr<const Campaign> stages, std::span<const RosterEntry> roster, std::uint64_t seed);

// Records `command` for the next tick, replacing anything already queued for the player.
void queue_command(GameState& state, const PlayerId& player, PlayerCommand command);

// Advances one tick. Order: moves, actions, virus AI, contact damage, shield
// decay, camp healing, pickups, trades, then stage/win/loss evaluation.
std::vector<GameEvent> tick(GameState& state);

double speed_multiplier(double health);
double virus_step_length(int strain_level);

// Next position of `virus`. Consumes one RNG draw when no player is within aggro range.
Vec2 virus_step(GameState& state, const VirusState& virus);

std::vector<GameEvent> apply_role_action(GameState& state, const PlayerId& player);

std::optional<Vec2> vaccine_direction_hint(const GameState& state, const PlayerId& player);

std::vector<GameEvent> resolve_trade(GameState& state, const TradeOffer& offer, bool accepted);

bool check_stage_clear(const GameState& state);

// Server hooks. A disconnected avatar idles; forfeit ends the game Lost for everyone.
std::vector<GameEvent> set_connected(GameState& state, const PlayerId& player, bool connected);
std::vector<GameEvent> forfeit(GameState& state, const PlayerId& player);

}  // namespace coopvax::sim
