#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coopvax/sim/types.hpp"

namespace coopvax::protocol {

struct PlayerView {
  std::string id;
  sim::Role role = sim::Role::Citizen;
  sim::Vec2 position;
  double health = 0.0;
  double mask_meter = 0.0;
  int sanitizer_count = 0;
  int shield_ticks = 0;
  int ammo = 0;
  int goal_progress = 0;
  int goal_target = 0;
  bool goal_waived = false;
  int score = 0;
  bool connected = true;
  bool operator==(const PlayerView&) const = default;
};

struct VirusView {
  std::uint32_t id = 0;
  sim::Vec2 position;
  int strain = 1;
  bool operator==(const VirusView&) const = default;
};

struct PickupView {
  sim::PickupKind kind = sim::PickupKind::Grocery;
  sim::Cell cell;
  bool operator==(const PickupView&) const = default;
};

// A crowd (done = dispersed) or a civilian (done = treated).
struct SiteView {
  sim::Cell cell;
  bool done = false;
  bool operator==(const SiteView&) const = default;
};

struct MapView {
  int width = 0;
  int height = 0;
  std::vector<sim::Cell> walls;
  std::vector<sim::Cell> camps;
  bool operator==(const MapView&) const = default;
};

struct ClientView {
  int stage_index = 1;
  int stage_count = 1;
  sim::Phase phase = sim::Phase::Running;
  int strain_level = 1;
  int team_vaccines = 0;
  int vaccine_target = 0;
  int vaccines_total = 0;
  std::vector<PlayerView> players;
  std::vector<VirusView> viruses;
  std::vector<PickupView> pickups;
  std::vector<SiteView> crowds;
  std::vector<SiteView> civilians;
  std::optional<sim::TradeOffer> pending_trade;
  std::optional<sim::Vec2> hint;  // per recipient
  MapView map;

  const PlayerView* find(const std::string& id) const {
    for (const auto& p : players)
      if (p.id == id) return &p;
    return nullptr;
  }
  bool operator==(const ClientView&) const = default;
};

// Projection shared by every recipient; hint left empty.
ClientView make_view(const sim::GameState& state);
// Projection for one player, including that player's vaccine direction hint.
ClientView make_view(const sim::GameState& state, const sim::PlayerId& recipient);

}  // namespace coopvax::protocol
