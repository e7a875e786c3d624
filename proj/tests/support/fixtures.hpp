#pragma once

#include <memory>
#include <string>
#include <vector>

#include "coopvax/sim/game.hpp"
#include "coopvax/sim/types.hpp"

namespace coopvax::testing {

// Small open map with four spawns along the top row and one vaccine part in the far corner.
sim::StageSpec blank_stage(int width = 10, int height = 10, int index = 1);

// Bundled campaign from the source tree.
std::shared_ptr<const sim::Campaign> bundled_campaign();

std::vector<sim::RosterEntry> roster_of(const std::vector<sim::Role>& roles);

// Stage 1 of the bundled campaign with every virus and crowd removed and each
// vaccine part walled in, so nothing can hurt or finish a game.
sim::StageSpec quiet_stage();

template <class E>
std::size_t count_events(const std::vector<sim::GameEvent>& events) {
  std::size_t n = 0;
  for (const auto& e : events) n += std::holds_alternative<E>(e) ? 1 : 0;
  return n;
}

template <class E>
const E* first_event(const std::vector<sim::GameEvent>& events) {
  for (const auto& e : events)
    if (const auto* x = std::get_if<E>(&e)) return x;
  return nullptr;
}

}  // namespace coopvax::testing
