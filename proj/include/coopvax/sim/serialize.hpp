#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "coopvax/sim/types.hpp"

namespace coopvax::sim {

// Canonical JSON dump of everything that influences future ticks (the campaign
// itself is referenced by stage index). Equal states give byte-equal output.
std::string serialize_state(const GameState& state);

std::uint64_t fnv1a64(std::string_view bytes);

inline std::uint64_t state_hash(const GameState& state) { return fnv1a64(serialize_state(state)); }

}  // namespace coopvax::sim
