#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coopvax/protocol/view.hpp"
#include "coopvax/rng.hpp"
#include "coopvax/sim/types.hpp"

namespace coopvax::bots {

enum class PolicyKind { Greedy, Random, Scripted };
std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> policy_from_string(std::string_view s);

struct ScriptStep {
  std::uint64_t tick = 0;
  sim::PlayerCommand command;
};

// Independent per-slot stream so adding a bot never shifts another bot's draws.
std::uint64_t policy_seed(std::uint64_t game_seed, std::size_t slot);

// A bot's decision procedure. decide() depends only on the view, the tick
// and the bot's own state (RNG plus steering memory), so equal seeds give
// equal command streams.
class Bot {
 public:
  static Bot greedy(std::uint64_t seed);
  static Bot random_walker(std::uint64_t seed);
  static Bot scripted(std::vector<ScriptStep> script);
  static Bot make(PolicyKind kind, std::uint64_t seed, std::vector<ScriptStep> script = {});

  PolicyKind kind() const { return kind_; }

  sim::PlayerCommand decide(const protocol::ClientView& view, const sim::PlayerId& self, std::uint64_t tick);

 private:
  explicit Bot(PolicyKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  sim::PlayerCommand decide_greedy(const protocol::ClientView& view, const protocol::PlayerView& me);
  sim::PlayerCommand decide_random();
  sim::PlayerCommand decide_scripted(std::uint64_t tick);
  sim::PlayerCommand steer(const protocol::PlayerView& me, sim::Vec2 target);
  sim::PlayerCommand flee(const protocol::ClientView& view, const protocol::PlayerView& me);

  PolicyKind kind_;
  Rng rng_;
  std::vector<ScriptStep> script_;
  std::size_t script_pos_ = 0;

  // greedy
  bool healing_ = false;
  std::optional<sim::Vec2> last_position_;
  bool last_was_move_ = false;
  int stuck_ticks_ = 0;
  int detour_left_ = 0;
  int detour_dx_ = 0;
  int detour_dy_ = 0;
  int flee_left_ = 0;
  int flee_dx_ = 0;
  int flee_dy_ = 0;

  // random walker
  int walk_left_ = 0;
  int walk_dx_ = 0;
  int walk_dy_ = 0;
};

}  // namespace coopvax::bots
