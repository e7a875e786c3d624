#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coopvax/bots/policy.hpp"
#include "coopvax/bots/report.hpp"
#include "coopvax/sim/types.hpp"

namespace coopvax::bots {

struct BotSpec {
  PolicyKind policy = PolicyKind::Greedy;
  sim::Role role = sim::Role::Citizen;
  std::vector<ScriptStep> script;  // Scripted only
};

// Player id used for roster slot `slot` in both headless and networked runs.
std::string bot_name(std::size_t slot);

// Slot i gets the i-th role of kAllRoles unless `roles` overrides it.
std::vector<BotSpec> make_specs(const std::vector<PolicyKind>& policies, const std::vector<sim::Role>& roles = {});

struct HeadlessConfig {
  std::shared_ptr<const sim::Campaign> campaign;
  std::vector<BotSpec> bots;  // 1..4
  std::uint64_t seed = 0;
  int repetitions = 1;
  std::uint64_t max_ticks = 60'000;  // per game; reaching it reports "timeout"
};

// One game on `seed`, driving the sim directly.
GameReport run_game(const HeadlessConfig& config, std::uint64_t seed);

// Repetition r uses seed + r. Games run in parallel; the result is identical to the serial run.
RunReport run_headless(const HeadlessConfig& config);
RunReport run_headless_serial(const HeadlessConfig& config);

}  // namespace coopvax::bots
