#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopvax/sim/types.hpp"

namespace coopvax::bots {

struct PlayerSummary {
  std::string id;
  sim::Role role = sim::Role::Citizen;  // role held at the end (trades can change it)
  int score = 0;
  int infections = 0;
  bool operator==(const PlayerSummary&) const = default;
};

struct GameReport {
  std::uint64_t seed = 0;
  std::string outcome;  // "won", "lost" or "timeout"
  std::string reason;   // "cleared", "health", "disconnect" or "max_ticks"
  std::uint64_t ticks = 0;
  int stage_reached = 1;
  std::vector<std::uint64_t> stage_clear_ticks;  // absolute tick of each StageCleared
  std::vector<PlayerSummary> players;
  std::array<int, sim::kPickupKindCount> pickups{};  // collected, by kind
  int infections = 0;
  int viruses_killed = 0;
  std::optional<std::string> final_state_hash;  // hex; headless only
  bool operator==(const GameReport&) const = default;
};

// Folds a game's event stream into a GameReport. The same builder serves the
// headless runner (sim events) and networked bots (Event messages).
class ReportBuilder {
 public:
  ReportBuilder(std::uint64_t seed, const std::vector<std::pair<std::string, sim::Role>>& roster);

  void record(std::uint64_t tick, const sim::GameEvent& event);
  void set_ticks(std::uint64_t tick) { report_.ticks = std::max(report_.ticks, tick); }
  void set_stage(int stage) { report_.stage_reached = stage; }
  void set_final(const std::string& outcome, const std::string& reason) {
    report_.outcome = outcome;
    report_.reason = reason;
  }
  void set_role(const std::string& id, sim::Role role);
  void set_score(const std::string& id, int score);
  void set_hash(std::uint64_t hash);

  const GameReport& report() const { return report_; }

 private:
  PlayerSummary* find(const std::string& id);
  GameReport report_;
};

struct Aggregate {
  int games = 0;
  int wins = 0;
  double win_rate = 0.0;
  // Mean ticks spent on stage k (index k-1) over games that cleared it.
  std::vector<double> mean_ticks_per_stage;
  std::vector<int> clears_per_stage;
};

Aggregate aggregate(const std::vector<GameReport>& games, int stage_count);

struct RunReport {
  std::string mode;  // "headless" or "networked"
  std::vector<std::string> policies;
  std::vector<std::string> roles;
  std::uint64_t seed = 0;
  int repetitions = 0;
  int stage_count = 0;
  std::vector<GameReport> games;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();  // mode-specific details
};

nlohmann::ordered_json to_json(const GameReport& g);
nlohmann::ordered_json to_json(const RunReport& r);
// Stable two-space indented text with a trailing newline.
std::string render(const RunReport& r);

}  // namespace coopvax::bots
