#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopvax/bots/headless.hpp"
#include "coopvax/protocol/message.hpp"

namespace coopvax::bots {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FaultMode {
  None,
  Garbage,  // the fault slot sends one undecodable frame at fault_tick
  Kill,     // the fault slot drops its connection at fault_tick and never returns
};

struct NetworkedConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7070;
  std::string room = "bots";
  std::vector<BotSpec> bots;
  // Bots derive their policy streams from this seed; run the server with the
  // same --seed to line a lockstep game up with a headless one.
  std::uint64_t seed = 0;
  FaultMode fault = FaultMode::None;
  std::size_t fault_slot = 0;
  std::uint64_t fault_tick = 100;
  std::chrono::milliseconds io_timeout{30'000};
  std::uint64_t max_ticks = 60'000;  // bots stop sending input past this tick
  // Bots hang up after this much play time even if the game is still running.
  std::optional<std::chrono::milliseconds> max_duration;
};

// What one bot saw over its connection.
struct ClientOutcome {
  std::string player;
  bool game_over = false;
  bool won = false;
  std::string reason;
  std::vector<protocol::FinalScore> final_scores;
  std::vector<int> stages_cleared;
  std::uint64_t last_tick = 0;
  int stage_count = 0;  // from the snapshots
  std::uint64_t snapshots = 0;
  double observed_tick_rate = 0.0;  // ticks per second between the first and last snapshot
  int errors = 0;
  bool fault_injected = false;
  bool fault_answered = false;  // got an Error after the garbage frame
  bool killed = false;
  GameReport observed;
};

struct NetworkedResult {
  RunReport report;  // games[0] is bot0's view (or the first surviving bot's)
  std::vector<ClientOutcome> clients;
  bool outcomes_identical = false;  // across every client that was not killed
};

// Connects one TCP client per bot, walks the lobby (create, join, select, start)
// and plays until GameOver. Throws NetworkError on connect/lobby failures.
NetworkedResult run_networked(const NetworkedConfig& config);

}  // namespace coopvax::bots
