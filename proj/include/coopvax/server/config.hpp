#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace coopvax::server {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
};

// "host:port" or ":port" or "port".
Endpoint parse_endpoint(const std::string& text);

struct ServerConfig {
  std::optional<Endpoint> ws_listen = Endpoint{"0.0.0.0", 8080};
  std::optional<Endpoint> tcp_listen = Endpoint{"0.0.0.0", 7070};
  int tick_rate = 20;
  int snapshot_rate = 10;
  double grace_secs = 60.0;
  double room_idle_secs = 1800.0;  // lobby rooms that never start are closed after this
  std::filesystem::path stages_dir;
  std::filesystem::path log_path;      // empty: stderr
  std::filesystem::path results_path = "results.jsonl";
  bool lockstep = false;
  std::optional<std::uint64_t> seed;   // first game's seed; later games count up from it
  int threads = 2;

  // Throws std::invalid_argument when rates are non-positive or snapshot_rate > tick_rate.
  void validate() const;

  int snapshot_interval_ticks() const { return lockstep ? 1 : tick_rate / snapshot_rate; }
};

}  // namespace coopvax::server
