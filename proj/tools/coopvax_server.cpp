#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "coopvax/maps/stage_io.hpp"
#include "coopvax/server/server.hpp"

int main(int argc, char** argv) {
  using namespace coopvax;
  CLI::App app{"coopvax-server: hosts cooperative game rooms over WebSocket and TCP"};

  server::ServerConfig cfg;
  std::string ws = "0.0.0.0:8080";
  std::string tcp = "0.0.0.0:7070";
  std::string stages;
  std::string log_path;
  std::string results = cfg.results_path.string();
  std::uint64_t seed = 0;

  app.add_option("--listen", ws, "WebSocket listen address (host:port, endpoint /ws); 'off' disables");
  app.add_option("--tcp-listen", tcp, "newline-delimited TCP listen address; 'off' disables");
  app.add_option("--stages-dir", stages, "directory of stage_<n>.json files")->envname("COOPVAX_STAGES");
  app.add_option("--tick-rate", cfg.tick_rate, "simulation ticks per second")->capture_default_str();
  app.add_option("--snapshot-rate", cfg.snapshot_rate, "snapshots per second")->capture_default_str();
  app.add_option("--grace-secs", cfg.grace_secs, "reconnect window before a disconnect loses the game")
      ->capture_default_str();
  app.add_option("--idle-secs", cfg.room_idle_secs, "close lobby rooms that never start after this long")
      ->capture_default_str();
  app.add_option("--log", log_path, "structured JSON-lines log file (default: stderr)");
  app.add_option("--results", results, "append-only game results file")->capture_default_str();
  app.add_flag("--lockstep", cfg.lockstep, "advance a tick only when every connected player has sent input");
  auto* seed_opt = app.add_option("--seed", seed, "seed for the first game (later games count up); random if unset");
  app.add_option("--threads", cfg.threads, "io worker threads")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.ws_listen = ws == "off" ? std::nullopt : std::optional(server::parse_endpoint(ws));
    cfg.tcp_listen = tcp == "off" ? std::nullopt : std::optional(server::parse_endpoint(tcp));
    cfg.stages_dir = stages.empty() ? maps::default_stages_dir() : std::filesystem::path(stages);
    cfg.log_path = log_path;
    cfg.results_path = results;
    if (*seed_opt) cfg.seed = seed;
    server::Server srv(cfg);
    srv.run();
  } catch (const maps::MapError& e) {
    std::cerr << "coopvax-server: " << e.what() << '\n';
    for (const auto& issue : e.issues()) std::cerr << "  " << issue.field << ": " << issue.message << '\n';
    return EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "coopvax-server: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
