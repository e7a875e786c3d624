#pragma once

#include <cstdint>
#include <memory>

#include "coopvax/server/config.hpp"
#include "coopvax/server/room.hpp"
#include "coopvax/sim/types.hpp"

namespace coopvax::server {

// Owns the io threads, listeners, tick timers and the room hub.
class Server {
 public:
  // Loads the campaign from config.stages_dir (or the default stages directory).
  explicit Server(ServerConfig config);
  Server(ServerConfig config, sim::Campaign campaign);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the listeners and starts the worker threads; returns immediately.
  void start();
  void stop();
  // start(), then block until SIGINT/SIGTERM.
  void run();

  std::uint16_t ws_port() const;
  std::uint16_t tcp_port() const;
  Hub& hub();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coopvax::server
