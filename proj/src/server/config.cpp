#include "coopvax/server/config.hpp"

namespace coopvax::server {

Endpoint parse_endpoint(const std::string& text) {
  Endpoint ep;
  const auto colon = text.rfind(':');
  const std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
  if (colon != std::string::npos && colon > 0) ep.host = text.substr(0, colon);
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(port, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad endpoint '" + text + "'");
  }
  if (used != port.size() || value > 65535) throw std::invalid_argument("bad endpoint '" + text + "'");
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

void ServerConfig::validate() const {
  if (tick_rate <= 0 || snapshot_rate <= 0) throw std::invalid_argument("rates must be positive");
  if (snapshot_rate > tick_rate) throw std::invalid_argument("snapshot rate must not exceed tick rate");
  if (grace_secs < 0 || room_idle_secs <= 0) throw std::invalid_argument("timeouts must be positive");
  if (threads <= 0) throw std::invalid_argument("thread count must be positive");
}

}  // namespace coopvax::server
