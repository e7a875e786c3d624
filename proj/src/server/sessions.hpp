#pragma once

#include <memory>

#include <boost/asio/ip/tcp.hpp>

#include "coopvax/server/room.hpp"

namespace coopvax::server {

// Newline-delimited JSON over a plain TCP socket.
PeerPtr start_tcp_session(boost::asio::ip::tcp::socket socket, std::shared_ptr<Hub> hub);

// HTTP upgrade on /ws, then one JSON document per text frame.
PeerPtr start_ws_session(boost::asio::ip::tcp::socket socket, std::shared_ptr<Hub> hub);

}  // namespace coopvax::server
