#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coopvax/protocol/view.hpp"
#include "coopvax/sim/types.hpp"

namespace coopvax::protocol {

inline constexpr int kVersion = 1;
inline constexpr std::size_t kMaxNameLength = 32;
inline constexpr std::size_t kMaxChatLength = 512;  // code points
inline constexpr std::size_t kMaxFrameBytes = 1 << 20;
inline constexpr int kMaxNesting = 32;

enum class ErrorCode {
  MalformedInput,
  UnknownType,
  VersionMismatch,
  SchemaViolation,
  RoomExists,
  RoomNotFound,
  RoomFull,
  NameTaken,
  NotInRoom,
  AlreadyInRoom,
  AlreadyStarted,
  NotCreator,
  UnassignedRoles,
  NotRunning,
  RoomClosed,
};
std::string_view to_string(ErrorCode c);
std::optional<ErrorCode> error_code_from_string(std::string_view s);

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& detail) : std::runtime_error(detail), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// ---- client -> server -----------------------------------------------------

struct CreateRoom {
  std::string room_name;
  std::string player_name;
  bool operator==(const CreateRoom&) const = default;
};
struct JoinRoom {
  std::string room_name;
  std::string player_name;
  bool operator==(const JoinRoom&) const = default;
};
struct SelectAvatar {
  sim::Role role = sim::Role::Citizen;
  bool operator==(const SelectAvatar&) const = default;
};
struct StartGame {
  bool operator==(const StartGame&) const = default;
};
struct Input {
  sim::PlayerCommand command;
  bool operator==(const Input&) const = default;
};
struct Chat {
  std::string text;
  bool operator==(const Chat&) const = default;
};
struct LeaveRoom {
  bool operator==(const LeaveRoom&) const = default;
};

// ---- server -> client -----------------------------------------------------

struct Member {
  std::string player_name;
  std::optional<sim::Role> role;
  bool is_creator = false;
  bool operator==(const Member&) const = default;
};
struct RoomState {
  std::string room_name;
  std::vector<Member> members;
  bool started = false;
  bool operator==(const RoomState&) const = default;
};
struct AvatarRejected {
  std::string reason;
  bool operator==(const AvatarRejected&) const = default;
};
struct Snapshot {
  std::uint64_t tick = 0;
  ClientView view;
  bool operator==(const Snapshot&) const = default;
};
struct Event {
  std::uint64_t tick = 0;
  sim::GameEvent event;
  bool operator==(const Event&) const = default;
};
struct ChatRelay {
  std::string player_name;
  std::string text;
  bool operator==(const ChatRelay&) const = default;
};
struct Error {
  ErrorCode code = ErrorCode::SchemaViolation;
  std::string detail;
  bool operator==(const Error&) const = default;
};
struct FinalScore {
  std::string player_name;
  int score = 0;
  bool operator==(const FinalScore&) const = default;
};
// reason: "cleared", "health" or "disconnect"
struct GameOver {
  bool won = false;
  std::string reason;
  std::vector<FinalScore> final_scores;
  bool operator==(const GameOver&) const = default;
};

using Message = std::variant<CreateRoom, JoinRoom, SelectAvatar, StartGame, Input, Chat, LeaveRoom, RoomState,
                             AvatarRejected, Snapshot, Event, ChatRelay, Error, GameOver>;

std::string_view type_name(const Message& msg);

// Canonical single-line JSON. Throws ProtocolError(SchemaViolation) for invalid messages.
std::string encode(const Message& msg);

// Strict parse; throws ProtocolError with MalformedInput, UnknownType,
// VersionMismatch or SchemaViolation.
Message decode(std::string_view bytes);

bool valid_name(std::string_view name);
std::size_t utf8_length(std::string_view s);

}  // namespace coopvax::protocol
