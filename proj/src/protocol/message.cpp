#include "coopvax/protocol/message.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace coopvax::protocol {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using sim::Cell;
using sim::Vec2;

namespace {

constexpr std::array<std::string_view, 15> kErrorNames{
    "malformed_input", "unknown_type", "version_mismatch", "schema_violation", "room_exists",
    "room_not_found",  "room_full",    "name_taken",       "not_in_room",      "already_in_room",
    "already_started", "not_creator",  "unassigned_roles", "not_running",      "room_closed"};

[[noreturn]] void schema(const std::string& detail) { throw ProtocolError(ErrorCode::SchemaViolation, detail); }

// ---- strict reader --------------------------------------------------------

class Obj {
 public:
  Obj(const json& j, std::string path, std::initializer_list<std::string_view> required,
      std::initializer_list<std::string_view> optional = {})
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) schema(path_ + ": expected an object");
    for (const auto& [k, _] : j.items()) {
      const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                         std::find(optional.begin(), optional.end(), k) != optional.end();
      if (!known) schema(field(k) + ": unknown field");
    }
    for (auto k : required)
      if (!j.contains(k)) schema(field(k) + ": missing field");
  }

  bool has(std::string_view k) const { return j_.contains(k); }
  const json& at(std::string_view k) const { return j_.at(std::string(k)); }
  std::string field(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }

  std::string str(std::string_view k) const {
    const auto& v = at(k);
    if (!v.is_string()) schema(field(k) + ": expected a string");
    return v.get<std::string>();
  }
  bool boolean(std::string_view k) const {
    const auto& v = at(k);
    if (!v.is_boolean()) schema(field(k) + ": expected a boolean");
    return v.get<bool>();
  }
  std::int64_t integer(std::string_view k, std::int64_t lo = std::numeric_limits<int>::min(),
                       std::int64_t hi = std::numeric_limits<int>::max()) const {
    return as_integer(at(k), field(k), lo, hi);
  }
  std::uint64_t u64(std::string_view k) const {
    const auto& v = at(k);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    schema(field(k) + ": expected a non-negative integer");
  }
  double number(std::string_view k) const {
    const auto& v = at(k);
    if (!v.is_number()) schema(field(k) + ": expected a number");
    return v.get<double>();
  }
  const json& array(std::string_view k) const {
    const auto& v = at(k);
    if (!v.is_array()) schema(field(k) + ": expected an array");
    return v;
  }

  static std::int64_t as_integer(const json& v, const std::string& where, std::int64_t lo, std::int64_t hi) {
    std::int64_t n = 0;
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) schema(where + ": out of range");
      n = static_cast<std::int64_t>(u);
    } else if (v.is_number_integer()) {
      n = v.get<std::int64_t>();
    } else {
      schema(where + ": expected an integer");
    }
    if (n < lo || n > hi) schema(where + ": out of range");
    return n;
  }

 private:
  const json& j_;
  std::string path_;
};

sim::Role parse_role(const json& v, const std::string& where) {
  const auto r = v.is_string() ? sim::role_from_string(v.get<std::string>()) : std::nullopt;
  if (!r) schema(where + ": unknown role");
  return *r;
}

sim::PickupKind parse_pickup(const json& v, const std::string& where) {
  const auto k = v.is_string() ? sim::pickup_from_string(v.get<std::string>()) : std::nullopt;
  if (!k) schema(where + ": unknown pickup kind");
  return *k;
}

Cell parse_cell(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) schema(where + ": expected [x,y]");
  return {static_cast<int>(Obj::as_integer(v[0], where, std::numeric_limits<int>::min(), std::numeric_limits<int>::max())),
          static_cast<int>(Obj::as_integer(v[1], where, std::numeric_limits<int>::min(), std::numeric_limits<int>::max()))};
}

Vec2 parse_point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) schema(where + ": expected [x,y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Cell> parse_cells(const Obj& o, std::string_view k) {
  std::vector<Cell> out;
  const auto& arr = o.array(k);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_cell(arr[i], o.field(k) + "[" + std::to_string(i) + "]"));
  return out;
}

ojson cell(Cell c) { return ojson::array({c.x, c.y}); }
ojson point(Vec2 v) { return ojson::array({v.x, v.y}); }
ojson cells(const std::vector<Cell>& v) {
  ojson a = ojson::array();
  for (const auto& c : v) a.push_back(cell(c));
  return a;
}

// ---- commands -------------------------------------------------------------

ojson encode_command(const sim::PlayerCommand& c) {
  ojson j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, sim::cmd::Idle>) {
          j["kind"] = "idle";
        } else if constexpr (std::is_same_v<T, sim::cmd::Move>) {
          j["kind"] = "move";
          j["dx"] = v.dx;
          j["dy"] = v.dy;
        } else if constexpr (std::is_same_v<T, sim::cmd::Act>) {
          j["kind"] = "act";
        } else if constexpr (std::is_same_v<T, sim::cmd::UseSanitizer>) {
          j["kind"] = "use_sanitizer";
        } else if constexpr (std::is_same_v<T, sim::cmd::ProposeTrade>) {
          j["kind"] = "propose_trade";
          j["target"] = v.target;
          j["points"] = v.points;
          if (v.role) j["role"] = sim::to_string(*v.role);
        } else if constexpr (std::is_same_v<T, sim::cmd::RespondTrade>) {
          j["kind"] = "respond_trade";
          j["accept"] = v.accept;
        }
      },
      c);
  return j;
}

sim::PlayerCommand decode_command(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema(path + ".kind: missing or not a string");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "idle") {
    Obj o(j, path, {"kind"});
    return sim::cmd::Idle{};
  }
  if (kind == "move") {
    Obj o(j, path, {"kind", "dx", "dy"});
    return sim::cmd::Move{static_cast<int>(o.integer("dx", -1, 1)), static_cast<int>(o.integer("dy", -1, 1))};
  }
  if (kind == "act") {
    Obj o(j, path, {"kind"});
    return sim::cmd::Act{};
  }
  if (kind == "use_sanitizer") {
    Obj o(j, path, {"kind"});
    return sim::cmd::UseSanitizer{};
  }
  if (kind == "propose_trade") {
    Obj o(j, path, {"kind", "target", "points"}, {"role"});
    sim::cmd::ProposeTrade t{o.str("target"), static_cast<int>(o.integer("points", 0)), std::nullopt};
    if (o.has("role")) t.role = parse_role(o.at("role"), o.field("role"));
    return t;
  }
  if (kind == "respond_trade") {
    Obj o(j, path, {"kind", "accept"});
    return sim::cmd::RespondTrade{o.boolean("accept")};
  }
  schema(path + ".kind: unknown command '" + kind + "'");
}

// ---- events ---------------------------------------------------------------

ojson encode_event(const sim::GameEvent& e) {
  ojson j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        namespace ev = sim::ev;
        if constexpr (std::is_same_v<T, ev::PickupCollected>) {
          j["kind"] = "pickup_collected";
          j["player"] = v.player;
          j["pickup"] = sim::to_string(v.kind);
          j["cell"] = cell(v.cell);
        } else if constexpr (std::is_same_v<T, ev::PlayerInfected>) {
          j["kind"] = "player_infected";
          j["player"] = v.player;
          j["virus"] = v.virus_id;
          j["damage"] = v.damage;
          j["health"] = v.health;
        } else if constexpr (std::is_same_v<T, ev::VirusKilled>) {
          j["kind"] = "virus_killed";
          j["virus"] = v.virus_id;
          j["by"] = v.by;
        } else if constexpr (std::is_same_v<T, ev::VirusSpawned>) {
          j["kind"] = "virus_spawned";
          j["virus"] = v.virus_id;
          j["cell"] = cell(v.cell);
          j["strain"] = v.strain;
        } else if constexpr (std::is_same_v<T, ev::CivilianTreated>) {
          j["kind"] = "civilian_treated";
          j["player"] = v.player;
          j["cell"] = cell(v.cell);
        } else if constexpr (std::is_same_v<T, ev::CrowdDispersed>) {
          j["kind"] = "crowd_dispersed";
          j["player"] = v.player;
          j["cell"] = cell(v.cell);
        } else if constexpr (std::is_same_v<T, ev::PlayerHealed>) {
          j["kind"] = "player_healed";
          j["player"] = v.player;
          j["amount"] = v.amount;
          j["source"] = v.source == sim::HealSource::Camp ? "camp" : "vitamin";
        } else if constexpr (std::is_same_v<T, ev::SanitizerUsed>) {
          j["kind"] = "sanitizer_used";
          j["player"] = v.player;
        } else if constexpr (std::is_same_v<T, ev::ActionFailed>) {
          j["kind"] = "action_failed";
          j["player"] = v.player;
          j["reason"] = sim::to_string(v.reason);
        } else if constexpr (std::is_same_v<T, ev::TradeProposed>) {
          j["kind"] = "trade_proposed";
          j["from"] = v.from;
          j["to"] = v.to;
          j["points"] = v.points;
        } else if constexpr (std::is_same_v<T, ev::TradeCompleted>) {
          j["kind"] = "trade_completed";
          j["from"] = v.from;
          j["to"] = v.to;
          j["points"] = v.points;
        } else if constexpr (std::is_same_v<T, ev::TradeCancelled>) {
          j["kind"] = "trade_cancelled";
          j["from"] = v.from;
          j["to"] = v.to;
          j["expired"] = v.expired;
        } else if constexpr (std::is_same_v<T, ev::ConnectionChanged>) {
          j["kind"] = "connection_changed";
          j["player"] = v.player;
          j["connected"] = v.connected;
        } else if constexpr (std::is_same_v<T, ev::StageCleared>) {
          j["kind"] = "stage_cleared";
          j["stage"] = v.stage;
        } else if constexpr (std::is_same_v<T, ev::GameWon>) {
          j["kind"] = "game_won";
        } else if constexpr (std::is_same_v<T, ev::GameLost>) {
          j["kind"] = "game_lost";
          j["player"] = v.player;
          j["reason"] = v.reason == sim::LossReason::Health ? "health" : "disconnect";
        }
      },
      e);
  return j;
}

sim::GameEvent decode_event(const json& j, const std::string& path) {
  namespace ev = sim::ev;
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema(path + ".kind: missing or not a string");
  const auto kind = j["kind"].get<std::string>();
  const auto u32 = [](const Obj& o, std::string_view k) {
    return static_cast<std::uint32_t>(o.integer(k, 0, std::numeric_limits<std::uint32_t>::max()));
  };
  const auto small = [](const Obj& o, std::string_view k) { return static_cast<int>(o.integer(k)); };

  if (kind == "pickup_collected") {
    Obj o(j, path, {"kind", "player", "pickup", "cell"});
    return ev::PickupCollected{o.str("player"), parse_pickup(o.at("pickup"), o.field("pickup")),
                               parse_cell(o.at("cell"), o.field("cell"))};
  }
  if (kind == "player_infected") {
    Obj o(j, path, {"kind", "player", "virus", "damage", "health"});
    return ev::PlayerInfected{o.str("player"), u32(o, "virus"), o.number("damage"), o.number("health")};
  }
  if (kind == "virus_killed") {
    Obj o(j, path, {"kind", "virus", "by"});
    return ev::VirusKilled{u32(o, "virus"), o.str("by")};
  }
  if (kind == "virus_spawned") {
    Obj o(j, path, {"kind", "virus", "cell", "strain"});
    return ev::VirusSpawned{u32(o, "virus"), parse_cell(o.at("cell"), o.field("cell")), small(o, "strain")};
  }
  if (kind == "civilian_treated") {
    Obj o(j, path, {"kind", "player", "cell"});
    return ev::CivilianTreated{o.str("player"), parse_cell(o.at("cell"), o.field("cell"))};
  }
  if (kind == "crowd_dispersed") {
    Obj o(j, path, {"kind", "player", "cell"});
    return ev::CrowdDispersed{o.str("player"), parse_cell(o.at("cell"), o.field("cell"))};
  }
  if (kind == "player_healed") {
    Obj o(j, path, {"kind", "player", "amount", "source"});
    const auto src = o.str("source");
    if (src != "camp" && src != "vitamin") schema(o.field("source") + ": unknown heal source");
    return ev::PlayerHealed{o.str("player"), o.number("amount"),
                            src == "camp" ? sim::HealSource::Camp : sim::HealSource::Vitamin};
  }
  if (kind == "sanitizer_used") {
    Obj o(j, path, {"kind", "player"});
    return ev::SanitizerUsed{o.str("player")};
  }
  if (kind == "action_failed") {
    Obj o(j, path, {"kind", "player", "reason"});
    const auto r = sim::fail_reason_from_string(o.str("reason"));
    if (!r) schema(o.field("reason") + ": unknown reason");
    return ev::ActionFailed{o.str("player"), *r};
  }
  if (kind == "trade_proposed") {
    Obj o(j, path, {"kind", "from", "to", "points"});
    return ev::TradeProposed{o.str("from"), o.str("to"), small(o, "points")};
  }
  if (kind == "trade_completed") {
    Obj o(j, path, {"kind", "from", "to", "points"});
    return ev::TradeCompleted{o.str("from"), o.str("to"), small(o, "points")};
  }
  if (kind == "trade_cancelled") {
    Obj o(j, path, {"kind", "from", "to", "expired"});
    return ev::TradeCancelled{o.str("from"), o.str("to"), o.boolean("expired")};
  }
  if (kind == "connection_changed") {
    Obj o(j, path, {"kind", "player", "connected"});
    return ev::ConnectionChanged{o.str("player"), o.boolean("connected")};
  }
  if (kind == "stage_cleared") {
    Obj o(j, path, {"kind", "stage"});
    return ev::StageCleared{small(o, "stage")};
  }
  if (kind == "game_won") {
    Obj o(j, path, {"kind"});
    return ev::GameWon{};
  }
  if (kind == "game_lost") {
    Obj o(j, path, {"kind", "player", "reason"});
    const auto r = o.str("reason");
    if (r != "health" && r != "disconnect") schema(o.field("reason") + ": unknown loss reason");
    return ev::GameLost{o.str("player"), r == "health" ? sim::LossReason::Health : sim::LossReason::Disconnect};
  }
  schema(path + ".kind: unknown event '" + kind + "'");
}

// ---- client view ----------------------------------------------------------

ojson encode_trade(const std::optional<sim::TradeOffer>& t) {
  if (!t) return nullptr;
  ojson j;
  j["from"] = t->from;
  j["to"] = t->to;
  j["points"] = t->points;
  j["expires_at_tick"] = t->expires_at_tick;
  return j;
}

ojson encode_view(const ClientView& v) {
  ojson j;
  j["stage_index"] = v.stage_index;
  j["stage_count"] = v.stage_count;
  j["phase"] = sim::to_string(v.phase);
  j["strain_level"] = v.strain_level;
  j["team_vaccines"] = v.team_vaccines;
  j["vaccine_target"] = v.vaccine_target;
  j["vaccines_total"] = v.vaccines_total;
  ojson players = ojson::array();
  for (const auto& p : v.players) {
    ojson pj;
    pj["id"] = p.id;
    pj["role"] = sim::to_string(p.role);
    pj["pos"] = point(p.position);
    pj["health"] = p.health;
    pj["mask_meter"] = p.mask_meter;
    pj["sanitizer_count"] = p.sanitizer_count;
    pj["shield_ticks"] = p.shield_ticks;
    pj["ammo"] = p.ammo;
    pj["goal_progress"] = p.goal_progress;
    pj["goal_target"] = p.goal_target;
    pj["goal_waived"] = p.goal_waived;
    pj["score"] = p.score;
    pj["connected"] = p.connected;
    players.push_back(std::move(pj));
  }
  j["players"] = std::move(players);
  ojson viruses = ojson::array();
  for (const auto& x : v.viruses) viruses.push_back(ojson{{"id", x.id}, {"pos", point(x.position)}, {"strain", x.strain}});
  j["viruses"] = std::move(viruses);
  ojson pickups = ojson::array();
  for (const auto& p : v.pickups) pickups.push_back(ojson{{"kind", sim::to_string(p.kind)}, {"cell", cell(p.cell)}});
  j["pickups"] = std::move(pickups);
  ojson crowds = ojson::array();
  for (const auto& c : v.crowds) crowds.push_back(ojson{{"cell", cell(c.cell)}, {"dispersed", c.done}});
  j["crowds"] = std::move(crowds);
  ojson civilians = ojson::array();
  for (const auto& c : v.civilians) civilians.push_back(ojson{{"cell", cell(c.cell)}, {"treated", c.done}});
  j["civilians"] = std::move(civilians);
  j["pending_trade"] = encode_trade(v.pending_trade);
  j["hint"] = v.hint ? point(*v.hint) : ojson(nullptr);
  j["map"] = ojson{{"width", v.map.width}, {"height", v.map.height}, {"walls", cells(v.map.walls)},
                   {"camps", cells(v.map.camps)}};
  return j;
}

ClientView decode_view(const json& j, const std::string& path) {
  Obj o(j, path,
        {"stage_index", "stage_count", "phase", "strain_level", "team_vaccines", "vaccine_target", "vaccines_total",
         "players", "viruses", "pickups", "crowds", "civilians", "pending_trade", "hint", "map"});
  ClientView v;
  v.stage_index = static_cast<int>(o.integer("stage_index"));
  v.stage_count = static_cast<int>(o.integer("stage_count"));
  const auto phase = sim::phase_from_string(o.str("phase"));
  if (!phase) schema(o.field("phase") + ": unknown phase");
  v.phase = *phase;
  v.strain_level = static_cast<int>(o.integer("strain_level"));
  v.team_vaccines = static_cast<int>(o.integer("team_vaccines"));
  v.vaccine_target = static_cast<int>(o.integer("vaccine_target"));
  v.vaccines_total = static_cast<int>(o.integer("vaccines_total"));

  const auto& players = o.array("players");
  for (std::size_t i = 0; i < players.size(); ++i) {
    Obj p(players[i], o.field("players") + "[" + std::to_string(i) + "]",
          {"id", "role", "pos", "health", "mask_meter", "sanitizer_count", "shield_ticks", "ammo", "goal_progress",
           "goal_target", "goal_waived", "score", "connected"});
    PlayerView pv;
    pv.id = p.str("id");
    pv.role = parse_role(p.at("role"), p.field("role"));
    pv.position = parse_point(p.at("pos"), p.field("pos"));
    pv.health = p.number("health");
    pv.mask_meter = p.number("mask_meter");
    pv.sanitizer_count = static_cast<int>(p.integer("sanitizer_count"));
    pv.shield_ticks = static_cast<int>(p.integer("shield_ticks"));
    pv.ammo = static_cast<int>(p.integer("ammo"));
    pv.goal_progress = static_cast<int>(p.integer("goal_progress"));
    pv.goal_target = static_cast<int>(p.integer("goal_target"));
    pv.goal_waived = p.boolean("goal_waived");
    pv.score = static_cast<int>(p.integer("score"));
    pv.connected = p.boolean("connected");
    v.players.push_back(std::move(pv));
  }
  const auto& viruses = o.array("viruses");
  for (std::size_t i = 0; i < viruses.size(); ++i) {
    Obj x(viruses[i], o.field("viruses") + "[" + std::to_string(i) + "]", {"id", "pos", "strain"});
    v.viruses.push_back({static_cast<std::uint32_t>(x.integer("id", 0, std::numeric_limits<std::uint32_t>::max())),
                         parse_point(x.at("pos"), x.field("pos")), static_cast<int>(x.integer("strain"))});
  }
  const auto& pickups = o.array("pickups");
  for (std::size_t i = 0; i < pickups.size(); ++i) {
    Obj x(pickups[i], o.field("pickups") + "[" + std::to_string(i) + "]", {"kind", "cell"});
    v.pickups.push_back({parse_pickup(x.at("kind"), x.field("kind")), parse_cell(x.at("cell"), x.field("cell"))});
  }
  const auto sites = [&](std::string_view key, const char* flag, std::vector<SiteView>& out) {
    const auto& arr = o.array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj x(arr[i], o.field(key) + "[" + std::to_string(i) + "]", {"cell", flag});
      out.push_back({parse_cell(x.at("cell"), x.field("cell")), x.boolean(flag)});
    }
  };
  sites("crowds", "dispersed", v.crowds);
  sites("civilians", "treated", v.civilians);

  if (!o.at("pending_trade").is_null()) {
    Obj t(o.at("pending_trade"), o.field("pending_trade"), {"from", "to", "points", "expires_at_tick"});
    v.pending_trade = sim::TradeOffer{t.str("from"), t.str("to"), static_cast<int>(t.integer("points")), t.u64("expires_at_tick")};
  }
  if (!o.at("hint").is_null()) v.hint = parse_point(o.at("hint"), o.field("hint"));

  Obj m(o.at("map"), o.field("map"), {"width", "height", "walls", "camps"});
  v.map.width = static_cast<int>(m.integer("width"));
  v.map.height = static_cast<int>(m.integer("height"));
  v.map.walls = parse_cells(m, "walls");
  v.map.camps = parse_cells(m, "camps");
  return v;
}

// ---- validation shared by encode and decode -------------------------------

void check_name(const std::string& name, const char* field) {
  if (!valid_name(name)) schema(std::string(field) + ": names are 1-32 characters from [A-Za-z0-9_-]");
}

bool finite_view(const ClientView& v) {
  const auto ok = [](double d) { return std::isfinite(d); };
  for (const auto& p : v.players)
    if (!ok(p.position.x) || !ok(p.position.y) || !ok(p.health) || !ok(p.mask_meter)) return false;
  for (const auto& x : v.viruses)
    if (!ok(x.position.x) || !ok(x.position.y)) return false;
  return !v.hint || (ok(v.hint->x) && ok(v.hint->y));
}

void validate(const Message& msg) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CreateRoom> || std::is_same_v<T, JoinRoom>) {
          check_name(m.room_name, "room_name");
          check_name(m.player_name, "player_name");
        } else if constexpr (std::is_same_v<T, Chat>) {
          const auto n = utf8_length(m.text);
          if (n == 0 || n > kMaxChatLength) schema("text: chat messages are 1-512 characters");
        } else if constexpr (std::is_same_v<T, ChatRelay>) {
          check_name(m.player_name, "player_name");
          const auto n = utf8_length(m.text);
          if (n == 0 || n > kMaxChatLength) schema("text: chat messages are 1-512 characters");
        } else if constexpr (std::is_same_v<T, RoomState>) {
          check_name(m.room_name, "room_name");
          if (m.members.size() > 4) schema("members: at most four members");
          for (const auto& mem : m.members) check_name(mem.player_name, "members.player_name");
        } else if constexpr (std::is_same_v<T, AvatarRejected>) {
          if (m.reason.empty()) schema("reason: must not be empty");
        } else if constexpr (std::is_same_v<T, Snapshot>) {
          if (!finite_view(m.view)) schema("view: numbers must be finite");
        } else if constexpr (std::is_same_v<T, Event>) {
          const bool finite = std::visit(
              [](const auto& e) {
                using E = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<E, sim::ev::PlayerInfected>) {
                  return std::isfinite(e.damage) && std::isfinite(e.health);
                } else if constexpr (std::is_same_v<E, sim::ev::PlayerHealed>) {
                  return std::isfinite(e.amount);
                } else {
                  return true;
                }
              },
              m.event);
          if (!finite) schema("event: numbers must be finite");
        } else if constexpr (std::is_same_v<T, GameOver>) {
          if (m.reason != "cleared" && m.reason != "health" && m.reason != "disconnect")
            schema("reason: expected cleared, health or disconnect");
        }
      },
      msg);
}

// Rejects documents nested deeper than kMaxNesting before handing them to the parser.
bool nesting_ok(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (char c : s) {
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      if (++depth > kMaxNesting) return false;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(ErrorCode c) { return kErrorNames[static_cast<std::size_t>(c)]; }

std::optional<ErrorCode> error_code_from_string(std::string_view s) {
  const auto it = std::find(kErrorNames.begin(), kErrorNames.end(), s);
  if (it == kErrorNames.end()) return std::nullopt;
  return static_cast<ErrorCode>(it - kErrorNames.begin());
}

bool valid_name(std::string_view name) {
  if (name.empty() || name.size() > kMaxNameLength) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string_view type_name(const Message& msg) {
  static constexpr std::array<std::string_view, std::variant_size_v<Message>> kNames{
      "create_room", "join_room", "select_avatar", "start_game", "input", "chat",      "leave_room",
      "room_state",  "avatar_rejected", "snapshot", "event",     "chat_relay", "error", "game_over"};
  return kNames[msg.index()];
}

std::string encode(const Message& msg) {
  validate(msg);
  ojson j;
  j["v"] = kVersion;
  j["type"] = type_name(msg);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CreateRoom> || std::is_same_v<T, JoinRoom>) {
          j["room_name"] = m.room_name;
          j["player_name"] = m.player_name;
        } else if constexpr (std::is_same_v<T, SelectAvatar>) {
          j["role"] = sim::to_string(m.role);
        } else if constexpr (std::is_same_v<T, Input>) {
          j["command"] = encode_command(m.command);
        } else if constexpr (std::is_same_v<T, Chat>) {
          j["text"] = m.text;
        } else if constexpr (std::is_same_v<T, RoomState>) {
          j["room_name"] = m.room_name;
          ojson members = ojson::array();
          for (const auto& mem : m.members) {
            ojson mj;
            mj["player_name"] = mem.player_name;
            mj["role"] = mem.role ? ojson(sim::to_string(*mem.role)) : ojson(nullptr);
            mj["is_creator"] = mem.is_creator;
            members.push_back(std::move(mj));
          }
          j["members"] = std::move(members);
          j["started"] = m.started;
        } else if constexpr (std::is_same_v<T, AvatarRejected>) {
          j["reason"] = m.reason;
        } else if constexpr (std::is_same_v<T, Snapshot>) {
          j["tick"] = m.tick;
          j["view"] = encode_view(m.view);
        } else if constexpr (std::is_same_v<T, Event>) {
          j["tick"] = m.tick;
          j["event"] = encode_event(m.event);
        } else if constexpr (std::is_same_v<T, ChatRelay>) {
          j["player_name"] = m.player_name;
          j["text"] = m.text;
        } else if constexpr (std::is_same_v<T, Error>) {
          j["code"] = to_string(m.code);
          j["detail"] = m.detail;
        } else if constexpr (std::is_same_v<T, GameOver>) {
          j["won"] = m.won;
          j["reason"] = m.reason;
          ojson scores = ojson::array();
          for (const auto& s : m.final_scores) scores.push_back(ojson{{"player_name", s.player_name}, {"score", s.score}});
          j["final_scores"] = std::move(scores);
        }
      },
      msg);
  try {
    return j.dump();
  } catch (const nlohmann::json::type_error& e) {
    schema(std::string("text is not valid UTF-8: ") + e.what());
  }
}

Message decode(std::string_view bytes) {
  if (bytes.size() > kMaxFrameBytes) throw ProtocolError(ErrorCode::MalformedInput, "frame too large");
  if (!nesting_ok(bytes)) throw ProtocolError(ErrorCode::MalformedInput, "document nested too deeply");
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw ProtocolError(ErrorCode::MalformedInput, e.what());
  }
  if (!j.is_object()) throw ProtocolError(ErrorCode::MalformedInput, "expected a JSON object");

  try {
    if (!j.contains("v")) schema("v: missing protocol version");
    if (!j["v"].is_number_integer()) schema("v: expected an integer");
    if (j["v"].get<std::int64_t>() != kVersion || (j["v"].is_number_unsigned() && j["v"].get<std::uint64_t>() != kVersion))
      throw ProtocolError(ErrorCode::VersionMismatch, "unsupported protocol version");
    if (!j.contains("type") || !j["type"].is_string()) schema("type: missing or not a string");
    const auto type = j["type"].get<std::string>();

    Message out;
    if (type == "create_room" || type == "join_room") {
      Obj o(j, "", {"v", "type", "room_name", "player_name"});
      if (type == "create_room") {
        out = CreateRoom{o.str("room_name"), o.str("player_name")};
      } else {
        out = JoinRoom{o.str("room_name"), o.str("player_name")};
      }
    } else if (type == "select_avatar") {
      Obj o(j, "", {"v", "type", "role"});
      out = SelectAvatar{parse_role(o.at("role"), "role")};
    } else if (type == "start_game") {
      Obj o(j, "", {"v", "type"});
      out = StartGame{};
    } else if (type == "input") {
      Obj o(j, "", {"v", "type", "command"});
      out = Input{decode_command(o.at("command"), "command")};
    } else if (type == "chat") {
      Obj o(j, "", {"v", "type", "text"});
      out = Chat{o.str("text")};
    } else if (type == "leave_room") {
      Obj o(j, "", {"v", "type"});
      out = LeaveRoom{};
    } else if (type == "room_state") {
      Obj o(j, "", {"v", "type", "room_name", "members", "started"});
      RoomState rs{o.str("room_name"), {}, o.boolean("started")};
      const auto& members = o.array("members");
      for (std::size_t i = 0; i < members.size(); ++i) {
        Obj m(members[i], "members[" + std::to_string(i) + "]", {"player_name", "role", "is_creator"});
        Member mem{m.str("player_name"), std::nullopt, m.boolean("is_creator")};
        if (!m.at("role").is_null()) mem.role = parse_role(m.at("role"), m.field("role"));
        rs.members.push_back(std::move(mem));
      }
      out = std::move(rs);
    } else if (type == "avatar_rejected") {
      Obj o(j, "", {"v", "type", "reason"});
      out = AvatarRejected{o.str("reason")};
    } else if (type == "snapshot") {
      Obj o(j, "", {"v", "type", "tick", "view"});
      out = Snapshot{o.u64("tick"), decode_view(o.at("view"), "view")};
    } else if (type == "event") {
      Obj o(j, "", {"v", "type", "tick", "event"});
      out = Event{o.u64("tick"), decode_event(o.at("event"), "event")};
    } else if (type == "chat_relay") {
      Obj o(j, "", {"v", "type", "player_name", "text"});
      out = ChatRelay{o.str("player_name"), o.str("text")};
    } else if (type == "error") {
      Obj o(j, "", {"v", "type", "code", "detail"});
      const auto code = error_code_from_string(o.str("code"));
      if (!code) schema("code: unknown error code");
      out = Error{*code, o.str("detail")};
    } else if (type == "game_over") {
      Obj o(j, "", {"v", "type", "won", "reason", "final_scores"});
      GameOver go{o.boolean("won"), o.str("reason"), {}};
      const auto& scores = o.array("final_scores");
      for (std::size_t i = 0; i < scores.size(); ++i) {
        Obj s(scores[i], "final_scores[" + std::to_string(i) + "]", {"player_name", "score"});
        go.final_scores.push_back({s.str("player_name"), static_cast<int>(s.integer("score"))});
      }
      out = std::move(go);
    } else {
      throw ProtocolError(ErrorCode::UnknownType, "unknown message type '" + type + "'");
    }
    validate(out);
    return out;
  } catch (const json::exception& e) {
    schema(e.what());
  }
}

}  // namespace coopvax::protocol
