#include "coopvax/maps/stage_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coopvax::maps {

using sim::Cell;
using sim::Role;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

MapError::MapError(MapErrc code, std::string what, std::vector<FieldIssue> issues)
    : std::runtime_error(std::move(what)), code_(code), issues_(std::move(issues)) {}

namespace {

std::string describe(const std::vector<FieldIssue>& issues) {
  std::string out;
  for (const auto& i : issues) out += "\n  " + i.field + ": " + i.message;
  return out;
}

std::string cell_text(Cell c) { return "cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

// Reads the document into a StageSpec, collecting shape problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<FieldIssue>& issues) : issues_(issues) {}

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      issue(path, "expected an object");
      return;
    }
    for (const auto& [k, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
        issue(path.empty() ? k : path + "." + k, "unknown field");
    }
    for (const char* a : allowed)
      if (!obj.contains(a)) issue(path.empty() ? a : path + "." + a, "missing field");
  }

  int integer(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return 0;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
      issue(path, "expected an integer");
      return 0;
    }
    const auto n = v.get<long long>();
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
      issue(path, "integer out of range");
      return 0;
    }
    return static_cast<int>(n);
  }

  std::vector<Cell> cells(const json& obj, const char* key) {
    std::vector<Cell> out;
    if (!obj.contains(key)) return out;
    const auto& arr = obj.at(key);
    if (!arr.is_array()) {
      issue(key, "expected an array of [x,y]");
      return out;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto path = std::string(key) + "[" + std::to_string(i) + "]";
      const auto& e = arr[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        issue(path, "expected [x,y] integers");
        continue;
      }
      out.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return out;
  }

  void issue(std::string field, std::string message) { issues_.push_back({std::move(field), std::move(message)}); }

 private:
  std::vector<FieldIssue>& issues_;
};

}  // namespace

sim::StageSpec parse_stage(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw MapError(MapErrc::ParseError, origin + ": " + e.what());
  }

  std::vector<FieldIssue> issues;
  Reader r(issues);
  r.keys(doc, "",
         {"stage_index", "strain_level", "vaccine_target", "goals", "grid", "walls", "spawns", "camps", "pickups",
          "viruses", "crowds", "civilians"});
  if (!doc.is_object()) throw MapError(MapErrc::ValidationError, origin + ": invalid stage" + describe(issues), issues);

  sim::StageSpec st;
  st.stage_index = r.integer(doc, "stage_index", "stage_index");
  st.strain_level = r.integer(doc, "strain_level", "strain_level");
  st.vaccine_target = r.integer(doc, "vaccine_target", "vaccine_target");

  if (doc.contains("goals")) {
    const auto& g = doc["goals"];
    r.keys(g, "goals", {"grocery", "treat", "disinfect", "crowd"});
    st.goals[sim::index_of(Role::Citizen)] = r.integer(g, "grocery", "goals.grocery");
    st.goals[sim::index_of(Role::Doctor)] = r.integer(g, "treat", "goals.treat");
    st.goals[sim::index_of(Role::SanitationWorker)] = r.integer(g, "disinfect", "goals.disinfect");
    st.goals[sim::index_of(Role::LawEnforcer)] = r.integer(g, "crowd", "goals.crowd");
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    r.keys(g, "grid", {"width", "height"});
    st.map.width = r.integer(g, "width", "grid.width");
    st.map.height = r.integer(g, "height", "grid.height");
  }
  st.map.walls = r.cells(doc, "walls");
  st.map.spawns = r.cells(doc, "spawns");
  st.map.camps = r.cells(doc, "camps");
  st.map.crowds = r.cells(doc, "crowds");
  st.map.civilians = r.cells(doc, "civilians");

  if (doc.contains("pickups")) {
    const auto& arr = doc["pickups"];
    if (!arr.is_array()) r.issue("pickups", "expected an array");
    for (std::size_t i = 0; arr.is_array() && i < arr.size(); ++i) {
      const auto path = "pickups[" + std::to_string(i) + "]";
      const auto& e = arr[i];
      r.keys(e, path, {"kind", "x", "y"});
      if (!e.is_object()) continue;
      std::optional<sim::PickupKind> kind;
      if (e.contains("kind") && e["kind"].is_string()) kind = sim::pickup_from_string(e["kind"].get<std::string>());
      if (!kind) {
        r.issue(path + ".kind", "unknown pickup kind");
        continue;
      }
      st.map.pickups.push_back({*kind, {r.integer(e, "x", path + ".x"), r.integer(e, "y", path + ".y")}});
    }
  }
  if (doc.contains("viruses")) {
    const auto& arr = doc["viruses"];
    if (!arr.is_array()) r.issue("viruses", "expected an array");
    for (std::size_t i = 0; arr.is_array() && i < arr.size(); ++i) {
      const auto path = "viruses[" + std::to_string(i) + "]";
      const auto& e = arr[i];
      r.keys(e, path, {"x", "y", "strain"});
      if (!e.is_object()) continue;
      st.map.viruses.push_back(
          {{r.integer(e, "x", path + ".x"), r.integer(e, "y", path + ".y")}, r.integer(e, "strain", path + ".strain")});
    }
  }

  if (issues.empty()) issues = validate_stage(st);
  if (!issues.empty()) throw MapError(MapErrc::ValidationError, origin + ": invalid stage" + describe(issues), issues);
  return st;
}

std::vector<FieldIssue> validate_stage(const sim::StageSpec& st) {
  std::vector<FieldIssue> issues;
  const auto add = [&](std::string field, std::string msg) { issues.push_back({std::move(field), std::move(msg)}); };
  const auto& m = st.map;

  if (st.stage_index < 1) add("stage_index", "must be >= 1");
  if (st.strain_level < 1) add("strain_level", "must be >= 1");
  if (st.vaccine_target < 1) add("vaccine_target", "must be >= 1");
  static constexpr std::array<const char*, 4> kGoalNames{"goals.grocery", "goals.treat", "goals.disinfect",
                                                         "goals.crowd"};
  for (std::size_t i = 0; i < sim::kRoleCount; ++i)
    if (st.goals[i] < 0) add(kGoalNames[i], "must be >= 0");
  if (m.width < 1) add("grid.width", "must be >= 1");
  if (m.height < 1) add("grid.height", "must be >= 1");
  if (!issues.empty()) return issues;

  std::set<Cell> walls;
  for (std::size_t i = 0; i < m.walls.size(); ++i) {
    if (!m.in_bounds(m.walls[i])) add("walls[" + std::to_string(i) + "]", cell_text(m.walls[i]) + " is outside the grid");
    walls.insert(m.walls[i]);
  }
  const auto check = [&](const std::string& field, Cell c) {
    if (!m.in_bounds(c)) {
      add(field, cell_text(c) + " is outside the grid");
    } else if (walls.count(c)) {
      add(field, cell_text(c) + " is a wall");
    }
  };
  const auto check_all = [&](const char* name, const std::vector<Cell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) check(std::string(name) + "[" + std::to_string(i) + "]", cells[i]);
  };
  check_all("spawns", m.spawns);
  check_all("camps", m.camps);
  check_all("crowds", m.crowds);
  check_all("civilians", m.civilians);
  for (std::size_t i = 0; i < m.pickups.size(); ++i) check("pickups[" + std::to_string(i) + "]", m.pickups[i].cell);
  for (std::size_t i = 0; i < m.viruses.size(); ++i) {
    const auto path = "viruses[" + std::to_string(i) + "]";
    check(path, m.viruses[i].cell);
    if (m.viruses[i].strain < 1 || m.viruses[i].strain > st.strain_level)
      add(path + ".strain", "must be between 1 and the stage strain_level");
  }

  if (m.spawns.size() < 4) add("spawns", "need at least 4 spawn cells");
  if (std::set<Cell>(m.spawns.begin(), m.spawns.end()).size() != m.spawns.size()) add("spawns", "spawn cells must be distinct");
  if (m.camps.empty()) add("camps", "need at least one healthcare camp");

  const auto supply = [&](const char* field, int target, int available) {
    if (target > available)
      add(field, "target " + std::to_string(target) + " exceeds the " + std::to_string(available) + " placed on the map");
  };
  supply("vaccine_target", st.vaccine_target, m.count_pickups(sim::PickupKind::VaccinePart));
  supply("goals.grocery", st.goal_for(Role::Citizen), m.count_pickups(sim::PickupKind::Grocery));
  supply("goals.treat", st.goal_for(Role::Doctor), static_cast<int>(m.civilians.size()));
  supply("goals.disinfect", st.goal_for(Role::SanitationWorker), static_cast<int>(m.viruses.size()));
  supply("goals.crowd", st.goal_for(Role::LawEnforcer), static_cast<int>(m.crowds.size()));
  return issues;
}

sim::StageSpec load_stage(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError(MapErrc::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stage(buf.str(), path.string());
}

std::string stage_to_json(const sim::StageSpec& st) {
  const auto& m = st.map;
  const auto cells = [](const std::vector<Cell>& v) {
    ojson a = ojson::array();
    for (const auto& c : v) a.push_back(ojson::array({c.x, c.y}));
    return a;
  };
  ojson j;
  j["stage_index"] = st.stage_index;
  j["strain_level"] = st.strain_level;
  j["vaccine_target"] = st.vaccine_target;
  j["goals"] = {{"grocery", st.goal_for(Role::Citizen)},
                {"treat", st.goal_for(Role::Doctor)},
                {"disinfect", st.goal_for(Role::SanitationWorker)},
                {"crowd", st.goal_for(Role::LawEnforcer)}};
  j["grid"] = {{"width", m.width}, {"height", m.height}};
  j["walls"] = cells(m.walls);
  j["spawns"] = cells(m.spawns);
  j["camps"] = cells(m.camps);
  ojson pickups = ojson::array();
  for (const auto& p : m.pickups) pickups.push_back({{"kind", sim::to_string(p.kind)}, {"x", p.cell.x}, {"y", p.cell.y}});
  j["pickups"] = std::move(pickups);
  ojson viruses = ojson::array();
  for (const auto& v : m.viruses) viruses.push_back({{"x", v.cell.x}, {"y", v.cell.y}, {"strain", v.strain}});
  j["viruses"] = std::move(viruses);
  j["crowds"] = cells(m.crowds);
  j["civilians"] = cells(m.civilians);
  return j.dump();
}

void validate_campaign(const sim::Campaign& stages) {
  if (stages.empty()) throw MapError(MapErrc::EmptyCampaign, "campaign has no stages");
  for (std::size_t i = 1; i < stages.size(); ++i) {
    const auto& prev = stages[i - 1];
    const auto& cur = stages[i];
    if (cur.stage_index == prev.stage_index)
      throw MapError(MapErrc::DuplicateStageIndex, "two stages use stage_index " + std::to_string(cur.stage_index));
    if (cur.strain_level <= prev.strain_level || cur.vaccine_target <= prev.vaccine_target)
      throw MapError(MapErrc::NonMonotoneCampaign, "stage " + std::to_string(cur.stage_index) +
                                                       " must raise both strain_level and vaccine_target over stage " +
                                                       std::to_string(prev.stage_index));
  }
}

sim::Campaign load_campaign(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw MapError(MapErrc::Io, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("stage_") && name.ends_with(".json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  sim::Campaign stages;
  for (const auto& f : files) stages.push_back(load_stage(f));
  std::stable_sort(stages.begin(), stages.end(),
                   [](const auto& a, const auto& b) { return a.stage_index < b.stage_index; });
  validate_campaign(stages);
  return stages;
}

std::filesystem::path default_stages_dir() {
  if (const char* env = std::getenv("COOPVAX_STAGES"); env && *env) return env;
  return COOPVAX_DEFAULT_STAGES_DIR;
}

}  // namespace coopvax::maps
