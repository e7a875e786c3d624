#include "fixtures.hpp"

#include <algorithm>

#include "coopvax/maps/stage_io.hpp"

namespace coopvax::testing {

sim::StageSpec blank_stage(int width, int height, int index) {
  sim::StageSpec s;
  s.stage_index = index;
  s.strain_level = index;
  s.vaccine_target = 1;
  s.goals = {0, 0, 0, 0};
  s.map.width = width;
  s.map.height = height;
  s.map.spawns = {{1, 1}, {2, 1}, {3, 1}, {4, 1}};
  s.map.pickups = {{sim::PickupKind::VaccinePart, {width - 1, height - 1}}};
  return s;
}

std::shared_ptr<const sim::Campaign> bundled_campaign() {
  static const auto campaign = std::make_shared<const sim::Campaign>(maps::load_campaign(COOPVAX_TEST_STAGES_DIR));
  return campaign;
}

std::vector<sim::RosterEntry> roster_of(const std::vector<sim::Role>& roles) {
  std::vector<sim::RosterEntry> out;
  for (std::size_t i = 0; i < roles.size(); ++i) out.push_back({"p" + std::to_string(i), roles[i]});
  return out;
}

sim::StageSpec quiet_stage() {
  auto s = bundled_campaign()->front();
  s.map.viruses.clear();
  s.map.crowds.clear();
  s.goals[sim::index_of(sim::Role::SanitationWorker)] = 0;
  s.goals[sim::index_of(sim::Role::LawEnforcer)] = 0;
  for (const auto& p : s.map.pickups) {
    if (p.kind != sim::PickupKind::VaccinePart) continue;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        const sim::Cell c{p.cell.x + dx, p.cell.y + dy};
        if ((dx == 0 && dy == 0) || !s.map.in_bounds(c)) continue;
        if (std::find(s.map.walls.begin(), s.map.walls.end(), c) == s.map.walls.end()) s.map.walls.push_back(c);
      }
  }
  const auto blocked = [&](sim::Cell c) {
    return std::find(s.map.walls.begin(), s.map.walls.end(), c) != s.map.walls.end();
  };
  std::erase_if(s.map.pickups, [&](const auto& p) { return p.kind != sim::PickupKind::VaccinePart && blocked(p.cell); });
  std::erase_if(s.map.civilians, blocked);
  std::erase_if(s.map.camps, blocked);
  return s;
}

}  // namespace coopvax::testing
