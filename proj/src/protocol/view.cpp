#include "coopvax/protocol/view.hpp"

#include "coopvax/sim/game.hpp"

namespace coopvax::protocol {

ClientView make_view(const sim::GameState& s) {
  const auto& st = s.stage();
  ClientView v;
  v.stage_index = st.stage_index;
  v.stage_count = static_cast<int>(s.campaign->size());
  v.phase = s.phase;
  v.strain_level = st.strain_level;
  v.team_vaccines = s.team_vaccines;
  v.vaccine_target = st.vaccine_target;
  v.vaccines_total = s.vaccines_total;

  v.players.reserve(s.players.size());
  for (const auto& p : s.players) {
    v.players.push_back({p.id, p.role, p.position, p.health, p.mask_meter, p.sanitizer_count, p.shield_ticks, p.ammo,
                         p.goal_progress, st.goal_for(p.role), s.waived[sim::index_of(p.role)], p.score, p.connected});
  }
  for (const auto& vir : s.viruses)
    if (vir.alive) v.viruses.push_back({vir.id, vir.position, vir.strain_level});
  for (const auto& p : s.remaining_pickups) v.pickups.push_back({p.kind, p.cell});
  for (const auto& c : s.crowds) v.crowds.push_back({c.cell, c.dispersed});
  for (const auto& c : s.civilians) v.civilians.push_back({c.cell, c.treated});
  v.pending_trade = s.pending_trade;
  v.map = {st.map.width, st.map.height, st.map.walls, st.map.camps};
  return v;
}

ClientView make_view(const sim::GameState& state, const sim::PlayerId& recipient) {
  auto v = make_view(state);
  v.hint = sim::vaccine_direction_hint(state, recipient);
  return v;
}

}  // namespace coopvax::protocol
