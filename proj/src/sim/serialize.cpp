#include "coopvax/sim/serialize.hpp"

#include <json.hpp>

namespace coopvax::sim {

namespace {

using ojson = nlohmann::ordered_json;

ojson cell(Cell c) { return ojson::array({c.x, c.y}); }
ojson point(Vec2 v) { return ojson::array({v.x, v.y}); }

ojson command(const PlayerCommand& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, cmd::Move>) {
          return ojson::array({"move", v.dx, v.dy});
        } else if constexpr (std::is_same_v<T, cmd::Act>) {
          return ojson::array({"act"});
        } else if constexpr (std::is_same_v<T, cmd::UseSanitizer>) {
          return ojson::array({"use_sanitizer"});
        } else if constexpr (std::is_same_v<T, cmd::ProposeTrade>) {
          return ojson::array({"propose_trade", v.target, v.points, v.role ? std::string(to_string(*v.role)) : ""});
        } else if constexpr (std::is_same_v<T, cmd::RespondTrade>) {
          return ojson::array({"respond_trade", v.accept});
        } else {
          return ojson::array({"idle"});
        }
      },
      c);
}

}  // namespace

std::string serialize_state(const GameState& s) {
  ojson j;
  j["rng_seed"] = s.rng_seed;
  j["rng"] = s.rng.state();
  j["tick"] = s.tick;
  j["stage_tick"] = s.stage_tick;
  j["stage_index"] = s.campaign ? s.stage().stage_index : 0;
  j["phase"] = to_string(s.phase);
  j["loss_reason"] = s.loss_reason ? static_cast<int>(*s.loss_reason) : -1;

  auto& players = j["players"] = ojson::array();
  for (const auto& p : s.players) {
    players.push_back({{"id", p.id},
                       {"role", to_string(p.role)},
                       {"pos", point(p.position)},
                       {"health", p.health},
                       {"mask", p.mask_meter},
                       {"sanitizers", p.sanitizer_count},
                       {"shield", p.shield_ticks},
                       {"ammo", p.ammo},
                       {"progress", p.goal_progress},
                       {"score", p.score},
                       {"connected", p.connected}});
  }
  auto& viruses = j["viruses"] = ojson::array();
  for (const auto& v : s.viruses) viruses.push_back(ojson::array({v.id, point(v.position), v.strain_level, v.alive}));
  j["next_virus_id"] = s.next_virus_id;

  auto& civilians = j["civilians"] = ojson::array();
  for (const auto& c : s.civilians) civilians.push_back(ojson::array({cell(c.cell), c.treated}));
  auto& crowds = j["crowds"] = ojson::array();
  for (const auto& c : s.crowds) crowds.push_back(ojson::array({cell(c.cell), c.dispersed}));
  auto& pickups = j["pickups"] = ojson::array();
  for (const auto& p : s.remaining_pickups) pickups.push_back(ojson::array({to_string(p.kind), cell(p.cell)}));

  j["team_vaccines"] = s.team_vaccines;
  j["vaccines_total"] = s.vaccines_total;
  j["vaccinated_through"] = s.vaccinated_through;
  j["waived"] = s.waived;
  if (s.pending_trade) {
    const auto& t = *s.pending_trade;
    j["pending_trade"] = ojson::array({t.from, t.to, t.points, t.expires_at_tick});
  } else {
    j["pending_trade"] = nullptr;
  }

  auto& queued = j["queued"] = ojson::array();
  for (const auto& [id, c] : s.queued) queued.push_back(ojson::array({id, command(c)}));
  auto& cooldowns = j["cooldowns"] = ojson::array();
  for (const auto& [key, t] : s.contact_ready_at) cooldowns.push_back(ojson::array({key.first, key.second, t}));

  j["placed_total"] = s.placed_total;
  j["collected_total"] = s.collected_total;
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x00000100000001b3ULL;
  }
  return hash;
}

}  // namespace coopvax::sim
