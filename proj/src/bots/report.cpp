#include "coopvax/bots/report.hpp"

#include <cstdio>

namespace coopvax::bots {

using ojson = nlohmann::ordered_json;

ReportBuilder::ReportBuilder(std::uint64_t seed, const std::vector<std::pair<std::string, sim::Role>>& roster) {
  report_.seed = seed;
  for (const auto& [id, role] : roster) report_.players.push_back({id, role, 0, 0});
}

PlayerSummary* ReportBuilder::find(const std::string& id) {
  for (auto& p : report_.players)
    if (p.id == id) return &p;
  return nullptr;
}

void ReportBuilder::set_role(const std::string& id, sim::Role role) {
  if (auto* p = find(id)) p->role = role;
}

void ReportBuilder::set_score(const std::string& id, int score) {
  if (auto* p = find(id)) p->score = score;
}

void ReportBuilder::set_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  report_.final_state_hash = buf;
}

void ReportBuilder::record(std::uint64_t tick, const sim::GameEvent& event) {
  set_ticks(tick);
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        namespace ev = sim::ev;
        if constexpr (std::is_same_v<T, ev::PickupCollected>) {
          ++report_.pickups[sim::index_of(e.kind)];
        } else if constexpr (std::is_same_v<T, ev::PlayerInfected>) {
          ++report_.infections;
          if (auto* p = find(e.player)) ++p->infections;
        } else if constexpr (std::is_same_v<T, ev::VirusKilled>) {
          ++report_.viruses_killed;
        } else if constexpr (std::is_same_v<T, ev::StageCleared>) {
          report_.stage_clear_ticks.push_back(tick);
          report_.stage_reached = e.stage + 1;
        } else if constexpr (std::is_same_v<T, ev::TradeCompleted>) {
          auto* a = find(e.from);
          auto* b = find(e.to);
          if (a && b && a != b) std::swap(a->role, b->role);
        }
      },
      event);
}

Aggregate aggregate(const std::vector<GameReport>& games, int stage_count) {
  Aggregate a;
  a.games = static_cast<int>(games.size());
  a.mean_ticks_per_stage.assign(static_cast<std::size_t>(stage_count), 0.0);
  a.clears_per_stage.assign(static_cast<std::size_t>(stage_count), 0);
  std::vector<double> sums(static_cast<std::size_t>(stage_count), 0.0);
  for (const auto& g : games) {
    if (g.outcome == "won") ++a.wins;
    std::uint64_t prev = 0;
    for (std::size_t k = 0; k < g.stage_clear_ticks.size() && k < sums.size(); ++k) {
      sums[k] += static_cast<double>(g.stage_clear_ticks[k] - prev);
      ++a.clears_per_stage[k];
      prev = g.stage_clear_ticks[k];
    }
  }
  for (std::size_t k = 0; k < sums.size(); ++k)
    if (a.clears_per_stage[k] > 0) a.mean_ticks_per_stage[k] = sums[k] / a.clears_per_stage[k];
  a.win_rate = a.games > 0 ? static_cast<double>(a.wins) / a.games : 0.0;
  return a;
}

ojson to_json(const GameReport& g) {
  ojson j;
  j["seed"] = g.seed;
  j["outcome"] = g.outcome;
  j["reason"] = g.reason;
  j["ticks"] = g.ticks;
  j["stage_reached"] = g.stage_reached;
  j["stage_clear_ticks"] = g.stage_clear_ticks;
  ojson players = ojson::array();
  for (const auto& p : g.players)
    players.push_back({{"id", p.id}, {"role", sim::to_string(p.role)}, {"score", p.score}, {"infections", p.infections}});
  j["players"] = std::move(players);
  ojson pickups = ojson::object();
  for (std::size_t k = 0; k < g.pickups.size(); ++k)
    pickups[std::string(sim::to_string(static_cast<sim::PickupKind>(k)))] = g.pickups[k];
  j["pickups"] = std::move(pickups);
  j["infections"] = g.infections;
  j["viruses_killed"] = g.viruses_killed;
  if (g.final_state_hash) j["final_state_hash"] = *g.final_state_hash;
  return j;
}

ojson to_json(const RunReport& r) {
  ojson j;
  j["mode"] = r.mode;
  j["policies"] = r.policies;
  j["roles"] = r.roles;
  j["seed"] = r.seed;
  j["repetitions"] = r.repetitions;
  j["stage_count"] = r.stage_count;
  ojson games = ojson::array();
  for (const auto& g : r.games) games.push_back(to_json(g));
  j["games"] = std::move(games);
  const auto agg = aggregate(r.games, r.stage_count);
  j["aggregate"] = {{"games", agg.games},
                    {"wins", agg.wins},
                    {"win_rate", agg.win_rate},
                    {"stage_clears", agg.clears_per_stage},
                    {"mean_ticks_per_stage", agg.mean_ticks_per_stage}};
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

std::string render(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

}  // namespace coopvax::bots
