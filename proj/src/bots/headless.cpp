#include "coopvax/bots/headless.hpp"

#include <exception>
#include <stdexcept>

#include "coopvax/protocol/view.hpp"
#include "coopvax/sim/game.hpp"
#include "coopvax/sim/serialize.hpp"

namespace coopvax::bots {

std::string bot_name(std::size_t slot) { return "bot" + std::to_string(slot); }

std::vector<BotSpec> make_specs(const std::vector<PolicyKind>& policies, const std::vector<sim::Role>& roles) {
  if (!roles.empty() && roles.size() != policies.size())
    throw std::invalid_argument("need one role per policy");
  std::vector<BotSpec> out;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto role = roles.empty() ? sim::kAllRoles[i % sim::kAllRoles.size()] : roles[i];
    out.push_back({policies[i], role, {}});
  }
  return out;
}

GameReport run_game(const HeadlessConfig& config, std::uint64_t seed) {
  std::vector<sim::RosterEntry> roster;
  std::vector<std::pair<std::string, sim::Role>> named;
  std::vector<Bot> bots;
  for (std::size_t i = 0; i < config.bots.size(); ++i) {
    const auto& entry = config.bots[i];
    roster.push_back({bot_name(i), entry.role});
    named.emplace_back(bot_name(i), entry.role);
    bots.push_back(Bot::make(entry.policy, policy_seed(seed, i), entry.script));
  }
  auto state = sim::new_game(config.campaign, roster, seed);
  ReportBuilder report(seed, named);

  while (state.phase == sim::Phase::Running && state.tick < config.max_ticks) {
    for (std::size_t i = 0; i < bots.size(); ++i) {
      const auto& id = roster[i].id;
      sim::queue_command(state, id, bots[i].decide(protocol::make_view(state, id), id, state.tick));
    }
    for (const auto& e : sim::tick(state)) report.record(state.tick, e);
  }

  report.set_ticks(state.tick);
  report.set_stage(state.stage().stage_index);
  switch (state.phase) {
    case sim::Phase::Won:
      report.set_final("won", "cleared");
      break;
    case sim::Phase::Lost:
      report.set_final("lost", state.loss_reason == sim::LossReason::Disconnect ? "disconnect" : "health");
      break;
    default:
      report.set_final("timeout", "max_ticks");
      break;
  }
  for (const auto& p : state.players) {
    report.set_role(p.id, p.role);
    report.set_score(p.id, p.score);
  }
  report.set_hash(sim::state_hash(state));
  return report.report();
}

namespace {

RunReport header(const HeadlessConfig& config) {
  if (!config.campaign || config.campaign->empty()) throw std::invalid_argument("empty campaign");
  if (config.bots.empty() || config.bots.size() > 4) throw std::invalid_argument("roster must hold 1-4 bots");
  if (config.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  RunReport r;
  r.mode = "headless";
  for (const auto& b : config.bots) {
    r.policies.emplace_back(to_string(b.policy));
    r.roles.emplace_back(sim::to_string(b.role));
  }
  r.seed = config.seed;
  r.repetitions = config.repetitions;
  r.stage_count = static_cast<int>(config.campaign->size());
  r.extra["max_ticks"] = config.max_ticks;
  return r;
}

}  // namespace

RunReport run_headless_serial(const HeadlessConfig& config) {
  auto r = header(config);
  for (int i = 0; i < config.repetitions; ++i) r.games.push_back(run_game(config, config.seed + static_cast<std::uint64_t>(i)));
  return r;
}

RunReport run_headless(const HeadlessConfig& config) {
  auto r = header(config);
  const int n = config.repetitions;
  std::vector<GameReport> games(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      games[static_cast<std::size_t>(i)] = run_game(config, config.seed + static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(coopvax_headless_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  r.games = std::move(games);
  return r;
}

}  // namespace coopvax::bots
