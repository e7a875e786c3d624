#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coopvax/bots/headless.hpp"
#include "coopvax/bots/networked.hpp"
#include "coopvax/maps/stage_io.hpp"
#include "coopvax/server/config.hpp"

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace coopvax;
  CLI::App app{"coopvax-bots: plays complete games with scripted agents"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "run games and write a report");

  std::string mode = "headless";
  std::string policies = "greedy,greedy,greedy,greedy";
  std::string roles;
  std::uint64_t seed = 42;
  int reps = 1;
  std::string campaign;
  std::string out;
  std::string server = "127.0.0.1:7070";
  std::string room = "bots";
  std::uint64_t max_ticks = 60'000;
  bool serial = false;
  std::string fault = "none";
  std::uint64_t fault_tick = 100;
  std::size_t fault_slot = 0;

  run->add_option("--mode", mode, "headless or networked")->check(CLI::IsMember({"headless", "networked"}));
  run->add_option("--policies", policies, "comma-separated greedy|random, one per bot (1-4)")->capture_default_str();
  run->add_option("--roles", roles, "comma-separated roles, one per bot (default: citizen,doctor,sanitation_worker,law_enforcer)");
  run->add_option("--seed", seed, "base seed; repetition r uses seed + r")->capture_default_str();
  run->add_option("--reps", reps, "repetitions (headless)")->capture_default_str();
  run->add_option("--campaign", campaign, "stages directory (headless)")->envname("COOPVAX_STAGES");
  run->add_option("--out", out, "report file (default: stdout)");
  run->add_option("--server", server, "server TCP address (networked)")->capture_default_str();
  run->add_option("--room", room, "room name (networked)")->capture_default_str();
  run->add_option("--max-ticks", max_ticks, "stop a game after this many ticks")->capture_default_str();
  run->add_flag("--serial", serial, "run repetitions on one thread (reference path)");
  run->add_option("--fault", fault, "networked fault injection: none, garbage or kill")
      ->check(CLI::IsMember({"none", "garbage", "kill"}));
  run->add_option("--fault-tick", fault_tick, "tick at which the fault is injected")->capture_default_str();
  run->add_option("--fault-slot", fault_slot, "bot that injects the fault")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<bots::PolicyKind> kinds;
    for (const auto& p : split(policies)) {
      const auto k = bots::policy_from_string(p);
      if (!k || *k == bots::PolicyKind::Scripted) throw std::invalid_argument("unknown policy '" + p + "'");
      kinds.push_back(*k);
    }
    std::vector<sim::Role> role_list;
    if (!roles.empty()) {
      for (const auto& r : split(roles)) {
        const auto role = sim::role_from_string(r);
        if (!role) throw std::invalid_argument("unknown role '" + r + "'");
        role_list.push_back(*role);
      }
    }
    const auto specs = bots::make_specs(kinds, role_list);

    std::string text;
    if (mode == "headless") {
      bots::HeadlessConfig cfg;
      cfg.campaign = std::make_shared<const sim::Campaign>(
          maps::load_campaign(campaign.empty() ? maps::default_stages_dir() : std::filesystem::path(campaign)));
      cfg.bots = specs;
      cfg.seed = seed;
      cfg.repetitions = reps;
      cfg.max_ticks = max_ticks;
      text = bots::render(serial ? bots::run_headless_serial(cfg) : bots::run_headless(cfg));
    } else {
      bots::NetworkedConfig cfg;
      const auto ep = server::parse_endpoint(server);
      cfg.host = ep.host;
      cfg.port = ep.port;
      cfg.room = room;
      cfg.bots = specs;
      cfg.seed = seed;
      cfg.max_ticks = max_ticks;
      cfg.fault = fault == "garbage" ? bots::FaultMode::Garbage : fault == "kill" ? bots::FaultMode::Kill : bots::FaultMode::None;
      cfg.fault_tick = fault_tick;
      cfg.fault_slot = fault_slot;
      text = bots::render(bots::run_networked(cfg).report);
    }
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + out);
      f << text;
    }
  } catch (const maps::MapError& e) {
    std::cerr << "coopvax-bots: " << e.what() << '\n';
    for (const auto& issue : e.issues()) std::cerr << "  " << issue.field << ": " << issue.message << '\n';
    return EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "coopvax-bots: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
