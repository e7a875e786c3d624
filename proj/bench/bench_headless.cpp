#include <benchmark/benchmark.h>

#include "coopvax/bots/headless.hpp"
#include "coopvax/maps/stage_io.hpp"

using namespace coopvax;

namespace {

bots::HeadlessConfig config(int reps) {
  static const auto campaign = std::make_shared<const sim::Campaign>(maps::load_campaign(maps::default_stages_dir()));
  bots::HeadlessConfig c;
  c.campaign = campaign;
  c.bots = bots::make_specs(std::vector<bots::PolicyKind>(4, bots::PolicyKind::Greedy));
  c.seed = 42;
  c.repetitions = reps;
  return c;
}

void BM_HeadlessSerial(benchmark::State& state) {
  const auto c = config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bots::run_headless_serial(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_HeadlessParallel(benchmark::State& state) {
  const auto c = config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bots::run_headless(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SingleGame(benchmark::State& state) {
  const auto c = config(1);
  std::uint64_t seed = 0;
  std::uint64_t ticks = 0;
  for (auto _ : state) ticks += bots::run_game(c, seed++).ticks;
  state.counters["ticks/s"] = benchmark::Counter(static_cast<double>(ticks), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK(BM_HeadlessSerial)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HeadlessParallel)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleGame)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
