#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "irs/sim/world.hpp"
#include "irs/vehicle.hpp"

namespace {

using namespace irs;

std::vector<std::int64_t> random_points(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<std::int64_t> pts(n);
  for (auto& p : pts) p = static_cast<std::int64_t>(rng() % 40);
  return pts;
}

void BM_TrustBands(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto bands = compute_trust_bands(pts);
    int top = 0;
    for (auto p : pts) top += classify_trust(p, bands) == TrustLevel::Top;
    benchmark::DoNotOptimize(top);
  }
}
BENCHMARK(BM_TrustBands)->Arg(8)->Arg(100)->Arg(1000);

// A receiver with `range(0)` beaconing neighbours, all in its LRL, judging a
// stream of lone warnings about fresh events.
void BM_HandleWarningIrs(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  VehicleNode v(VehicleId{0}, VehicleRole::Benign);
  for (std::uint32_t i = 1; i <= n; ++i) {
    v.mutable_lrl().upsert({VehicleId{i}, static_cast<std::int64_t>(i % 13), 0, 0});
    v.handle_beacon(Beacon{VehicleId{i}, {static_cast<double>(i * 5 % 300), 500}, 30, {1, 0}, 0}, 0);
  }
  std::uint64_t event = 0;
  for (auto _ : state) {
    const VehicleId sender{static_cast<std::uint32_t>(event % n + 1)};
    auto r = v.handle_warning(Warning{sender, EventId{++event}, EventKind::Crash, {150, 500}, 0.5}, 0.5);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_HandleWarningIrs)->Arg(10)->Arg(50);

void BM_HandleWarningAcceptAll(benchmark::State& state) {
  const Warning w{VehicleId{1}, EventId{1}, EventKind::Crash, {150, 500}, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(sim::accept_all(w));
}
BENCHMARK(BM_HandleWarningAcceptAll);

void BM_SmallSimulation(benchmark::State& state) {
  sim::ScenarioConfig c;
  c.vehicle_count = 40;
  c.attacker_count = 4;
  c.duration = 30;
  const auto pipeline = state.range(0) == 0 ? sim::Pipeline::Irs : sim::Pipeline::AcceptAll;
  for (auto _ : state) {
    auto w = sim::build_scenario(c, pipeline);
    auto r = sim::run(w);
    benchmark::DoNotOptimize(r.report.victims);
  }
}
BENCHMARK(BM_SmallSimulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
