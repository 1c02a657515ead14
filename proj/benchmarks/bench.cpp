#include <benchmark/benchmark.h>

#include "gripscribe/metrics.hpp"
#include "gripscribe/penholder.hpp"
#include "gripscribe/session.hpp"
#include "gripscribe/workspace.hpp"

using namespace gripscribe;

static void BM_FkIk(benchmark::State& state) {
  const MechanismConfig cfg;
  JointState s{0.4, 1.9};
  for (auto _ : state) {
    const Vec2 p = fk(cfg, s).position();
    benchmark::DoNotOptimize(ik(cfg, p));
    s.theta1 += 1e-6;
  }
}
BENCHMARK(BM_FkIk);

static void BM_Step(benchmark::State& state) {
  const MechanismConfig cfg;
  JointState s = ik(cfg, {0.0, 0.28}).solutions.front();
  const Vec2 target(0.003, 0.281);
  for (auto _ : state) {
    s = step(DynamicParams{}, cfg, HandImpedance{}, s, target, Vec2::Zero(), 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step);

static void BM_Coverage(benchmark::State& state) {
  const MechanismConfig cfg;
  const Sheet sheet = Sheet::legal(SheetOrientation::portrait);
  for (auto _ : state) benchmark::DoNotOptimize(coverage(cfg, sheet, 0.005));
}
BENCHMARK(BM_Coverage)->Unit(benchmark::kMicrosecond);

static void BM_PlaceBase(benchmark::State& state) {
  const MechanismConfig cfg;
  const Sheet sheet = Sheet::legal(SheetOrientation::landscape);
  for (auto _ : state) benchmark::DoNotOptimize(place_base(cfg, sheet));
}
BENCHMARK(BM_PlaceBase)->Unit(benchmark::kMillisecond);

static void BM_Transmissibility(benchmark::State& state) {
  const double f = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmissibility(DynamicParams{}, MechanismConfig{}, HandImpedance{}, f));
  }
}
BENCHMARK(BM_Transmissibility)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SolveScrew(benchmark::State& state) {
  const PenHolder holder{GripperGeometry{}};
  for (auto _ : state) benchmark::DoNotOptimize(holder.solve_screw(14.0));
}
BENCHMARK(BM_SolveScrew)->Unit(benchmark::kMicrosecond);

static void BM_SessionTick(benchmark::State& state) {
  Session session{ProjectConfig{}};
  for (auto _ : state) benchmark::DoNotOptimize(session.advance(0.016));
}
BENCHMARK(BM_SessionTick)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
