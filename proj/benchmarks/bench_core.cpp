#include <benchmark/benchmark.h>

#include "hadp/builtin_models.hpp"
#include "hadp/stability_diag.hpp"

using namespace hadp;

namespace {

struct Fixture {
  ModelDefaults d = paper_sec5();
  JointState s;
  Fixture() {
    validate_game(d.game);
    s = JointState{Vector::Constant(2, 0.3), initial_weights(d.game, d.sim.init)};
  }
};

void BM_EvalAll(benchmark::State& state) {
  const Fixture f;
  const Vector x = f.s.x;
  const Vector nu = Vector::Constant(1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(eval_all(f.d.game.value_bases[0], x, nu));
}
BENCHMARK(BM_EvalAll);

void BM_JointRates(benchmark::State& state) {
  const Fixture f;
  const StepForcing forcing = StepForcing::zeros(f.d.game.spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(joint_rates(f.d.game, f.d.tuning, f.d.sim.leader, f.s, forcing));
}
BENCHMARK(BM_JointRates);

void BM_Rk4Step(benchmark::State& state) {
  const Fixture f;
  const StepForcing forcing = StepForcing::zeros(f.d.game.spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(step(f.d.game, f.d.tuning, f.d.sim.leader, f.s, 0.0, 1e-3, forcing));
}
BENCHMARK(BM_Rk4Step);

void BM_FixedPoint(benchmark::State& state) {
  const Fixture f;
  for (auto _ : state) {
    const NemytskiiMap map(f.d.game, f.s.w, f.s.x);
    benchmark::DoNotOptimize(fixed_point_solve(map.as_function(), map.affine_part(), 1e-8, 100));
  }
}
BENCHMARK(BM_FixedPoint);

void BM_WnuRate(benchmark::State& state) {
  const Fixture f;
  const NemytskiiMap map(f.d.game, f.s.w, f.s.x);
  const WnuMode mode = state.range(0) == 0 ? WnuMode::kAnalytic : WnuMode::kNumeric;
  for (auto _ : state)
    benchmark::DoNotOptimize(w_nu_rate(f.d.game, f.s.w, map, f.d.tuning.varrho, mode));
}
BENCHMARK(BM_WnuRate)->Arg(0)->Arg(1)->ArgName("numeric");

void BM_AssembleM(benchmark::State& state) {
  const Fixture f;
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_M(f.d.game, f.d.tuning, f.s.w, f.s.x));
}
BENCHMARK(BM_AssembleM);

void BM_StabilityReport(benchmark::State& state) {
  const Fixture f;
  for (auto _ : state)
    benchmark::DoNotOptimize(stability_report(f.d.game, f.d.tuning, f.s.w, 64, 7));
}
BENCHMARK(BM_StabilityReport);

}  // namespace

BENCHMARK_MAIN();
