#include <benchmark/benchmark.h>

#include "twostage/sim.hpp"

namespace {

using namespace twostage;

void BM_Observe(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  GaussianBelief b = init_prior(d, 1e-3);
  RandomStream rng(1);
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.normal();
  for (auto _ : state) {
    b.update(x, 0.5);
    benchmark::DoNotOptimize(b.mean().data());
  }
}
BENCHMARK(BM_Observe)->Arg(3)->Arg(16)->Arg(64);

void BM_Synchronize(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RandomStream rng(2);
  Vector u(d);
  for (int i = 0; i < d; ++i) u(i) = rng.normal();
  const GaussianBelief base = init_prior(d, 1.0);
  const RewardMoments m = base.reward_moments(u);
  for (auto _ : state) {
    GaussianBelief b = sync_to_target(base, u, SyncTarget{m.mean + 0.1, 0.5 * m.var});
    benchmark::DoNotOptimize(b.mean().data());
  }
}
BENCHMARK(BM_Synchronize)->Arg(3)->Arg(16)->Arg(64);

void BM_Episode(benchmark::State& state) {
  ExperimentConfig c;
  c.horizon = static_cast<std::uint64_t>(state.range(0));
  const Variant v = static_cast<Variant>(state.range(1));
  std::uint64_t run = 0;
  for (auto _ : state) {
    RunRecord r = run_episode(c, v, 50.0, 0.2, run++);
    benchmark::DoNotOptimize(r.cumulative_regret.back());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Episode)
    ->Args({2000, static_cast<int>(Variant::single_stage)})
    ->Args({2000, static_cast<int>(Variant::naive)})
    ->Args({2000, static_cast<int>(Variant::sync_post)})
    ->Args({2000, static_cast<int>(Variant::sync_pre)})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
