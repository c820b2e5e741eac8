#include <benchmark/benchmark.h>

#include <relayq/analysis.hpp>
#include <relayq/delay_model.hpp>
#include <relayq/simulator.hpp>
#include <relayq/transform_engine.hpp>

using namespace relayq;

namespace {

SystemParams reference(LstMode mode, int n = 5) {
  SystemParams p;
  p.arrival_rate = 200.0;
  p.threshold = n;
  p.lst_mode = mode;
  return p;
}

void BM_EvalN0(benchmark::State& state) {
  const TransformEngine e(reference(static_cast<LstMode>(state.range(0))));
  const double pi0 = e.solve_pi0().pi0;
  for (auto _ : state) benchmark::DoNotOptimize(e.eval_n0(0.5, pi0));
}
BENCHMARK(BM_EvalN0)->Arg(static_cast<int>(LstMode::jensen))->Arg(static_cast<int>(LstMode::exact));

void BM_SolvePi0(benchmark::State& state) {
  const TransformEngine e(reference(static_cast<LstMode>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(e.solve_pi0());
}
BENCHMARK(BM_SolvePi0)->Arg(static_cast<int>(LstMode::jensen))->Arg(static_cast<int>(LstMode::exact));

void BM_MeanWaitingTime(benchmark::State& state) {
  const TransformEngine e(reference(static_cast<LstMode>(state.range(0))));
  const Pi0Solution s = e.solve_pi0();
  for (auto _ : state) benchmark::DoNotOptimize(DelayModel(e, s).mean_waiting_time());
}
BENCHMARK(BM_MeanWaitingTime)->Arg(static_cast<int>(LstMode::jensen))->Arg(static_cast<int>(LstMode::exact));

void BM_ExactDistribution(benchmark::State& state) {
  const SystemParams p = reference(LstMode::exact);
  for (auto _ : state) benchmark::DoNotOptimize(ServiceDistribution(p.link1, LstMode::exact, p.quadrature));
}
BENCHMARK(BM_ExactDistribution);

void BM_SimulateReplication(benchmark::State& state) {
  SimConfig c;
  c.system = reference(LstMode::jensen);
  c.warmup_packets = 0;
  c.measured_packets = state.range(0);
  c.replications = 1;
  int rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_replication(c, rep++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateReplication)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
