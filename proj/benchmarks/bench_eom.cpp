#include <benchmark/benchmark.h>

#include <epmotion/eom.hpp>
#include <epmotion/ics.hpp>
#include <epmotion/model.hpp>

namespace {

using namespace epmotion;

EpState make_state(int n) {
  ToyModel family({n, 1.0, Parity::Odd});
  const auto multiplets = detect_crossings(family, 0.0);
  const auto clusters = resolve_clusters_and_signs(multiplets.front(), family);
  return clusters.front().state;
}

void BM_rates(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  ToyModel family({n, 1.0, Parity::Odd});
  EpState state = make_state(n);
  for (auto _ : bench) {
    benchmark::DoNotOptimize(rates(state, family));
  }
}
BENCHMARK(BM_rates)->Arg(7)->Arg(19);

void BM_step_euler(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  ToyModel family({n, 1.0, Parity::Odd});
  EpState state = make_state(n);
  for (auto _ : bench) {
    benchmark::DoNotOptimize(step(state, family, 1e-7));
  }
}
BENCHMARK(BM_step_euler)->Arg(7)->Arg(19);

void BM_check_consistency(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  ToyModel family({n, 1.0, Parity::Odd});
  EpState state = make_state(n);
  for (auto _ : bench) {
    benchmark::DoNotOptimize(check_consistency(state, family));
  }
}
BENCHMARK(BM_check_consistency)->Arg(7)->Arg(19);

}  // namespace

BENCHMARK_MAIN();
