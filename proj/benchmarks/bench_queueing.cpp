#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "gdpx/queueing.hpp"
#include "gdpx/rng.hpp"
#include "gdpx/time.hpp"

namespace {

using namespace gdpx;

std::vector<queueing::ArrivalSample> make_samples(std::int64_t n) {
  Rng rng(42);
  const std::int64_t horizon_min = std::max<std::int64_t>(n, 96) * 2;
  std::vector<queueing::ArrivalSample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const TimePoint planned{rng.uniform_int(0, horizon_min - 1)};
    samples.push_back({planned + rng.uniform_int(0, 180), planned});
  }
  return samples;
}

void BM_BuildDiagram(benchmark::State& state) {
  const auto samples = make_samples(state.range(0));
  const auto capacity = queueing::CapacitySeries::constant(9.25);
  for (auto _ : state) {
    auto d = queueing::build_diagram(samples, capacity, "EWR");
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildDiagram)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_ExcessDelay(benchmark::State& state) {
  const auto samples = make_samples(state.range(0));
  const auto capacity = queueing::CapacitySeries::constant(9.25);
  const auto d = queueing::build_diagram(samples, capacity, "EWR");
  for (auto _ : state) {
    auto r = queueing::excess_delay(d, state.range(0));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ExcessDelay)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
