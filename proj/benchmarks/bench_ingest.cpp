#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "gdpx/flightdata.hpp"
#include "gdpx/rng.hpp"
#include "gdpx/time.hpp"

namespace {

using namespace gdpx;

std::vector<FlightRecord> make_flights(std::int64_t n) {
  Rng rng(13);
  std::vector<FlightRecord> flights;
  flights.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    FlightRecord f;
    f.flight_id = "F" + std::to_string(1000000 + i);
    f.origin = "ORG";
    f.dest = "EWR";
    f.ete_min = rng.uniform_int(45, 300);
    f.unimpeded_taxi_out_min = rng.uniform_int(10, 25);
    const TimePoint srta{rng.uniform_int(360, 5 * 1440)};
    f.sched_gate_arr = srta + 10;
    f.fp_wheels_off = srta - f.ete_min;
    f.fp_gate_out = f.fp_wheels_off - f.unimpeded_taxi_out_min;
    const std::int64_t hold = rng.uniform_int(0, 120);
    if (hold > 0) f.edct_wheels_off = f.fp_wheels_off + hold;
    f.actual_gate_out = f.fp_gate_out + hold;
    f.actual_wheels_off = f.fp_wheels_off + hold;
    f.actual_wheels_on = f.actual_wheels_off + f.ete_min;
    f.actual_gate_in = f.actual_wheels_on + 10;
    flights.push_back(std::move(f));
  }
  return flights;
}

void BM_SerializeFlights(benchmark::State& state) {
  const auto flights = make_flights(state.range(0));
  const Epoch epoch{25'000'000};
  for (auto _ : state) {
    auto text = flightdata::serialize_flights(flights, epoch);
    benchmark::DoNotOptimize(text);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SerializeFlights)->Arg(10000)->Arg(100000);

void BM_ParseFlights(benchmark::State& state) {
  const auto flights = make_flights(state.range(0));
  const Epoch epoch{25'000'000};
  const std::string text = flightdata::serialize_flights(flights, epoch);
  for (auto _ : state) {
    std::istringstream in(text);
    auto records = flightdata::parse_flights(in, epoch);
    benchmark::DoNotOptimize(records);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParseFlights)->Arg(10000)->Arg(100000);

}  // namespace
