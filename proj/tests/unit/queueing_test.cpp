#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "gdpx/errors.hpp"
#include "gdpx/queueing.hpp"
#include "gdpx/rng.hpp"
#include "gdpx/synth.hpp"
#include "test_helpers.hpp"

using namespace gdpx;
using gdpx::testing::at;
using gdpx::testing::flight;
using queueing::ArrivalSample;
using queueing::CapacitySeries;

namespace {

/// Arrival landing observed at `actual` whose counterfactual is `delay`
/// minutes earlier.
ArrivalSample sample(TimePoint actual, std::int64_t delay) {
  return {actual, actual - delay};
}

/// Random instance shared with the acceptance harness: ≤50 flights over
/// ≤96 quarters with mixed integer/fractional capacities.
struct RandomInstance {
  std::vector<ArrivalSample> samples;
  std::vector<synth::OracleFlight> oracle_in;
  CapacitySeries series;
  synth::OracleCapacity oracle_cap;
};

RandomInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const std::int64_t quarters = rng.uniform_int(4, 96);
  const std::int64_t n = rng.uniform_int(1, 50);
  std::vector<double> rates;
  for (std::int64_t q = 0; q < quarters; ++q) {
    // 0, integer, or quarter-fraction rates in [0, 10]
    const double r = static_cast<double>(rng.uniform_int(0, 40)) / 4.0;
    rates.push_back(r);
  }
  const double fallback = 4.0;  // positive so the queue always drains

  std::vector<ArrivalSample> samples;
  std::vector<synth::OracleFlight> oracle_in;
  for (std::int64_t i = 0; i < n; ++i) {
    const TimePoint planned{rng.uniform_int(0, quarters * kMinutesPerQuarter - 1)};
    const std::int64_t delay = rng.uniform_int(0, 180);
    // the model curve is built from planned times; actual landings are the
    // planned times pushed back by the controlled delay
    samples.push_back({planned + delay, planned});
    oracle_in.push_back({"F" + std::to_string(i), planned});
  }
  return {std::move(samples), std::move(oracle_in),
          CapacitySeries(QuarterIndex{0}, rates, fallback),
          synth::OracleCapacity{QuarterIndex{0}, rates, fallback}};
}

}  // namespace

TEST_CASE("the counterfactual landing removes exactly the controlled delay") {
  const FlightRecord f = flight("Q1", at(18, 0));
  CHECK(queueing::model_wheels_on(f, 0) == at(18, 0));
  CHECK(queueing::model_wheels_on(f, 45) == at(17, 15));
}

TEST_CASE("excess delay of the frozen three-flight diagram") {
  // A=(0,2,3), A'=(2,3,3) cumulative; demand uncongested so P' == A'
  QueueingDiagram d;
  d.airport = "EWR";
  d.first = QuarterIndex{0};
  d.actual = {0, 2, 3};
  d.planned_model = {2, 3, 3};
  d.served_model = {2, 3, 3};
  d.capacity = {4, 4, 4};
  const ExcessDelayResult r = queueing::excess_delay(d, 3);
  CHECK(r.excess_delay_min == 45.0);
  CHECK(r.excess_per_rf_min == 15.0);
  CHECK(r.airborne_increase_min == 0.0);
  CHECK(r.rf_count == 3);
}

TEST_CASE("airborne increase of the frozen congested diagram") {
  // P'=(3,3,3), A'=(1,2,3): the counterfactual queue holds flights airborne
  QueueingDiagram d;
  d.airport = "EWR";
  d.first = QuarterIndex{0};
  d.actual = {1, 2, 3};
  d.planned_model = {3, 3, 3};
  d.served_model = {1, 2, 3};
  d.capacity = {1, 1, 1};
  const ExcessDelayResult r = queueing::excess_delay(d, 3);
  CHECK(r.excess_delay_min == 0.0);
  CHECK(r.airborne_increase_min == 45.0);
}

TEST_CASE("identical curves carry no excess") {
  QueueingDiagram d;
  d.airport = "EWR";
  d.first = QuarterIndex{0};
  d.actual = {1, 2};
  d.planned_model = {1, 2};
  d.served_model = {1, 2};
  d.capacity = {2, 2};
  const ExcessDelayResult r = queueing::excess_delay(d, 2);
  CHECK(r.excess_delay_min == 0.0);
  CHECK(r.airborne_increase_min == 0.0);
}

TEST_CASE("zero restricted flights still reports the totals") {
  QueueingDiagram d;
  d.airport = "EWR";
  d.first = QuarterIndex{0};
  d.actual = {0, 2, 3};
  d.planned_model = {2, 3, 3};
  d.served_model = {2, 3, 3};
  d.capacity = {4, 4, 4};
  try {
    queueing::excess_delay(d, 0);
    FAIL("expected NoRestrictedFlights");
  } catch (const NoRestrictedFlights& e) {
    CHECK(e.excess_delay_min() == 45.0);
    CHECK(e.airborne_increase_min() == 0.0);
  }
}

TEST_CASE("three flights against capacity two spill one quarter") {
  const std::vector<ArrivalSample> samples{sample(at(1, 0), 45), sample(at(1, 5), 45),
                                           sample(at(1, 10), 45)};
  // model demand all in quarter 0 (00:15..00:25), capacity 2/quarter
  const auto d = queueing::build_diagram(samples, CapacitySeries::constant(2.0), "EWR");
  CHECK(d.first.value == 1);  // model demand opens at quarter 1 (00:15)
  REQUIRE(d.size() >= 2);
  CHECK(d.served_model[0] == 2);
  CHECK(d.served_model[1] == 3);
  CHECK(d.planned_model[0] == 3);
}

TEST_CASE("ample capacity serves demand as planned") {
  const std::vector<ArrivalSample> samples{sample(at(1, 0), 30), sample(at(2, 0), 60),
                                           sample(at(3, 0), 0)};
  const auto d = queueing::build_diagram(samples, CapacitySeries::constant(50.0), "EWR");
  CHECK(d.served_model == d.planned_model);
  CHECK(d.served_model.back() == 3);
  CHECK(d.actual.back() == 3);
}

TEST_CASE("zero delays collapse all three curves") {
  const std::vector<ArrivalSample> samples{sample(at(1, 0), 0), sample(at(2, 0), 0)};
  const auto d = queueing::build_diagram(samples, CapacitySeries::constant(4.0), "EWR");
  CHECK(d.actual == d.planned_model);
  CHECK(d.actual == d.served_model);
}

TEST_CASE("fractional capacity is carried, not rounded") {
  // 0.5/quarter: quarters alternate serving 0 and 1
  std::vector<ArrivalSample> samples;
  for (int i = 0; i < 4; ++i) samples.push_back(sample(at(2, 0) + i, 120));
  const auto d = queueing::build_diagram(samples, CapacitySeries::constant(0.5), "EWR");
  REQUIRE(d.size() >= 8);
  // all demand lands in the first quarter; cumulative served 0,1,1,2,2,3,3,4
  CHECK(d.served_model[0] == 0);
  CHECK(d.served_model[1] == 1);
  CHECK(d.served_model[3] == 2);
  CHECK(d.served_model[5] == 3);
  CHECK(d.served_model[7] == 4);
}

TEST_CASE("a sample landing before its counterfactual is rejected") {
  const std::vector<ArrivalSample> bad{{at(1, 0), at(1, 30)}};
  CHECK_THROWS_AS(queueing::build_diagram(bad, CapacitySeries::constant(2.0), "EWR"),
                  InvariantViolation);
}

TEST_CASE("a missing rate without fallback is an error") {
  const std::vector<ArrivalSample> samples{sample(at(0, 30), 20), sample(at(0, 35), 20)};
  // rates defined only for quarter 0; the backlog needs quarter 1
  const CapacitySeries series(QuarterIndex{0}, {1.0});
  CHECK_THROWS_AS(queueing::build_diagram(samples, series, "EWR"), UnderdefinedCapacity);

  const CapacitySeries with_fallback(QuarterIndex{0}, {1.0}, 1.0);
  const auto d = queueing::build_diagram(samples, with_fallback, "EWR");
  CHECK(d.fallback_quarters > 0);
  CHECK(d.served_model.back() == 2);
}

TEST_CASE("diagram invariants hold on random instances") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const RandomInstance inst = random_instance(seed);
    const auto d = queueing::build_diagram(inst.samples, inst.series, "EWR");
    REQUIRE(d.actual.size() == d.size());
    REQUIRE(d.planned_model.size() == d.size());
    REQUIRE(d.served_model.size() == d.size());
    const auto n = static_cast<std::int64_t>(inst.samples.size());
    CHECK(d.actual.back() == n);
    CHECK(d.planned_model.back() == n);
    CHECK(d.served_model.back() == n);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d.served_model[i] <= d.planned_model[i]);  // service never precedes demand
      if (i > 0) {
        CHECK(d.actual[i] >= d.actual[i - 1]);
        CHECK(d.planned_model[i] >= d.planned_model[i - 1]);
        CHECK(d.served_model[i] >= d.served_model[i - 1]);
      }
    }
  }
}

TEST_CASE("bucketed counts match the continuous-time oracle") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const RandomInstance inst = random_instance(seed);
    const auto d = queueing::build_diagram(inst.samples, inst.series, "EWR");
    const auto served = synth::oracle_queue(inst.oracle_in, inst.oracle_cap);

    // bucket the oracle's served instants over the diagram's range
    std::vector<std::int64_t> oracle_cum(d.size(), 0);
    for (const TimePoint t : served) {
      const auto idx = quarter_of(t).value - d.first.value;
      REQUIRE(idx >= 0);
      REQUIRE(idx < static_cast<std::int64_t>(d.size()));
      ++oracle_cum[static_cast<std::size_t>(idx)];
    }
    for (std::size_t i = 1; i < oracle_cum.size(); ++i) oracle_cum[i] += oracle_cum[i - 1];
    CAPTURE(seed);
    CHECK(d.served_model == oracle_cum);
  }
}

TEST_CASE("the curve gap equals the oracle's per-flight shift total") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const RandomInstance inst = random_instance(seed);
    const auto d = queueing::build_diagram(inst.samples, inst.series, "EWR");
    const auto served = synth::oracle_queue(inst.oracle_in, inst.oracle_cap);

    // raw curve gap, before the non-negativity clamp of the reported excess
    std::int64_t gap_units = 0;
    for (std::size_t i = 0; i < d.size(); ++i) gap_units += d.served_model[i] - d.actual[i];

    std::int64_t shift_min = 0;
    for (std::size_t i = 0; i < served.size(); ++i) {
      const auto actual_q = quarter_of(inst.samples[i].actual_wheels_on).value;
      const auto served_q = quarter_of(served[i]).value;
      shift_min += (actual_q - served_q) * kMinutesPerQuarter;
    }
    CAPTURE(seed);
    CHECK(gap_units * kMinutesPerQuarter == shift_min);

    const auto r = queueing::excess_delay(d, static_cast<std::int64_t>(inst.samples.size()));
    CHECK(r.excess_delay_min ==
          static_cast<double>(std::max<std::int64_t>(gap_units, 0) * kMinutesPerQuarter));
    if (gap_units < 0) CHECK(d.model_below_actual);
  }
}

TEST_CASE("more controlled delay never reduces the excess") {
  // constant whole-number capacity so the credit phase cannot shift when the
  // demand curve opens earlier
  Rng rng(11);
  std::vector<ArrivalSample> base;
  for (int i = 0; i < 30; ++i) {
    const TimePoint planned{rng.uniform_int(0, 24 * 60 - 1)};
    base.push_back({planned + rng.uniform_int(0, 120), planned});
  }
  const auto cap = CapacitySeries::constant(2.0);
  const auto d0 = queueing::build_diagram(base, cap, "EWR");
  const double e0 =
      queueing::excess_delay(d0, static_cast<std::int64_t>(base.size())).excess_delay_min;
  for (std::size_t k = 0; k < base.size(); k += 5) {
    auto bumped = base;
    bumped[k].model_wheels_on = bumped[k].model_wheels_on - 30;  // 30 more delay removed
    const auto d1 = queueing::build_diagram(bumped, cap, "EWR");
    const double e1 =
        queueing::excess_delay(d1, static_cast<std::int64_t>(bumped.size())).excess_delay_min;
    CHECK(e1 >= e0);
  }
}

TEST_CASE("empty arrivals build an empty diagram") {
  const std::vector<ArrivalSample> none;
  const auto d = queueing::build_diagram(none, CapacitySeries::constant(2.0), "EWR");
  CHECK(d.size() == 0);
  CHECK(d.airport == "EWR");
}
