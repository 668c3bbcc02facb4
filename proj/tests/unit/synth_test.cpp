#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gdpx/classifier.hpp"
#include "gdpx/errors.hpp"
#include "gdpx/gdp_lifecycle.hpp"
#include "gdpx/rng.hpp"
#include "gdpx/synth.hpp"
#include "json.hpp"
#include "test_helpers.hpp"

using namespace gdpx;
using gdpx::testing::at;

namespace {

synth::ScenarioConfig small_config() {
  synth::ScenarioConfig cfg;
  cfg.seed = 5;
  cfg.n_gdps = 2;
  cfg.flights_per_quarter = 3.0;
  cfg.pre_window_quarters = 8;
  cfg.post_window_quarters = 8;
  cfg.min_window_quarters = 12;
  cfg.max_window_quarters = 16;
  return cfg;
}

}  // namespace

TEST_CASE("slot assignment pushes the second same-quarter flight back") {
  const std::vector<synth::RbsFlight> flights{{at(16, 0), 90}, {at(16, 5), 60}};
  const RateSchedule par{{quarter_of(at(16, 0)), 1.0}};
  const auto slots = synth::rbs_assign(flights, par, at(16, 0), at(17, 0));
  REQUIRE(slots.size() == 2);
  CHECK(slots[0].cta == at(16, 0));   // first flight keeps its scheduled arrival
  CHECK(slots[0].edct == at(14, 30));  // controlled departure = arrival − enroute
  CHECK(slots[1].cta == at(16, 15));  // one quarter later: its own quarter was full
  CHECK(slots[1].edct == at(15, 15));
}

TEST_CASE("ample program rate leaves every scheduled arrival in place") {
  std::vector<synth::RbsFlight> flights;
  for (int i = 0; i < 6; ++i) flights.push_back({at(16, 0) + i * 7, 120});
  const RateSchedule par{{quarter_of(at(16, 0)), 10.0}};
  const auto slots = synth::rbs_assign(flights, par, at(16, 0), at(18, 0));
  for (std::size_t i = 0; i < flights.size(); ++i) {
    CHECK(slots[i].cta == flights[i].srta);
    CHECK(slots[i].edct == flights[i].srta - 120);
  }
}

TEST_CASE("fractional program rates release whole slots on the credit grid") {
  // 0.5 slots per quarter anchored at the start quarter: the first whole
  // slot opens in the second quarter
  const std::vector<synth::RbsFlight> flights{{at(16, 0), 60}};
  const RateSchedule par{{quarter_of(at(16, 0)), 0.5}};
  const auto slots = synth::rbs_assign(flights, par, at(16, 0), at(17, 0));
  CHECK(slots[0].cta == at(16, 15));
}

TEST_CASE("the last program rate extends past the window end") {
  std::vector<synth::RbsFlight> flights;
  for (int i = 0; i < 3; ++i) flights.push_back({at(16, 45) + i, 60});
  const RateSchedule par{{quarter_of(at(16, 0)), 1.0}};
  const auto slots = synth::rbs_assign(flights, par, at(16, 0), at(17, 0));
  CHECK(slots[0].cta == at(16, 45));
  CHECK(slots[1].cta == at(17, 0));  // beyond the planned end, same rate
  CHECK(slots[2].cta == at(17, 15));
}

TEST_CASE("slot assignment validates its inputs") {
  const RateSchedule par{{quarter_of(at(16, 0)), 1.0}};
  const std::vector<synth::RbsFlight> unsorted{{at(16, 30), 60}, {at(16, 0), 60}};
  CHECK_THROWS_AS(synth::rbs_assign(unsorted, par, at(16, 0), at(17, 0)), ConfigError);

  const std::vector<synth::RbsFlight> one{{at(16, 0), 60}};
  const RateSchedule stopped{{quarter_of(at(16, 0)), 0.0}};
  CHECK_THROWS_AS(synth::rbs_assign(one, stopped, at(16, 0), at(17, 0)), ConfigError);
}

TEST_CASE("unlimited capacity serves the reference queue as planned") {
  const std::vector<synth::OracleFlight> flights{
      {"A", at(9, 3)}, {"B", at(9, 3)}, {"C", at(11, 59)}};
  const synth::OracleCapacity cap{QuarterIndex{0}, {}, 1000.0};
  const auto served = synth::oracle_queue(flights, cap);
  REQUIRE(served.size() == 3);
  CHECK(served[0] == at(9, 3));
  CHECK(served[1] == at(9, 3));
  CHECK(served[2] == at(11, 59));
}

TEST_CASE("three simultaneous flights drain one per quarter") {
  const std::vector<synth::OracleFlight> flights{
      {"A", TimePoint{0}}, {"B", TimePoint{0}}, {"C", TimePoint{0}}};
  const synth::OracleCapacity cap{QuarterIndex{0}, {}, 1.0};
  const auto served = synth::oracle_queue(flights, cap);
  CHECK(quarter_of(served[0]).value == 0);
  CHECK(quarter_of(served[1]).value == 1);
  CHECK(quarter_of(served[2]).value == 2);
  CHECK(served[0] == TimePoint{0});  // own quarter: the planned instant survives
  CHECK(served[1] == quarter_start(QuarterIndex{1}));
}

TEST_CASE("the reference queue is invariant under input permutation") {
  Rng rng(3);
  std::vector<synth::OracleFlight> flights;
  for (int i = 0; i < 40; ++i) {
    flights.push_back({"F" + std::to_string(i), TimePoint{rng.uniform_int(0, 600)}});
  }
  const synth::OracleCapacity cap{QuarterIndex{0}, {2, 2, 0, 1, 3, 2, 1}, 2.0};
  const auto base = synth::oracle_queue(flights, cap);

  std::map<std::string, TimePoint> by_id;
  for (std::size_t i = 0; i < flights.size(); ++i) by_id[flights[i].id] = base[i];

  auto shuffled = flights;
  rng.shuffle(shuffled);
  const auto again = synth::oracle_queue(shuffled, cap);
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    CHECK(again[i] == by_id[shuffled[i].id]);
  }
}

TEST_CASE("a queue that can never drain is rejected") {
  const std::vector<synth::OracleFlight> flights{{"A", TimePoint{0}}, {"B", TimePoint{0}}};
  const synth::OracleCapacity cap{QuarterIndex{0}, {1.0}, 0.0};
  CHECK_THROWS_AS(synth::oracle_queue(flights, cap), InvariantViolation);
}

TEST_CASE("scenario configs parse strictly") {
  const synth::ScenarioConfig defaults = synth::parse_scenario_config("{}");
  CHECK(defaults.seed == 1);
  CHECK(defaults.n_gdps == 6);
  CHECK(defaults.capacity_mode == "par");

  const synth::ScenarioConfig tuned =
      synth::parse_scenario_config(R"({"seed": 9, "n_gdps": 2, "capacity_mode": "nominal"})");
  CHECK(tuned.seed == 9);
  CHECK(tuned.n_gdps == 2);
  CHECK(tuned.capacity_mode == "nominal");

  CHECK_THROWS_AS(synth::parse_scenario_config(R"({"n_gdp": 2})"), ConfigError);
  CHECK_THROWS_AS(synth::parse_scenario_config("not json"), ConfigError);
}

TEST_CASE("config validation rejects off-grid rates and bad windows") {
  synth::ScenarioConfig cfg;
  cfg.nominal_rate = 13.7;  // credit arithmetic needs an integral nominal rate
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = synth::ScenarioConfig{};
  cfg.par_low = 6.1;  // program rates live on the quarter-unit grid
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = synth::ScenarioConfig{};
  cfg.min_window_quarters = 20;
  cfg.max_window_quarters = 10;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = synth::ScenarioConfig{};
  cfg.capacity_mode = "half";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("equal configs generate identical scenarios") {
  const synth::ScenarioConfig cfg = small_config();
  const synth::Scenario a = synth::generate_scenario(cfg);
  const synth::Scenario b = synth::generate_scenario(cfg);
  CHECK(a.flights == b.flights);
  CHECK(a.quarters == b.quarters);
  CHECK(a.advisories == b.advisories);
  CHECK(synth::ground_truth_json(a.truth, a.epoch) ==
        synth::ground_truth_json(b.truth, b.epoch));

  synth::ScenarioConfig other = cfg;
  other.seed = 6;
  const synth::Scenario c = synth::generate_scenario(other);
  CHECK(a.flights != c.flights);
}

TEST_CASE("the classifier recovers every planted class and delay") {
  const synth::Scenario s = synth::generate_scenario(small_config());
  const auto programs = lifecycle::assemble_programs(s.advisories);
  REQUIRE(programs.size() == 2);

  // (gdp_key, flight_id) -> classified outcome
  std::map<std::pair<std::string, std::string>, ClassifiedFlight> got;
  for (const GdpProgram& p : programs) {
    std::vector<FlightRecord> slice;
    for (const FlightRecord& f : s.flights) {
      if (f.dest == p.airport) slice.push_back(f);
    }
    const auto classes = classifier::classify_all(slice, p);
    for (std::size_t i = 0; i < slice.size(); ++i) {
      got[{p.gdp_key, slice[i].flight_id}] = classes[i];
    }
  }

  std::map<std::string, std::int64_t> planted_per_gdp;
  std::size_t labelled = 0;
  for (const synth::FlightTruth& t : s.truth.flights) {
    if (t.gdp_key.empty()) continue;
    ++labelled;
    const auto it = got.find({t.gdp_key, t.flight_id});
    REQUIRE_MESSAGE(it != got.end(), t.flight_id);
    CAPTURE(t.flight_id);
    CHECK(class_token(it->second.klass) == t.klass);
    CHECK(it->second.gdp_delay_min == t.planted_delay_min);
    planted_per_gdp[t.gdp_key] += t.planted_delay_min;
  }
  CHECK(labelled > 0);

  for (const synth::GdpTruth& g : s.truth.gdps) {
    CHECK(planted_per_gdp[g.gdp_key] == g.total_planted_delay_min);
  }
}

TEST_CASE("ground truth serializes with both sections") {
  const synth::Scenario s = synth::generate_scenario(small_config());
  const auto parsed = nlohmann::json::parse(synth::ground_truth_json(s.truth, s.epoch));
  REQUIRE(parsed.contains("flights"));
  REQUIRE(parsed.contains("gdps"));
  CHECK(parsed["flights"].size() == s.truth.flights.size());
  CHECK(parsed["gdps"].size() == s.truth.gdps.size());
  REQUIRE_FALSE(s.truth.gdps.empty());
  CHECK(parsed["gdps"][0].contains("excess_per_rf_min"));
}

TEST_CASE("written scenarios round-trip through the parsers") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gdpx-synth-roundtrip";
  fs::remove_all(dir);

  const synth::Scenario s = synth::generate_scenario(small_config());
  synth::write_scenario(s, dir);
  for (const char* name :
       {"flights.csv", "quarters.csv", "advisories.csv", "ground_truth.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }

  std::ifstream in(dir / "flights.csv");
  const std::vector<FlightRecord> parsed = flightdata::parse_flights(in, s.epoch);
  CHECK(parsed == s.flights);
  fs::remove_all(dir);
}
