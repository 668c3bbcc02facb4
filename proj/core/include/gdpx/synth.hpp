#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gdpx/flightdata.hpp"
#include "gdpx/time.hpp"

namespace gdpx::synth {

/// Noise applied to one planned quantity: a truncated normal draw in
/// minutes. Zero mean and zero sd reproduce the plan exactly.
struct NoiseBand {
  double mean{0.0};
  double sd{0.0};
};

/// Full description of a synthetic scenario. One program is generated per
/// entry of the (airport, day) round-robin; every draw comes from streams
/// derived from `seed`, so equal configs produce byte-identical outputs.
///
/// Rates are kept on a quarter-unit grid (multiples of 0.25 flights per
/// quarter) and the nominal rate integral, so capacity credit arithmetic is
/// exact in binary floating point end to end.
struct ScenarioConfig {
  std::uint64_t seed{1};
  std::int64_t n_gdps{6};
  std::vector<std::string> airports{"EWR", "BOS", "JFK", "LGA", "ORD", "PHL", "SEA", "SFO"};
  std::string start_date{"2019-03-01"};  // day 0, midnight UTC

  // origin pools: two restricted tiers plus never-restricted origins
  std::int64_t origins_us{12};
  std::int64_t origins_ca{4};
  std::int64_t origins_other{8};

  // arrival demand (flights per quarter) around the program window
  double flights_per_quarter{10.0};
  double offpeak_fraction{0.35};
  std::int64_t pre_window_quarters{16};
  std::int64_t post_window_quarters{16};

  // program shape
  std::int64_t min_window_quarters{12};
  std::int64_t max_window_quarters{28};
  std::int64_t min_lead_quarters{2};
  std::int64_t max_lead_quarters{8};
  std::int64_t start_hour_low{14};
  std::int64_t start_hour_high{18};
  double par_low{6.0};
  double par_high{10.0};
  double revise_probability{0.5};
  double cancel_probability{0.25};

  // observed capacity: nominal off-program; during the window either the
  // last-revised program rate times capacity_ratio ("par") or nominal
  // throughout ("nominal"). capacity_jitter_sd adds a grid-quantized
  // per-quarter wobble to the in-window "par" rate, so delivered throughput
  // is not an exact function of the program rate (zero keeps it exact).
  double nominal_rate{14.0};
  std::string capacity_mode{"par"};
  double capacity_ratio{1.0};
  double capacity_jitter_sd{0.0};

  // flight-plan draws
  std::int64_t ete_low_min{45};
  std::int64_t ete_high_min{300};
  std::int64_t taxi_out_low_min{10};
  std::int64_t taxi_out_high_min{25};
  std::int64_t taxi_in_min{10};
  double flight_cancel_probability{0.0};

  NoiseBand noise_gate_out{};
  NoiseBand noise_taxi_out{};
  NoiseBand noise_enroute{};

  /// Throws ConfigError on infeasible windows, non-integral nominal rate,
  /// off-grid program rates, or empty pools.
  void validate() const;
};

/// Strict JSON loader: unknown keys are rejected, absent keys keep their
/// defaults. Throws ConfigError on malformed input.
ScenarioConfig parse_scenario_config(const std::string& json_text);

/// The method's expected outputs for one generated flight. `planted_delay`
/// is the controlled-delay value the measurement formulas should recover;
/// `counterfactual_wheels_on` is where the oracle lands the flight once that
/// delay is removed (equal to the actual landing for uncontrolled flights).
struct FlightTruth {
  std::string flight_id;
  std::string gdp_key;  // empty for flights outside every program
  std::string klass;    // expected class token: IF/CF/EF/UN
  std::int64_t planted_delay_min{0};
  TimePoint counterfactual_wheels_on{};
};

/// Oracle-computed outcome for one generated program.
struct GdpTruth {
  std::string gdp_key;
  std::string airport;
  std::int64_t rf_count{0};
  std::int64_t total_planted_delay_min{0};
  double excess_delay_min{0.0};
  double excess_per_rf_min{0.0};  // 0 when rf_count is 0
  double airborne_increase_min{0.0};
};

struct GroundTruth {
  std::vector<FlightTruth> flights;
  std::vector<GdpTruth> gdps;
};

/// A generated scenario: parseable records plus the labels a correct
/// pipeline must reproduce.
struct Scenario {
  Epoch epoch{};
  std::vector<FlightRecord> flights;
  std::vector<QuarterHourRecord> quarters;
  std::vector<AdvisoryEvent> advisories;
  GroundTruth truth;
};

/// One flight as seen by slot assignment: scheduled runway arrival and
/// planned enroute duration.
struct RbsFlight {
  TimePoint srta{};
  std::int64_t ete_min{0};
};

struct RbsSlot {
  TimePoint cta{};   // controlled arrival: max(srta, assigned quarter start)
  TimePoint edct{};  // controlled wheels-off: cta − ete
};

/// Ration-by-schedule: flights (sorted by srta) take the earliest quarter at
/// or after their scheduled arrival with a free slot. Per-quarter slot
/// counts come from the program rate via the capacity credit rule, anchored
/// at the program start quarter; the last rate extends past `end` so late
/// overflow still gets slots. Throws ConfigError when input is unsorted or
/// a window rate is not positive.
std::vector<RbsSlot> rbs_assign(std::span<const RbsFlight> flights, const RateSchedule& par,
                                TimePoint start, TimePoint end);

/// One flight entering the reference queue.
struct OracleFlight {
  std::string id;
  TimePoint planned{};
};

/// Per-quarter service rates with a constant rate outside the data range.
struct OracleCapacity {
  QuarterIndex first{};
  std::vector<double> rates;
  double fallback{0.0};

  double at(QuarterIndex q) const;
};

/// Continuous-time first-come-first-served reference queue, independent of
/// the diagram implementation. Flights are served in (planned, id) order;
/// each lands at its planned instant when its quarter still has capacity,
/// otherwise at the start of the earliest later quarter with a free slot.
/// Per-quarter slots use the same credit integerization contract as the
/// diagram, anchored at the earliest planned quarter. The result is aligned
/// with the input order. Throws InvariantViolation when zero capacity can
/// never drain the queue.
std::vector<TimePoint> oracle_queue(std::span<const OracleFlight> flights,
                                    const OracleCapacity& capacity);

/// Generates the full scenario for a validated config.
Scenario generate_scenario(const ScenarioConfig& cfg);

/// Serialized ground truth (deterministic key order, ISO timestamps).
std::string ground_truth_json(const GroundTruth& truth, Epoch epoch);

/// Writes flights.csv, quarters.csv, advisories.csv and ground_truth.json
/// into `dir` (created if needed).
void write_scenario(const Scenario& s, const std::filesystem::path& dir);

}  // namespace gdpx::synth
