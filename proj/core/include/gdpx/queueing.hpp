#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdpx/flightdata.hpp"
#include "gdpx/time.hpp"

namespace gdpx {

/// Cumulative-count queueing diagram over a contiguous quarter range starting
/// at `first`. Index i covers quarter first+i. `actual` counts observed
/// landings (A), `planned_model` the counterfactual demand with controlled
/// delay removed (P'), and `served_model` the counterfactual landings after
/// pushing that demand through the observed capacity first-come first-served
/// (A'). All three end at the same flight total once the queue drains.
struct QueueingDiagram {
  std::string airport;
  QuarterIndex first{};
  std::vector<std::int64_t> actual;
  std::vector<std::int64_t> planned_model;
  std::vector<std::int64_t> served_model;
  std::vector<double> capacity;        // service rate used per quarter
  std::int64_t fallback_quarters{0};   // quarters served at the fallback rate
  bool model_below_actual{false};      // capacity data below observed landings

  std::size_t size() const { return actual.size(); }
  QuarterIndex quarter_at(std::size_t i) const {
    return QuarterIndex{first.value + static_cast<std::int64_t>(i)};
  }
};

/// Delay split derived from one diagram. `excess_delay_min` is the ground
/// delay beyond what the observed capacity forced (the gap between A' and A);
/// `airborne_increase_min` is the queueing delay the counterfactual would
/// move into the air (the gap between P' and A').
struct ExcessDelayResult {
  double excess_delay_min{0.0};
  double excess_per_rf_min{0.0};
  double airborne_increase_min{0.0};
  std::int64_t rf_count{0};

  friend bool operator==(const ExcessDelayResult&, const ExcessDelayResult&) = default;
};

namespace queueing {

/// One flight's observed landing time and its counterfactual landing time
/// with the controlled delay removed.
struct ArrivalSample {
  TimePoint actual_wheels_on{};
  TimePoint model_wheels_on{};
};

/// Per-quarter service rates over a data range, with an optional fallback
/// rate for quarters outside it. Lookups outside the range without a
/// fallback throw UnderdefinedCapacity.
class CapacitySeries {
 public:
  CapacitySeries(QuarterIndex first, std::vector<double> rates,
                 std::optional<double> fallback = std::nullopt);

  /// Series with no data range: every quarter serves at `rate`.
  static CapacitySeries constant(double rate);

  double at(QuarterIndex q) const;
  bool in_range(QuarterIndex q) const;
  std::optional<double> fallback() const { return fallback_; }

 private:
  QuarterIndex first_{};
  std::vector<double> rates_;
  std::optional<double> fallback_;
};

/// Counterfactual landing time: the observed landing moved earlier by the
/// controlled delay. Observed taxi-out and airborne durations are kept
/// verbatim, so this equals actual_wheels_on − gdp_delay_min.
TimePoint model_wheels_on(const FlightRecord& f, std::int64_t gdp_delay_min);

/// Builds the three cumulative curves. The range starts at the earliest
/// counterfactual demand quarter (or `first_quarter` if given and earlier)
/// and runs until the last observed landing, extending further only while a
/// backlog remains. Fractional capacity is integerized per quarter with a
/// carry accumulator: credit += rate, the floor of the credit serves, and
/// only the fractional remainder carries to the next quarter, so the credit
/// phase is anchored at the range start. Throws InvariantViolation when a
/// sample's counterfactual landing is later than its observed one, and
/// UnderdefinedCapacity when a needed quarter has no rate.
QueueingDiagram build_diagram(std::span<const ArrivalSample> arrivals,
                              const CapacitySeries& capacity, std::string airport,
                              std::optional<QuarterIndex> first_quarter = std::nullopt);

/// Sums the two areas between the curves: excess_delay_min = 15·Σ(A'−A),
/// airborne_increase_min = 15·Σ(P'−A'). The excess total is clamped at zero
/// when capacity data is inconsistent with observed landings (the diagram's
/// model_below_actual flag marks that case). Throws NoRestrictedFlights when
/// rf_count is zero; the exception carries both totals.
ExcessDelayResult excess_delay(const QueueingDiagram& d, std::int64_t rf_count);

}  // namespace queueing
}  // namespace gdpx
