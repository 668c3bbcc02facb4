#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdpx/time.hpp"

namespace gdpx {

/// One arrival flight: schedule, flight plan, EDCT control time and actuals.
/// All times are run-relative minutes; `edct_wheels_off` is absent for
/// flights that never received a control time.
struct FlightRecord {
  std::string flight_id;
  std::string origin;
  std::string dest;
  TimePoint sched_gate_arr{};
  TimePoint fp_gate_out{};
  TimePoint fp_wheels_off{};
  std::int64_t ete_min{0};
  std::int64_t unimpeded_taxi_out_min{0};
  std::optional<TimePoint> edct_wheels_off;
  TimePoint actual_gate_out{};
  TimePoint actual_wheels_off{};
  TimePoint actual_wheels_on{};
  TimePoint actual_gate_in{};
  bool cancelled{false};

  std::int64_t actual_taxi_out_min() const { return actual_wheels_off - actual_gate_out; }
  std::int64_t actual_airborne_min() const { return actual_wheels_on - actual_wheels_off; }

  friend bool operator==(const FlightRecord&, const FlightRecord&) = default;
};

/// Observed airport acceptance rate for one quarter hour, in flights per
/// quarter. At most one record per (airport, quarter).
struct QuarterHourRecord {
  std::string airport;
  QuarterIndex quarter{};
  double arr_rate{0.0};

  friend bool operator==(const QuarterHourRecord&, const QuarterHourRecord&) = default;
};

enum class AdvisoryKind { Release, Revision, Cancel };

enum class Cause { Wind, SnowIce, LowCeiling, Thunderstorms, RunwayConstruction };

/// Step-function rate schedule: each breakpoint's rate holds until the next
/// breakpoint. Breakpoints are strictly ascending by quarter.
struct RateBreakpoint {
  QuarterIndex quarter{};
  double rate{0.0};

  friend bool operator==(const RateBreakpoint&, const RateBreakpoint&) = default;
};
using RateSchedule = std::vector<RateBreakpoint>;

/// A GDP release, revision or cancellation event as advised. Optional fields
/// follow the event kind: a Release carries the full program definition, a
/// Revision carries only the parameters it changes, a Cancel carries nothing
/// beyond its ADL time.
struct AdvisoryEvent {
  std::string gdp_key;
  std::string airport;
  AdvisoryKind kind{AdvisoryKind::Release};
  TimePoint adl_time{};
  std::optional<TimePoint> start;
  std::optional<TimePoint> end;
  std::optional<RateSchedule> par;
  std::optional<std::vector<std::string>> scope_us;
  std::optional<std::vector<std::string>> scope_ca;
  std::optional<Cause> cause;

  friend bool operator==(const AdvisoryEvent&, const AdvisoryEvent&) = default;
};

const std::string& cause_token(Cause c);

/// Maps advisory cause text to the five-way cause taxonomy. The built-in
/// table accepts the canonical tokens plus common advisory spellings; extra
/// entries can be loaded from a lookup CSV (pattern,canonical). Unknown
/// causes are rejected at ingestion.
class CauseMap {
 public:
  static CauseMap builtin();

  /// Adds `pattern -> cause`; patterns are matched case-insensitively.
  void add(std::string pattern, Cause cause);

  /// Loads extra rows from a two-column CSV stream.
  void load(std::istream& in);

  Cause canonicalize(std::string_view text) const;  // throws on unknown cause

 private:
  std::map<std::string, Cause> table_;
};

namespace flightdata {

/// Row-level outcome when parsing with error collection: the pipeline's
/// accounting invariant is rows_in == records.size() + errors.size().
template <typename T>
struct ParseOutcome {
  std::vector<T> records;
  std::vector<std::string> errors;
  std::size_t rows_in{0};
};

/// Strict CSV ingestion. The throwing forms stop at the first bad row; the
/// *_collect forms keep going and report every failure.
std::vector<FlightRecord> parse_flights(std::istream& in, Epoch epoch);
ParseOutcome<FlightRecord> parse_flights_collect(std::istream& in, Epoch epoch);

std::vector<QuarterHourRecord> parse_quarters(std::istream& in, Epoch epoch);
ParseOutcome<QuarterHourRecord> parse_quarters_collect(std::istream& in, Epoch epoch);

std::vector<AdvisoryEvent> parse_advisories(std::istream& in, Epoch epoch,
                                            const CauseMap& causes = CauseMap::builtin());
ParseOutcome<AdvisoryEvent> parse_advisories_collect(std::istream& in, Epoch epoch,
                                                     const CauseMap& causes = CauseMap::builtin());

/// Canonical serialization; parse(serialize(x)) == x, and serialize(parse(s))
/// reproduces canonical input byte-for-byte.
std::string serialize_flights(std::span<const FlightRecord> records, Epoch epoch);
std::string serialize_quarters(std::span<const QuarterHourRecord> records, Epoch epoch);
std::string serialize_advisories(std::span<const AdvisoryEvent> events, Epoch epoch);

/// Scheduled runway time of arrival: scheduled gate arrival minus taxi-in.
TimePoint srta(const FlightRecord& f, std::int64_t taxi_in_min = 10);

inline constexpr std::int64_t kDefaultTaxiInMin = 10;

}  // namespace flightdata
}  // namespace gdpx
