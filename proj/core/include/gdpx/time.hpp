#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gdpx {

/// Minutes since the run epoch (a configured midnight, UTC). All times in one
/// run share a single epoch so quarter-hour buckets line up exactly.
struct TimePoint {
  std::int64_t minutes{0};

  friend auto operator<=>(const TimePoint&, const TimePoint&) = default;
};

inline TimePoint operator+(TimePoint t, std::int64_t m) { return TimePoint{t.minutes + m}; }
inline TimePoint operator-(TimePoint t, std::int64_t m) { return TimePoint{t.minutes - m}; }
inline std::int64_t operator-(TimePoint a, TimePoint b) { return a.minutes - b.minutes; }

/// 15-minute bucket number from the run epoch.
struct QuarterIndex {
  std::int64_t value{0};

  friend auto operator<=>(const QuarterIndex&, const QuarterIndex&) = default;
};

inline constexpr std::int64_t kMinutesPerQuarter = 15;

/// Bucket containing t: [15k, 15k + 15). Floor semantics for negative t.
QuarterIndex quarter_of(TimePoint t);

/// First minute of a quarter bucket.
TimePoint quarter_start(QuarterIndex q);

/// Run epoch expressed as minutes since 1970-01-01T00:00Z.
struct Epoch {
  std::int64_t abs_minutes{0};

  friend auto operator<=>(const Epoch&, const Epoch&) = default;
};

/// Strict ISO-8601 minute timestamp, exactly "YYYY-MM-DDTHH:MMZ".
/// Returns minutes since 1970-01-01T00:00Z.
/// Throws MalformedRow-free std::invalid_argument; callers wrap with context.
std::int64_t parse_iso_minutes(std::string_view text);

/// Inverse of parse_iso_minutes.
std::string format_iso_minutes(std::int64_t abs_minutes);

/// Parses an ISO timestamp relative to the run epoch.
TimePoint parse_time(std::string_view text, Epoch epoch);

/// Formats a run-relative time back to the canonical ISO form.
std::string format_time(TimePoint t, Epoch epoch);

/// Midnight UTC on the day containing the given absolute minute.
std::int64_t floor_to_midnight(std::int64_t abs_minutes);

}  // namespace gdpx
