#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdpx/flightdata.hpp"
#include "gdpx/time.hpp"

namespace gdpx {

/// A reconstructed ground delay program: the release parameters with every
/// revision folded in. `start`, `planned_end` and the scope sets hold the
/// last-revised values; `initial_par` keeps the schedule as released and
/// `final_par` the schedule after the last revision that touched it.
struct GdpProgram {
  std::string gdp_key;
  std::string airport;
  TimePoint release_time{};            // ADL time of the release event
  TimePoint start{};
  TimePoint planned_end{};
  std::optional<TimePoint> cancel_time;  // ADL time of the cancel event
  RateSchedule initial_par;
  RateSchedule final_par;
  std::vector<std::string> scope_us;   // sorted origin codes
  std::vector<std::string> scope_ca;   // sorted origin codes
  Cause cause{Cause::Wind};
  std::vector<AdvisoryEvent> revisions;  // in ADL-time order

  /// True when a cancel event ended the program before its planned end.
  bool cancelled_early() const { return cancel_time && *cancel_time < planned_end; }

  /// Cancel time when cancelled early, planned end otherwise. Flights with a
  /// scheduled runway arrival past this instant no longer receive slots.
  TimePoint effective_end() const { return cancelled_early() ? *cancel_time : planned_end; }

  /// Whether `origin` belongs to the restricted scope (either tier).
  bool contains_origin(std::string_view origin) const;

  friend bool operator==(const GdpProgram&, const GdpProgram&) = default;
};

/// Duration decomposition of one program's lifecycle, in hours:
/// `gt_hr` from release to start, `et_hr` from start to planned end, and
/// `ct_hr` the tail cut off by an early cancel (zero when the program ran to
/// its planned end). `cnt_r` counts revision events; a cancel is not a
/// revision.
struct LifecycleTimes {
  double et_hr{0.0};
  double gt_hr{0.0};
  double ct_hr{0.0};
  int cnt_r{0};

  friend bool operator==(const LifecycleTimes&, const LifecycleTimes&) = default;
};

namespace lifecycle {

enum class ParSeries { Initial, Final };

/// Merges validated advisory events into one program per gdp_key. Events are
/// re-sorted by ADL time within each key, so the result does not depend on
/// interleaving across keys. Throws OrphanEvent when a key's earliest event
/// is not a release, InvariantViolation for duplicate releases, events after
/// a cancel, or inconsistent assembled fields, and OverlapError when two
/// programs at one airport have intersecting [start, planned_end) windows.
/// Programs are returned sorted by (airport, start, gdp_key).
std::vector<GdpProgram> assemble_programs(std::span<const AdvisoryEvent> events);

/// Derives the lifecycle durations of an assembled program.
LifecycleTimes program_times(const GdpProgram& p);

/// Program rate for quarter `q` from the requested schedule, step-function
/// semantics (a breakpoint's rate holds until the next breakpoint). Throws
/// OutOfWindow unless `q` intersects [start, planned_end).
double par_at(const GdpProgram& p, QuarterIndex q, ParSeries which);

}  // namespace lifecycle
}  // namespace gdpx
