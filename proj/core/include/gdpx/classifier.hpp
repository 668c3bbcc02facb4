#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdpx/flightdata.hpp"
#include "gdpx/gdp_lifecycle.hpp"

namespace gdpx {

/// Role of one flight with respect to one program. InScope and CancelDelay
/// flights are the restricted flights (they executed controlled delay);
/// Exempt flights fall in the program window without a controlled delay;
/// Uninvolved covers everything else, including flights cancelled by their
/// operator.
enum class FlightClass { InScope, CancelDelay, Exempt, Uninvolved };

const std::string& class_token(FlightClass c);  // "IF", "CF", "EF", "UN"
FlightClass class_from_token(std::string_view token);

/// Classification outcome for one (flight, program) pair. `gdp_delay_min` is
/// the controlled delay the flight executed (zero for Exempt/Uninvolved);
/// `edct_delay_min` is the controlled push-back of the wheels-off time when
/// an EDCT exists, kept for reporting. Both are clamped at zero.
struct ClassifiedFlight {
  std::string flight_id;
  FlightClass klass{FlightClass::Uninvolved};
  std::int64_t gdp_delay_min{0};
  std::int64_t edct_delay_min{0};

  friend bool operator==(const ClassifiedFlight&, const ClassifiedFlight&) = default;
};

namespace classifier {

/// Anchor for the delay of in-scope flights whose flight plan had them off
/// the ground before the program start: the delay runs from the release
/// advisory (default) or from the program start.
enum class EarlyDepartureAnchor { Release, Start };

struct Options {
  std::int64_t taxi_in_min{flightdata::kDefaultTaxiInMin};
  EarlyDepartureAnchor early_anchor{EarlyDepartureAnchor::Release};
};

/// Assigns the (flight, program) class. Requires f.dest == p.airport.
/// The classes are mutually exclusive and exhaustive:
///  - InScope: scheduled runway arrival inside [start, effective_end), origin
///    in scope, and the flight was still on the ground at release.
///  - CancelDelay: program cancelled early, scheduled runway arrival inside
///    [cancel, planned_end), origin in scope, flight plan wheels-off before
///    the cancel, and an EDCT was issued.
///  - Exempt: scheduled runway arrival inside [start, planned_end) without
///    meeting either set of conditions (out-of-scope origin, or already
///    airborne at release).
///  - Uninvolved: scheduled runway arrival outside the window, or the flight
///    itself was cancelled.
FlightClass classify(const FlightRecord& f, const GdpProgram& p, const Options& opt = {});

/// Controlled delay executed by a restricted flight, in minutes, clamped at
/// zero:
///  - InScope, flight plan off at/after start: edct_wheels_off − fp_wheels_off
///  - InScope, flight plan off before start: edct_wheels_off − anchor, where
///    the anchor is the release time (default) or the start time
///  - CancelDelay: min(edct_wheels_off − fp_wheels_off, cancel − fp_wheels_off)
/// Throws MissingEdct when a restricted flight has no EDCT.
std::int64_t gdp_delay(const FlightRecord& f, const GdpProgram& p, FlightClass c,
                       const Options& opt = {});

/// Classifies every flight against the program and fills in the delays.
/// Flights whose destination is not the program airport come back Uninvolved.
std::vector<ClassifiedFlight> classify_all(std::span<const FlightRecord> flights,
                                           const GdpProgram& p, const Options& opt = {});

/// Ground holding executed by in-scope flights before the program start, in
/// hours: sum over InScope flights of max(0, release_time − fp_wheels_off).
double prehold_hours(std::span<const FlightRecord> flights,
                     std::span<const ClassifiedFlight> classes, const GdpProgram& p);

}  // namespace classifier
}  // namespace gdpx
