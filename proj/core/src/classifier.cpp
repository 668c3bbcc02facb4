#include "gdpx/classifier.hpp"

#include <algorithm>

#include "gdpx/errors.hpp"

namespace gdpx {

const std::string& class_token(FlightClass c) {
  static const std::string tokens[] = {"IF", "CF", "EF", "UN"};
  return tokens[static_cast<int>(c)];
}

FlightClass class_from_token(std::string_view token) {
  if (token == "IF") return FlightClass::InScope;
  if (token == "CF") return FlightClass::CancelDelay;
  if (token == "EF") return FlightClass::Exempt;
  if (token == "UN") return FlightClass::Uninvolved;
  throw ConfigError("unknown flight class '" + std::string(token) + "'");
}

namespace classifier {

FlightClass classify(const FlightRecord& f, const GdpProgram& p, const Options& opt) {
  if (f.cancelled) return FlightClass::Uninvolved;
  const TimePoint srta = flightdata::srta(f, opt.taxi_in_min);
  if (srta < p.start || srta >= p.planned_end) return FlightClass::Uninvolved;

  const bool in_scope = p.contains_origin(f.origin);
  if (in_scope && srta < p.effective_end() && f.actual_wheels_off > p.release_time) {
    return FlightClass::InScope;
  }
  if (p.cancel_time && srta >= *p.cancel_time && in_scope && f.fp_wheels_off < *p.cancel_time &&
      f.edct_wheels_off) {
    return FlightClass::CancelDelay;
  }
  return FlightClass::Exempt;
}

std::int64_t gdp_delay(const FlightRecord& f, const GdpProgram& p, FlightClass c,
                       const Options& opt) {
  if (c == FlightClass::Exempt || c == FlightClass::Uninvolved) return 0;
  if (!f.edct_wheels_off) throw MissingEdct(f.flight_id);
  const TimePoint edct_off = *f.edct_wheels_off;

  std::int64_t raw = 0;
  if (c == FlightClass::InScope) {
    if (f.fp_wheels_off >= p.start) {
      raw = edct_off - f.fp_wheels_off;
    } else {
      const TimePoint anchor =
          opt.early_anchor == EarlyDepartureAnchor::Release ? p.release_time : p.start;
      raw = edct_off - anchor;
    }
  } else {
    if (!p.cancel_time) {
      throw InvariantViolation("cancel_delay_without_cancel",
                               "flight '" + f.flight_id + "' marked CancelDelay but GDP '" +
                                   p.gdp_key + "' was never cancelled");
    }
    raw = std::min(edct_off - f.fp_wheels_off, *p.cancel_time - f.fp_wheels_off);
  }
  return std::max<std::int64_t>(raw, 0);
}

std::vector<ClassifiedFlight> classify_all(std::span<const FlightRecord> flights,
                                           const GdpProgram& p, const Options& opt) {
  std::vector<ClassifiedFlight> out;
  out.reserve(flights.size());
  for (const FlightRecord& f : flights) {
    ClassifiedFlight cf;
    cf.flight_id = f.flight_id;
    cf.klass = f.dest == p.airport ? classify(f, p, opt) : FlightClass::Uninvolved;
    cf.edct_delay_min =
        f.edct_wheels_off ? std::max<std::int64_t>(*f.edct_wheels_off - f.fp_wheels_off, 0) : 0;
    cf.gdp_delay_min = gdp_delay(f, p, cf.klass, opt);
    out.push_back(std::move(cf));
  }
  return out;
}

double prehold_hours(std::span<const FlightRecord> flights,
                     std::span<const ClassifiedFlight> classes, const GdpProgram& p) {
  if (flights.size() != classes.size()) {
    throw ConfigError("prehold: flight and class lists differ in length");
  }
  std::int64_t total_min = 0;
  for (std::size_t i = 0; i < flights.size(); ++i) {
    if (classes[i].klass != FlightClass::InScope) continue;
    total_min += std::max<std::int64_t>(p.release_time - flights[i].fp_wheels_off, 0);
  }
  return static_cast<double>(total_min) / 60.0;
}

}  // namespace classifier
}  // namespace gdpx
