#include "gdpx/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gdpx/errors.hpp"

namespace gdpx::queueing {

CapacitySeries::CapacitySeries(QuarterIndex first, std::vector<double> rates,
                               std::optional<double> fallback)
    : first_(first), rates_(std::move(rates)), fallback_(fallback) {
  for (double r : rates_) {
    if (!(r >= 0.0)) throw ConfigError("capacity rates must be non-negative");
  }
  if (fallback_ && !(*fallback_ >= 0.0)) {
    throw ConfigError("fallback capacity rate must be non-negative");
  }
}

CapacitySeries CapacitySeries::constant(double rate) {
  return CapacitySeries(QuarterIndex{0}, {}, rate);
}

bool CapacitySeries::in_range(QuarterIndex q) const {
  return q.value >= first_.value &&
         q.value < first_.value + static_cast<std::int64_t>(rates_.size());
}

double CapacitySeries::at(QuarterIndex q) const {
  if (in_range(q)) return rates_[static_cast<std::size_t>(q.value - first_.value)];
  if (fallback_) return *fallback_;
  throw UnderdefinedCapacity(q.value);
}

TimePoint model_wheels_on(const FlightRecord& f, std::int64_t gdp_delay_min) {
  return f.actual_wheels_on - gdp_delay_min;
}

QueueingDiagram build_diagram(std::span<const ArrivalSample> arrivals,
                              const CapacitySeries& capacity, std::string airport,
                              std::optional<QuarterIndex> first_quarter) {
  QueueingDiagram d;
  d.airport = std::move(airport);
  if (arrivals.empty()) {
    d.first = first_quarter.value_or(QuarterIndex{0});
    return d;
  }

  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const ArrivalSample& a : arrivals) {
    if (a.model_wheels_on > a.actual_wheels_on) {
      throw InvariantViolation("negative_gdp_delay",
                               "counterfactual landing later than the observed one");
    }
    lo = std::min(lo, quarter_of(a.model_wheels_on).value);
    hi = std::max(hi, quarter_of(a.actual_wheels_on).value + 1);
  }
  if (first_quarter) lo = std::min(lo, first_quarter->value);

  const auto data_quarters = static_cast<std::size_t>(hi - lo);
  std::vector<std::int64_t> planned_inc(data_quarters, 0);
  std::vector<std::int64_t> actual_inc(data_quarters, 0);
  for (const ArrivalSample& a : arrivals) {
    ++planned_inc[static_cast<std::size_t>(quarter_of(a.model_wheels_on).value - lo)];
    ++actual_inc[static_cast<std::size_t>(quarter_of(a.actual_wheels_on).value - lo)];
  }

  d.first = QuarterIndex{lo};
  double credit = 0.0;
  std::int64_t backlog = 0, planned_cum = 0, actual_cum = 0, served_cum = 0;
  for (std::size_t idx = 0;; ++idx) {
    const bool in_data = idx < data_quarters;
    if (!in_data && backlog == 0) break;

    const QuarterIndex q{lo + static_cast<std::int64_t>(idx)};
    const double rate = capacity.at(q);
    if (!capacity.in_range(q)) ++d.fallback_quarters;
    if (!in_data && rate <= 0.0) {
      throw InvariantViolation("drain_stalled",
                               "zero capacity past the data range cannot drain the backlog");
    }

    credit += rate;
    const auto cap = static_cast<std::int64_t>(std::floor(credit));
    credit -= static_cast<double>(cap);

    if (in_data) {
      planned_cum += planned_inc[idx];
      actual_cum += actual_inc[idx];
      backlog += planned_inc[idx];
    }
    const std::int64_t served = std::min(cap, backlog);
    backlog -= served;
    served_cum += served;

    d.actual.push_back(actual_cum);
    d.planned_model.push_back(planned_cum);
    d.served_model.push_back(served_cum);
    d.capacity.push_back(rate);
    if (served_cum < actual_cum) d.model_below_actual = true;
  }
  return d;
}

ExcessDelayResult excess_delay(const QueueingDiagram& d, std::int64_t rf_count) {
  std::int64_t excess_units = 0, airborne_units = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    excess_units += d.served_model[i] - d.actual[i];
    airborne_units += d.planned_model[i] - d.served_model[i];
  }
  const double excess =
      kMinutesPerQuarter * static_cast<double>(std::max<std::int64_t>(excess_units, 0));
  const double airborne = kMinutesPerQuarter * static_cast<double>(airborne_units);
  if (rf_count == 0) throw NoRestrictedFlights(excess, airborne);

  ExcessDelayResult r;
  r.excess_delay_min = excess;
  r.airborne_increase_min = airborne;
  r.excess_per_rf_min = excess / static_cast<double>(rf_count);
  r.rf_count = rf_count;
  return r;
}

}  // namespace gdpx::queueing
