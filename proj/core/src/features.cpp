#include "gdpx/features.hpp"

#include <algorithm>
#include <cmath>

#include "gdpx/errors.hpp"

namespace gdpx::features {

namespace {

const std::array<std::string, kCount> kNames = {
    "et",          "gt",           "ct",           "cnt_r",       "sc_us_ete",
    "sc_ca_ete",   "cnt_ef",       "cnt_if",       "cnt_cf",      "prehold",
    "c_snow",      "c_lc",         "c_ts",         "c_rwy",       "d_arr",
    "u_par_initial", "s_par_initial", "u_par_final", "s_par_final", "u_par_revise",
    "s_par_revise", "d_go_if",     "s_go_if",      "d_to_if",     "s_to_if",
    "d_ete_if",    "s_ete_if",     "d_go_ex",      "s_go_ex",     "d_to_ef",
    "s_to_ef",     "d_ete_ef",     "s_ete_ef",     "apt_bos",     "apt_jfk",
    "apt_lga",     "apt_ord",      "apt_phl",      "apt_sea",     "apt_sfo",
    "apt_others"};

bool in_tier(const std::vector<std::string>& tier, std::string_view origin) {
  return std::binary_search(tier.begin(), tier.end(), origin,
                            [](std::string_view a, std::string_view b) { return a < b; });
}

}  // namespace

const std::array<std::string, kCount>& names() { return kNames; }

std::size_t index_of(std::string_view name) {
  for (std::size_t i = 0; i < kCount; ++i) {
    if (kNames[i] == name) return i;
  }
  throw ConfigError("unknown feature column '" + std::string(name) + "'");
}

bool is_dummy(std::string_view name) {
  return name.starts_with("c_") || name.starts_with("apt_");
}

RateLookup::RateLookup(std::span<const QuarterHourRecord> records, std::string_view airport)
    : airport_(airport) {
  double sum = 0.0;
  for (const QuarterHourRecord& r : records) {
    if (r.airport != airport_) continue;
    rates_.emplace_back(r.quarter.value, r.arr_rate);
    sum += r.arr_rate;
  }
  std::sort(rates_.begin(), rates_.end());
  if (!rates_.empty()) mean_ = sum / static_cast<double>(rates_.size());
}

std::optional<double> RateLookup::at(QuarterIndex q) const {
  auto it = std::lower_bound(rates_.begin(), rates_.end(), q.value,
                             [](const auto& pr, std::int64_t v) { return pr.first < v; });
  if (it == rates_.end() || it->first != q.value) return std::nullopt;
  return it->second;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double pop_std_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

ParStats par_stats(const GdpProgram& p, const RateLookup& rates) {
  ParStats out;
  const TimePoint eff_end = p.effective_end();
  if (eff_end <= p.start) {
    out.empty_window = true;
    return out;
  }

  std::vector<double> vs_initial, vs_final, vs_revise, vs_arr;
  for (QuarterIndex q = quarter_of(p.start); quarter_start(q) < eff_end;
       q = QuarterIndex{q.value + 1}) {
    const std::optional<double> arr = rates.at(q);
    if (!arr) throw MissingQuarter(p.airport, q.value);
    const double initial = lifecycle::par_at(p, q, lifecycle::ParSeries::Initial);
    const double final_rate = lifecycle::par_at(p, q, lifecycle::ParSeries::Final);
    vs_initial.push_back(*arr - initial);
    vs_final.push_back(*arr - final_rate);
    vs_revise.push_back(initial - final_rate);
    vs_arr.push_back(*arr - rates.annual_mean());
  }

  out.u_initial = mean_of(vs_initial);
  out.s_initial = pop_std_of(vs_initial);
  out.u_final = mean_of(vs_final);
  out.s_final = pop_std_of(vs_final);
  out.u_revise = mean_of(vs_revise);
  out.s_revise = pop_std_of(vs_revise);
  out.d_arr = mean_of(vs_arr);
  return out;
}

TimeVariationStats time_variation_stats(std::span<const FlightRecord> flights,
                                        std::span<const ClassifiedFlight> classes) {
  if (flights.size() != classes.size()) {
    throw ConfigError("time variation: flight and class lists differ in length");
  }

  std::vector<double> go_if, to_if, ete_if, go_ef, to_ef, ete_ef;
  for (std::size_t i = 0; i < flights.size(); ++i) {
    const FlightRecord& f = flights[i];
    switch (classes[i].klass) {
      case FlightClass::InScope:
        if (f.edct_wheels_off) {
          const TimePoint edct_gate_out = *f.edct_wheels_off - f.unimpeded_taxi_out_min;
          go_if.push_back(static_cast<double>(f.actual_gate_out - edct_gate_out));
        }
        to_if.push_back(static_cast<double>(f.actual_taxi_out_min() - f.unimpeded_taxi_out_min));
        ete_if.push_back(static_cast<double>(f.actual_airborne_min() - f.ete_min));
        break;
      case FlightClass::Exempt:
        go_ef.push_back(static_cast<double>(f.actual_gate_out - f.fp_gate_out));
        to_ef.push_back(static_cast<double>(f.actual_taxi_out_min() - f.unimpeded_taxi_out_min));
        ete_ef.push_back(static_cast<double>(f.actual_airborne_min() - f.ete_min));
        break;
      case FlightClass::CancelDelay:
      case FlightClass::Uninvolved:
        break;
    }
  }

  TimeVariationStats out;
  out.no_in_scope = to_if.empty();
  out.no_exempt = to_ef.empty();
  out.d_go_if = mean_of(go_if);
  out.s_go_if = pop_std_of(go_if);
  out.d_to_if = mean_of(to_if);
  out.s_to_if = pop_std_of(to_if);
  out.d_ete_if = mean_of(ete_if);
  out.s_ete_if = pop_std_of(ete_if);
  out.d_go_ex = mean_of(go_ef);
  out.s_go_ex = pop_std_of(go_ef);
  out.d_to_ef = mean_of(to_ef);
  out.s_to_ef = pop_std_of(to_ef);
  out.d_ete_ef = mean_of(ete_ef);
  out.s_ete_ef = pop_std_of(ete_ef);
  return out;
}

FeatureVector extract(const GdpProgram& p, std::span<const FlightRecord> flights,
                      std::span<const ClassifiedFlight> classes, const RateLookup& rates,
                      const ExcessDelayResult& measured, const DummyPolicy& dummies) {
  if (flights.size() != classes.size()) {
    throw ConfigError("extract: flight and class lists differ in length");
  }

  FeatureVector fv;
  fv.gdp_key = p.gdp_key;
  fv.airport = p.airport;
  auto& x = fv.x;

  const LifecycleTimes lt = lifecycle::program_times(p);
  x[col::et] = lt.et_hr;
  x[col::gt] = lt.gt_hr;
  x[col::ct] = lt.ct_hr;
  x[col::cnt_r] = static_cast<double>(lt.cnt_r);

  std::vector<double> us_ete, ca_ete;
  std::int64_t n_if = 0, n_ef = 0, n_cf = 0;
  for (std::size_t i = 0; i < flights.size(); ++i) {
    switch (classes[i].klass) {
      case FlightClass::InScope: {
        ++n_if;
        const FlightRecord& f = flights[i];
        const double ete_hr = static_cast<double>(f.ete_min) / 60.0;
        if (in_tier(p.scope_us, f.origin)) {
          us_ete.push_back(ete_hr);
        } else if (in_tier(p.scope_ca, f.origin)) {
          ca_ete.push_back(ete_hr);
        }
        break;
      }
      case FlightClass::CancelDelay:
        ++n_cf;
        break;
      case FlightClass::Exempt:
        ++n_ef;
        break;
      case FlightClass::Uninvolved:
        break;
    }
  }
  x[col::sc_us_ete] = mean_of(us_ete);
  x[col::sc_ca_ete] = mean_of(ca_ete);
  x[col::cnt_ef] = static_cast<double>(n_ef);
  x[col::cnt_if] = static_cast<double>(n_if);
  x[col::cnt_cf] = static_cast<double>(n_cf);
  x[col::prehold] = classifier::prehold_hours(flights, classes, p);

  switch (p.cause) {
    case Cause::Wind:
      break;
    case Cause::SnowIce:
      x[col::c_snow] = 1.0;
      break;
    case Cause::LowCeiling:
      x[col::c_lc] = 1.0;
      break;
    case Cause::Thunderstorms:
      x[col::c_ts] = 1.0;
      break;
    case Cause::RunwayConstruction:
      x[col::c_rwy] = 1.0;
      break;
  }

  const ParStats ps = par_stats(p, rates);
  x[col::d_arr] = ps.d_arr;
  x[col::u_par_initial] = ps.u_initial;
  x[col::s_par_initial] = ps.s_initial;
  x[col::u_par_final] = ps.u_final;
  x[col::s_par_final] = ps.s_final;
  x[col::u_par_revise] = ps.u_revise;
  x[col::s_par_revise] = ps.s_revise;
  if (ps.empty_window) fv.flags.push_back("empty_program_window");

  const TimeVariationStats tv = time_variation_stats(flights, classes);
  x[col::d_go_if] = tv.d_go_if;
  x[col::s_go_if] = tv.s_go_if;
  x[col::d_to_if] = tv.d_to_if;
  x[col::s_to_if] = tv.s_to_if;
  x[col::d_ete_if] = tv.d_ete_if;
  x[col::s_ete_if] = tv.s_ete_if;
  x[col::d_go_ex] = tv.d_go_ex;
  x[col::s_go_ex] = tv.s_go_ex;
  x[col::d_to_ef] = tv.d_to_ef;
  x[col::s_to_ef] = tv.s_to_ef;
  x[col::d_ete_ef] = tv.d_ete_ef;
  x[col::s_ete_ef] = tv.s_ete_ef;
  if (tv.no_in_scope) fv.flags.push_back("no_in_scope_flights");
  if (tv.no_exempt) fv.flags.push_back("no_exempt_flights");

  static const std::map<std::string, std::size_t> kNamed = {
      {"BOS", col::apt_bos}, {"JFK", col::apt_jfk}, {"LGA", col::apt_lga},
      {"ORD", col::apt_ord}, {"PHL", col::apt_phl}, {"SEA", col::apt_sea},
      {"SFO", col::apt_sfo}};
  if (p.airport != dummies.benchmark_airport) {
    auto named = kNamed.find(p.airport);
    if (named != kNamed.end()) {
      x[named->second] = 1.0;
    } else {
      x[col::apt_others] = 1.0;
      auto cnt = dummies.annual_gdp_counts.find(p.airport);
      if (cnt != dummies.annual_gdp_counts.end() && cnt->second >= dummies.others_threshold) {
        fv.flags.push_back("unnamed_high_count_airport");
      }
    }
  }

  fv.outcome = measured.excess_per_rf_min;
  return fv;
}

}  // namespace gdpx::features
