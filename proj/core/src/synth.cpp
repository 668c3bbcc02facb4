#include "gdpx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <utility>

#include "gdpx/errors.hpp"
#include "gdpx/rng.hpp"
#include "json.hpp"

namespace gdpx::synth {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Integer slots released per quarter under the capacity credit rule:
/// fractional credit carries across quarters, whole slots do not.
struct CreditMeter {
  double credit{0.0};

  std::int64_t take(double rate) {
    credit += rate;
    auto cap = static_cast<std::int64_t>(std::floor(credit));
    credit -= static_cast<double>(cap);
    return cap;
  }
};

/// Rate in force at quarter q; the last breakpoint extends indefinitely.
double rate_at(const RateSchedule& sched, QuarterIndex q) {
  double rate = sched.front().rate;
  for (const auto& bp : sched) {
    if (bp.quarter > q) break;
    rate = bp.rate;
  }
  return rate;
}

bool on_quarter_grid(double rate) { return rate * 4.0 == std::floor(rate * 4.0); }

double draw_grid_rate(Rng& rng, double lo, double hi) {
  auto lo4 = static_cast<std::int64_t>(std::llround(lo * 4.0));
  auto hi4 = static_cast<std::int64_t>(std::llround(hi * 4.0));
  return static_cast<double>(rng.uniform_int(lo4, hi4)) / 4.0;
}

/// New schedule equal to `sched` before `from` and shifted by `delta`
/// (clamped at 1 flight per quarter) from `from` onward.
RateSchedule shift_from(const RateSchedule& sched, QuarterIndex from, double delta) {
  RateSchedule out;
  for (const auto& bp : sched) {
    if (bp.quarter < from) out.push_back(bp);
  }
  out.push_back({from, std::max(1.0, rate_at(sched, from) + delta)});
  for (const auto& bp : sched) {
    if (bp.quarter > from) out.push_back({bp.quarter, std::max(1.0, bp.rate + delta)});
  }
  return out;
}

std::string padded(std::int64_t n, int width) {
  std::string digits = std::to_string(n);
  if (std::ssize(digits) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return digits;
}

std::vector<std::string> origin_pool(char prefix, std::int64_t n) {
  std::vector<std::string> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    pool.push_back({prefix, static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26)});
  }
  return pool;
}

bool in_sorted(const std::vector<std::string>& pool, const std::string& code) {
  return std::binary_search(pool.begin(), pool.end(), code);
}

std::int64_t noise_minutes(Rng& rng, const NoiseBand& band, double lo, double hi) {
  return std::llround(rng.truncated_normal(band.mean, band.sd, lo, hi));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_gdps >= 1, "n_gdps must be at least 1");
  require(!airports.empty(), "airports must not be empty");
  for (const auto& a : airports) {
    require(a.size() >= 3 && a.size() <= 4, "airport code must be 3 or 4 letters: " + a);
    for (char c : a) require(c >= 'A' && c <= 'Z', "airport code must be uppercase letters: " + a);
  }
  {
    auto sorted = airports;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "airports must be unique");
  }
  try {
    parse_iso_minutes(start_date + "T00:00Z");
  } catch (const std::invalid_argument&) {
    throw ConfigError("start_date must be YYYY-MM-DD: " + start_date);
  }
  require(origins_us >= 1 && origins_us <= 600, "origins_us must be in [1, 600]");
  require(origins_ca >= 1 && origins_ca <= 600, "origins_ca must be in [1, 600]");
  require(origins_other >= 0 && origins_other <= 600, "origins_other must be in [0, 600]");
  require(flights_per_quarter > 0.0, "flights_per_quarter must be positive");
  require(offpeak_fraction >= 0.0 && offpeak_fraction <= 1.0, "offpeak_fraction must be in [0, 1]");
  require(pre_window_quarters >= 0 && post_window_quarters >= 0,
          "demand horizon quarters must be non-negative");
  require(min_window_quarters >= 12, "min_window_quarters must be at least 12");
  require(max_window_quarters >= min_window_quarters,
          "max_window_quarters must be at least min_window_quarters");
  require(min_lead_quarters >= 0 && max_lead_quarters >= min_lead_quarters,
          "lead quarters must satisfy 0 <= min <= max");
  require(start_hour_low >= 0 && start_hour_high >= start_hour_low && start_hour_high <= 23,
          "start hours must satisfy 0 <= low <= high <= 23");
  require(start_hour_high * 4 + max_window_quarters <= 112,
          "infeasible window: programs must end before 28:00 local");
  require(par_low >= 1.0 && par_high >= par_low, "program rates must satisfy 1 <= low <= high");
  require(on_quarter_grid(par_low) && on_quarter_grid(par_high),
          "program rates must be multiples of 0.25");
  require(nominal_rate >= 1.0 && nominal_rate == std::floor(nominal_rate),
          "nominal_rate must be a positive integer");
  require(capacity_mode == "par" || capacity_mode == "nominal",
          "capacity_mode must be \"par\" or \"nominal\"");
  require(capacity_ratio > 0.0 && on_quarter_grid(capacity_ratio),
          "capacity_ratio must be a positive multiple of 0.25");
  require(capacity_jitter_sd >= 0.0, "capacity_jitter_sd must be non-negative");
  for (double p : {revise_probability, cancel_probability, flight_cancel_probability}) {
    require(p >= 0.0 && p <= 1.0, "probabilities must be in [0, 1]");
  }
  require(ete_low_min >= 10 && ete_high_min >= ete_low_min && ete_high_min <= 720,
          "ete bounds must satisfy 10 <= low <= high <= 720");
  require(taxi_out_low_min >= 1 && taxi_out_high_min >= taxi_out_low_min,
          "taxi-out bounds must satisfy 1 <= low <= high");
  require(taxi_in_min >= 0, "taxi_in_min must be non-negative");
  for (const auto& band : {noise_gate_out, noise_taxi_out, noise_enroute}) {
    require(band.sd >= 0.0, "noise sd must be non-negative");
  }
  // Earliest day-0 flight plan must not precede the scenario epoch.
  require(start_hour_low * 60 - pre_window_quarters * kMinutesPerQuarter - ete_high_min -
                  taxi_out_high_min >=
              60,
          "infeasible window: earliest flight plan would precede the scenario day start");
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  ScenarioConfig cfg;
  try {
    json j = json::parse(json_text);
    if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
    auto take = [&j](const char* key, auto& field) {
      if (auto it = j.find(key); it != j.end()) {
        field = it->get<std::decay_t<decltype(field)>>();
        j.erase(it);
      }
    };
    take("seed", cfg.seed);
    take("n_gdps", cfg.n_gdps);
    take("airports", cfg.airports);
    take("start_date", cfg.start_date);
    take("origins_us", cfg.origins_us);
    take("origins_ca", cfg.origins_ca);
    take("origins_other", cfg.origins_other);
    take("flights_per_quarter", cfg.flights_per_quarter);
    take("offpeak_fraction", cfg.offpeak_fraction);
    take("pre_window_quarters", cfg.pre_window_quarters);
    take("post_window_quarters", cfg.post_window_quarters);
    take("min_window_quarters", cfg.min_window_quarters);
    take("max_window_quarters", cfg.max_window_quarters);
    take("min_lead_quarters", cfg.min_lead_quarters);
    take("max_lead_quarters", cfg.max_lead_quarters);
    take("start_hour_low", cfg.start_hour_low);
    take("start_hour_high", cfg.start_hour_high);
    take("par_low", cfg.par_low);
    take("par_high", cfg.par_high);
    take("revise_probability", cfg.revise_probability);
    take("cancel_probability", cfg.cancel_probability);
    take("nominal_rate", cfg.nominal_rate);
    take("capacity_mode", cfg.capacity_mode);
    take("capacity_ratio", cfg.capacity_ratio);
    take("capacity_jitter_sd", cfg.capacity_jitter_sd);
    take("ete_low_min", cfg.ete_low_min);
    take("ete_high_min", cfg.ete_high_min);
    take("taxi_out_low_min", cfg.taxi_out_low_min);
    take("taxi_out_high_min", cfg.taxi_out_high_min);
    take("taxi_in_min", cfg.taxi_in_min);
    take("flight_cancel_probability", cfg.flight_cancel_probability);
    take("noise_gate_out_mean", cfg.noise_gate_out.mean);
    take("noise_gate_out_sd", cfg.noise_gate_out.sd);
    take("noise_taxi_out_mean", cfg.noise_taxi_out.mean);
    take("noise_taxi_out_sd", cfg.noise_taxi_out.sd);
    take("noise_enroute_mean", cfg.noise_enroute.mean);
    take("noise_enroute_sd", cfg.noise_enroute.sd);
    if (!j.empty()) throw ConfigError("unknown scenario config key: " + j.begin().key());
  } catch (const json::exception& e) {
    throw ConfigError(std::string{"bad scenario config: "} + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<RbsSlot> rbs_assign(std::span<const RbsFlight> flights, const RateSchedule& par,
                                TimePoint start, TimePoint end) {
  if (par.empty()) throw ConfigError("rbs requires a non-empty rate schedule");
  QuarterIndex q0 = quarter_of(start);
  if (par.front().quarter > q0) {
    throw ConfigError("rbs rate schedule does not cover the program start quarter");
  }
  for (const auto& bp : par) {
    if (bp.rate <= 0.0) throw ConfigError("rbs rates must be positive");
  }
  if (end <= start) throw ConfigError("rbs window must end after it starts");
  for (std::size_t i = 1; i < flights.size(); ++i) {
    if (flights[i].srta < flights[i - 1].srta) {
      throw ConfigError("rbs input must be sorted by scheduled arrival");
    }
  }

  std::vector<RbsSlot> out(flights.size());
  CreditMeter meter;
  QuarterIndex q = q0;
  std::int64_t free = meter.take(rate_at(par, q));
  for (std::size_t i = 0; i < flights.size(); ++i) {
    QuarterIndex want = std::max(quarter_of(flights[i].srta), q0);
    while (q < want) {
      ++q.value;
      free = meter.take(rate_at(par, q));
    }
    while (free == 0) {
      ++q.value;
      free = meter.take(rate_at(par, q));
    }
    --free;
    TimePoint cta = std::max(flights[i].srta, quarter_start(q));
    out[i] = RbsSlot{cta, cta - flights[i].ete_min};
  }
  return out;
}

double OracleCapacity::at(QuarterIndex q) const {
  std::int64_t off = q.value - first.value;
  if (off < 0 || off >= std::ssize(rates)) return fallback;
  return rates[static_cast<std::size_t>(off)];
}

std::vector<TimePoint> oracle_queue(std::span<const OracleFlight> flights,
                                    const OracleCapacity& capacity) {
  std::vector<TimePoint> served(flights.size());
  if (flights.empty()) return served;

  std::vector<std::size_t> order(flights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&flights](std::size_t a, std::size_t b) {
    if (flights[a].planned != flights[b].planned) return flights[a].planned < flights[b].planned;
    if (flights[a].id != flights[b].id) return flights[a].id < flights[b].id;
    return a < b;
  });

  CreditMeter meter;
  QuarterIndex q = quarter_of(flights[order.front()].planned);
  std::int64_t data_end = capacity.first.value + std::ssize(capacity.rates);
  auto advance = [&]() {
    ++q.value;
    double rate = capacity.at(q);
    if (rate <= 0.0 && q.value >= data_end && capacity.fallback <= 0.0) {
      throw InvariantViolation("oracle_drain_stalled",
                               "queue backlog can never be served: capacity is zero from quarter " +
                                   std::to_string(q.value) + " on");
    }
    return meter.take(rate);
  };

  std::int64_t free = meter.take(capacity.at(q));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const OracleFlight& f = flights[order[k]];
    QuarterIndex want = quarter_of(f.planned);
    while (q < want) free = advance();
    while (free == 0) free = advance();
    --free;
    served[order[k]] = (q == want) ? f.planned : quarter_start(q);
  }
  return served;
}

namespace {

/// Everything generated for one flight before records and truth are split.
struct DraftFlight {
  FlightRecord rec;
  TimePoint srta{};
  bool scoped{false};
};

}  // namespace

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  Scenario s;
  s.epoch = Epoch{parse_iso_minutes(cfg.start_date + "T00:00Z")};

  const std::vector<std::string> pool_us = origin_pool('U', cfg.origins_us);
  const std::vector<std::string> pool_ca = origin_pool('C', cfg.origins_ca);
  const std::vector<std::string> pool_other = origin_pool('X', cfg.origins_other);
  std::vector<std::string> all_origins;
  all_origins.insert(all_origins.end(), pool_us.begin(), pool_us.end());
  all_origins.insert(all_origins.end(), pool_ca.begin(), pool_ca.end());
  all_origins.insert(all_origins.end(), pool_other.begin(), pool_other.end());

  const auto n_airports = std::ssize(cfg.airports);
  std::map<std::string, std::int64_t> next_free_quarter;  // per airport, avoids duplicate rows
  std::int64_t flight_counter = 0;

  for (std::int64_t g = 0; g < cfg.n_gdps; ++g) {
    const std::string& airport = cfg.airports[static_cast<std::size_t>(g % n_airports)];
    const std::int64_t day = g / n_airports;
    Rng rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(g)));

    // --- program shape -----------------------------------------------------
    const std::int64_t window_quarters =
        rng.uniform_int(cfg.min_window_quarters, cfg.max_window_quarters);
    const QuarterIndex start_q{day * 96 +
                               rng.uniform_int(cfg.start_hour_low * 4, cfg.start_hour_high * 4)};
    const TimePoint start = quarter_start(start_q);
    const TimePoint planned_end = start + window_quarters * kMinutesPerQuarter;
    const TimePoint release =
        start - rng.uniform_int(cfg.min_lead_quarters, cfg.max_lead_quarters) * kMinutesPerQuarter;

    RateSchedule initial_par{{start_q, draw_grid_rate(rng, cfg.par_low, cfg.par_high)}};
    if (window_quarters >= 8 && rng.next_double() < 0.5) {
      initial_par.push_back(
          {QuarterIndex{start_q.value + window_quarters / 2}, draw_grid_rate(rng, cfg.par_low, cfg.par_high)});
    }

    RateSchedule final_par = initial_par;
    std::vector<std::pair<TimePoint, RateSchedule>> revisions;
    if (rng.next_double() < cfg.revise_probability) {
      const std::int64_t n_rev = 1 + (rng.next_double() < 0.35 ? 1 : 0);
      for (std::int64_t r = 0; r < n_rev; ++r) {
        const TimePoint adl = start + (2 + 3 * r) * kMinutesPerQuarter;
        std::int64_t delta_grid = 0;
        while (delta_grid == 0) delta_grid = rng.uniform_int(-8, 8);
        final_par = shift_from(final_par, QuarterIndex{quarter_of(adl).value + 1},
                               static_cast<double>(delta_grid) / 4.0);
        revisions.emplace_back(adl, final_par);
      }
    }

    std::optional<TimePoint> cancel;
    if (rng.next_double() < cfg.cancel_probability) {
      cancel = start + (window_quarters / 2) * kMinutesPerQuarter;
    }
    const TimePoint effective_end = cancel ? *cancel : planned_end;

    const auto n_us = rng.uniform_int((cfg.origins_us + 1) / 2, cfg.origins_us);
    const auto n_ca = rng.uniform_int((cfg.origins_ca + 1) / 2, cfg.origins_ca);
    const std::vector<std::string> scope_us(pool_us.begin(), pool_us.begin() + n_us);
    const std::vector<std::string> scope_ca(pool_ca.begin(), pool_ca.begin() + n_ca);
    const Cause cause = static_cast<Cause>(rng.uniform_int(0, 4));
    const std::string gdp_key = "GDP-" + padded(g, 4) + "-" + airport;

    // Observed capacity: nominal off-program; inside the running window the
    // delivered rate follows the last-revised program rate times the
    // configured ratio (or stays nominal in "nominal" mode), plus an optional
    // grid-quantized wobble drawn from a stream keyed on (program, quarter)
    // so repeated lookups agree. Off-window rates are integral, so capacity
    // credit carries no fraction into the window no matter where accumulation
    // starts.
    const QuarterIndex eff_end_q = quarter_of(effective_end);
    auto rate_in_quarter = [&](QuarterIndex q) {
      if (cfg.capacity_mode == "par" && q >= start_q && q < eff_end_q) {
        double rate = rate_at(final_par, q) * cfg.capacity_ratio;
        if (cfg.capacity_jitter_sd > 0.0) {
          Rng jitter(derive_seed(cfg.seed, 7, static_cast<std::uint64_t>(g),
                                 static_cast<std::uint64_t>(q.value)));
          const double wobble = jitter.truncated_normal(0.0, cfg.capacity_jitter_sd,
                                                        -3.0 * cfg.capacity_jitter_sd,
                                                        3.0 * cfg.capacity_jitter_sd);
          rate += std::round(wobble * 4.0) / 4.0;
        }
        return std::max(rate, 1.0);
      }
      return cfg.nominal_rate;
    };

    // --- flight plans -------------------------------------------------------
    const std::int64_t demand_lo_q = start_q.value - cfg.pre_window_quarters;
    const std::int64_t demand_hi_q = start_q.value + window_quarters + cfg.post_window_quarters;
    std::vector<DraftFlight> drafts;
    drafts.reserve(static_cast<std::size_t>(
        (demand_hi_q - demand_lo_q) * static_cast<std::int64_t>(cfg.flights_per_quarter + 1.0)));
    for (std::int64_t qq = demand_lo_q; qq < demand_hi_q; ++qq) {
      const bool peak = qq >= start_q.value && qq < start_q.value + window_quarters;
      const double demand = cfg.flights_per_quarter * (peak ? 1.0 : cfg.offpeak_fraction);
      std::int64_t count = static_cast<std::int64_t>(std::floor(demand));
      if (rng.next_double() < demand - std::floor(demand)) ++count;
      for (std::int64_t i = 0; i < count; ++i) {
        DraftFlight d;
        d.rec.flight_id = "F" + padded(flight_counter++, 7);
        d.rec.origin = all_origins[static_cast<std::size_t>(rng.below(all_origins.size()))];
        d.rec.dest = airport;
        d.srta = TimePoint{qq * kMinutesPerQuarter + rng.uniform_int(0, 14)};
        d.rec.ete_min = rng.uniform_int(cfg.ete_low_min, cfg.ete_high_min);
        d.rec.unimpeded_taxi_out_min = rng.uniform_int(cfg.taxi_out_low_min, cfg.taxi_out_high_min);
        d.rec.sched_gate_arr = d.srta + cfg.taxi_in_min;
        d.rec.fp_wheels_off = d.srta - d.rec.ete_min;
        d.rec.fp_gate_out = d.rec.fp_wheels_off - d.rec.unimpeded_taxi_out_min;
        d.rec.cancelled = rng.next_double() < cfg.flight_cancel_probability;
        d.scoped = in_sorted(scope_us, d.rec.origin) || in_sorted(scope_ca, d.rec.origin);
        drafts.push_back(std::move(d));
      }
    }

    // --- slot assignment ----------------------------------------------------
    // Controlled set: scheduled into the window, restricted origin, and still
    // on the ground when the program was advised.
    std::vector<std::size_t> controlled;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      const DraftFlight& d = drafts[i];
      if (d.scoped && d.srta >= start && d.srta < planned_end && d.rec.fp_wheels_off > release) {
        controlled.push_back(i);
      }
    }
    std::sort(controlled.begin(), controlled.end(), [&drafts](std::size_t a, std::size_t b) {
      if (drafts[a].srta != drafts[b].srta) return drafts[a].srta < drafts[b].srta;
      return a < b;
    });
    std::vector<RbsFlight> rbs_in;
    rbs_in.reserve(controlled.size());
    for (std::size_t i : controlled) rbs_in.push_back({drafts[i].srta, drafts[i].rec.ete_min});
    const std::vector<RbsSlot> slots = rbs_assign(rbs_in, final_par, start, planned_end);
    for (std::size_t k = 0; k < controlled.size(); ++k) {
      drafts[controlled[k]].rec.edct_wheels_off = slots[k].edct;
    }
    if (cancel) {
      // Flights not yet committed to depart when the program died are
      // released from control entirely.
      for (DraftFlight& d : drafts) {
        if (d.rec.edct_wheels_off && d.rec.fp_wheels_off >= *cancel) d.rec.edct_wheels_off.reset();
      }
    }

    // --- execution ----------------------------------------------------------
    for (DraftFlight& d : drafts) {
      FlightRecord& f = d.rec;
      if (f.cancelled) {
        f.actual_gate_out = f.fp_gate_out;
        f.actual_wheels_off = f.fp_wheels_off;
        f.actual_wheels_on = f.fp_wheels_off + f.ete_min;
        f.actual_gate_in = f.actual_wheels_on + cfg.taxi_in_min;
        continue;
      }
      TimePoint dep_plan = f.fp_wheels_off;
      if (f.edct_wheels_off) {
        dep_plan = *f.edct_wheels_off;
        if (cancel && d.srta >= *cancel && f.fp_wheels_off < *cancel) {
          // Held for a program that died first: released at the cancel.
          dep_plan = std::min(*f.edct_wheels_off, std::max(f.fp_wheels_off, *cancel));
        }
      }
      const std::int64_t go_noise = noise_minutes(rng, cfg.noise_gate_out, -15.0, 120.0);
      const std::int64_t taxi_noise = noise_minutes(rng, cfg.noise_taxi_out, -8.0, 45.0);
      const std::int64_t air_noise = noise_minutes(rng, cfg.noise_enroute, -10.0, 60.0);
      f.actual_gate_out = dep_plan - f.unimpeded_taxi_out_min + go_noise;
      f.actual_wheels_off = dep_plan + go_noise + taxi_noise;
      if (!f.edct_wheels_off && d.scoped && d.srta >= start && d.srta < planned_end &&
          f.fp_wheels_off <= release) {
        // Airborne-before-advisory flights stay airborne before the advisory;
        // otherwise noise could turn an uncontrolled flight into one the
        // program should have held.
        f.actual_wheels_off = std::min(f.actual_wheels_off, release);
        f.actual_gate_out = std::min(f.actual_gate_out, f.actual_wheels_off - 1);
      }
      f.actual_wheels_on = f.actual_wheels_off + f.ete_min + air_noise;  // queue applied below
      f.actual_gate_in = f.actual_wheels_on + cfg.taxi_in_min;
    }

    // Landings share the runway: push free-flow arrival times through the
    // reference queue under the day's observed capacity.
    OracleCapacity day_capacity;
    day_capacity.first = QuarterIndex{day * 96};
    day_capacity.fallback = cfg.nominal_rate;
    {
      const std::int64_t horizon = demand_hi_q + 96;
      day_capacity.rates.reserve(static_cast<std::size_t>(horizon - day_capacity.first.value));
      for (std::int64_t q = day_capacity.first.value; q < horizon; ++q) {
        day_capacity.rates.push_back(rate_in_quarter(QuarterIndex{q}));
      }
    }
    std::vector<OracleFlight> free_flow;
    std::vector<std::size_t> flying;  // draft index per free_flow entry
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      if (drafts[i].rec.cancelled) continue;
      free_flow.push_back({drafts[i].rec.flight_id, drafts[i].rec.actual_wheels_on});
      flying.push_back(i);
    }
    const std::vector<TimePoint> landed = oracle_queue(free_flow, day_capacity);
    for (std::size_t k = 0; k < flying.size(); ++k) {
      FlightRecord& f = drafts[flying[k]].rec;
      f.actual_wheels_on = landed[k];
      f.actual_gate_in = f.actual_wheels_on + cfg.taxi_in_min;
    }

    // --- ground truth -------------------------------------------------------
    GdpTruth gt;
    gt.gdp_key = gdp_key;
    gt.airport = airport;
    std::vector<OracleFlight> model;
    std::vector<std::size_t> model_draft;  // draft index per model entry
    std::vector<FlightTruth> truths(drafts.size());
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      const DraftFlight& d = drafts[i];
      const FlightRecord& f = d.rec;
      FlightTruth& t = truths[i];
      t.flight_id = f.flight_id;
      t.gdp_key = gdp_key;
      t.klass = "UN";
      if (!f.cancelled && d.srta >= start && d.srta < planned_end) {
        if (d.scoped && d.srta < effective_end && f.actual_wheels_off > release) {
          t.klass = "IF";
          t.planted_delay_min = f.fp_wheels_off >= start ? *f.edct_wheels_off - f.fp_wheels_off
                                                         : *f.edct_wheels_off - release;
        } else if (cancel && d.srta >= *cancel && d.scoped && f.fp_wheels_off < *cancel &&
                   f.edct_wheels_off) {
          t.klass = "CF";
          t.planted_delay_min = std::min(*f.edct_wheels_off - f.fp_wheels_off,
                                         *cancel - f.fp_wheels_off);
        } else {
          t.klass = "EF";
        }
        t.planted_delay_min = std::max<std::int64_t>(t.planted_delay_min, 0);
      }
      t.counterfactual_wheels_on = f.actual_wheels_on;  // overwritten for flying flights below
      if (!f.cancelled) {
        model.push_back({f.flight_id, f.actual_wheels_on - t.planted_delay_min});
        model_draft.push_back(i);
      }
    }
    const std::vector<TimePoint> counterfactual = oracle_queue(model, day_capacity);
    double excess_quarters = 0.0;
    double airborne_quarters = 0.0;
    for (std::size_t k = 0; k < model_draft.size(); ++k) {
      const std::size_t i = model_draft[k];
      truths[i].counterfactual_wheels_on = counterfactual[k];
      excess_quarters += static_cast<double>(quarter_of(drafts[i].rec.actual_wheels_on).value -
                                             quarter_of(counterfactual[k]).value);
      airborne_quarters += static_cast<double>(quarter_of(counterfactual[k]).value -
                                               quarter_of(model[k].planned).value);
      if (truths[i].klass == "IF" || truths[i].klass == "CF") {
        ++gt.rf_count;
        gt.total_planted_delay_min += truths[i].planted_delay_min;
      }
    }
    gt.excess_delay_min = kMinutesPerQuarter * excess_quarters;
    gt.airborne_increase_min = kMinutesPerQuarter * airborne_quarters;
    gt.excess_per_rf_min =
        gt.rf_count > 0 ? gt.excess_delay_min / static_cast<double>(gt.rf_count) : 0.0;

    // --- emit ---------------------------------------------------------------
    std::int64_t emit_hi = demand_hi_q + 2;
    for (std::size_t k = 0; k < flying.size(); ++k) {
      emit_hi = std::max(emit_hi, quarter_of(landed[k]).value + 2);
    }
    // Resume exactly where the airport's coverage stopped: a hole between one
    // day's landing tail and the next midnight would break measurement sets
    // that span the boundary.
    std::int64_t& next_free = next_free_quarter[airport];
    for (std::int64_t q = next_free > 0 ? next_free : day * 96; q < emit_hi; ++q) {
      s.quarters.push_back({airport, QuarterIndex{q}, rate_in_quarter(QuarterIndex{q})});
    }
    next_free = std::max(next_free, emit_hi);

    AdvisoryEvent rel;
    rel.gdp_key = gdp_key;
    rel.airport = airport;
    rel.kind = AdvisoryKind::Release;
    rel.adl_time = release;
    rel.start = start;
    rel.end = planned_end;
    rel.par = initial_par;
    rel.scope_us = scope_us;
    rel.scope_ca = scope_ca;
    rel.cause = cause;
    s.advisories.push_back(std::move(rel));
    for (const auto& [adl, sched] : revisions) {
      AdvisoryEvent rev;
      rev.gdp_key = gdp_key;
      rev.airport = airport;
      rev.kind = AdvisoryKind::Revision;
      rev.adl_time = adl;
      rev.par = sched;
      s.advisories.push_back(std::move(rev));
    }
    if (cancel) {
      AdvisoryEvent can;
      can.gdp_key = gdp_key;
      can.airport = airport;
      can.kind = AdvisoryKind::Cancel;
      can.adl_time = *cancel;
      s.advisories.push_back(std::move(can));
    }

    for (std::size_t i = 0; i < drafts.size(); ++i) {
      s.flights.push_back(std::move(drafts[i].rec));
      s.truth.flights.push_back(std::move(truths[i]));
    }
    s.truth.gdps.push_back(std::move(gt));
  }
  return s;
}

std::string ground_truth_json(const GroundTruth& truth, Epoch epoch) {
  ordered_json root;
  root["schema_version"] = 1;
  ordered_json gdps = ordered_json::array();
  for (const auto& g : truth.gdps) {
    ordered_json row;
    row["gdp_key"] = g.gdp_key;
    row["airport"] = g.airport;
    row["rf_count"] = g.rf_count;
    row["total_planted_delay_min"] = g.total_planted_delay_min;
    row["excess_delay_min"] = g.excess_delay_min;
    row["excess_per_rf_min"] = g.excess_per_rf_min;
    row["airborne_increase_min"] = g.airborne_increase_min;
    gdps.push_back(std::move(row));
  }
  root["gdps"] = std::move(gdps);
  ordered_json flights = ordered_json::array();
  for (const auto& f : truth.flights) {
    ordered_json row;
    row["flight_id"] = f.flight_id;
    row["gdp_key"] = f.gdp_key;
    row["class"] = f.klass;
    row["planted_delay_min"] = f.planted_delay_min;
    row["counterfactual_wheels_on"] = format_time(f.counterfactual_wheels_on, epoch);
    flights.push_back(std::move(row));
  }
  root["flights"] = std::move(flights);
  return root.dump(2) + "\n";
}

void write_scenario(const Scenario& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_file = [&dir](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + (dir / name).string());
    out << body;
    if (!out) throw ConfigError("failed writing output file: " + (dir / name).string());
  };
  write_file("flights.csv", flightdata::serialize_flights(s.flights, s.epoch));
  write_file("quarters.csv", flightdata::serialize_quarters(s.quarters, s.epoch));
  write_file("advisories.csv", flightdata::serialize_advisories(s.advisories, s.epoch));
  write_file("ground_truth.json", ground_truth_json(s.truth, s.epoch));
}

}  // namespace gdpx::synth
