#include "gdpx/flightdata.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "gdpx/csv.hpp"
#include "gdpx/errors.hpp"

namespace gdpx {

namespace {

const std::vector<std::string> kFlightColumns = {
    "flight_id",      "origin",           "dest",
    "sched_gate_arr", "fp_gate_out",      "fp_wheels_off",
    "ete_min",        "unimpeded_taxi_out_min", "edct_wheels_off",
    "actual_gate_out", "actual_wheels_off", "actual_wheels_on",
    "actual_gate_in", "cancelled"};

const std::vector<std::string> kQuarterColumns = {"airport", "quarter_start", "arr_rate"};

const std::vector<std::string> kAdvisoryColumns = {
    "gdp_key", "airport", "kind",     "adl_time", "start",
    "end",     "par_schedule", "scope_us", "scope_ca", "cause"};

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

TimePoint required_time(csv::RowCursor& cur, Epoch epoch) {
  const std::string v = cur.next_string();
  TimePoint t;
  try {
    t = parse_time(v, epoch);
  } catch (const std::exception& e) {
    throw cur.error(e.what());
  }
  if (t.minutes < 0) throw cur.error("time '" + v + "' precedes the run epoch");
  return t;
}

std::optional<TimePoint> optional_time(csv::RowCursor& cur, Epoch epoch) {
  const std::string v = cur.next_optional();
  if (v.empty()) return std::nullopt;
  TimePoint t;
  try {
    t = parse_time(v, epoch);
  } catch (const std::exception& e) {
    throw cur.error(e.what());
  }
  if (t.minutes < 0) throw cur.error("time '" + v + "' precedes the run epoch");
  return t;
}

FlightRecord parse_flight_row(const csv::Row& row, Epoch epoch) {
  csv::RowCursor cur(row, kFlightColumns);
  FlightRecord f;
  f.flight_id = cur.next_string();
  f.origin = cur.next_code();
  f.dest = cur.next_code();
  f.sched_gate_arr = required_time(cur, epoch);
  f.fp_gate_out = required_time(cur, epoch);
  f.fp_wheels_off = required_time(cur, epoch);
  f.ete_min = cur.next_int();
  if (f.ete_min <= 0) throw cur.error("ete_min must be positive");
  f.unimpeded_taxi_out_min = cur.next_int();
  if (f.unimpeded_taxi_out_min < 0) throw cur.error("unimpeded_taxi_out_min must be >= 0");
  f.edct_wheels_off = optional_time(cur, epoch);
  f.actual_gate_out = required_time(cur, epoch);
  f.actual_wheels_off = required_time(cur, epoch);
  f.actual_wheels_on = required_time(cur, epoch);
  f.actual_gate_in = required_time(cur, epoch);
  f.cancelled = cur.next_bool();
  if (!f.cancelled) {
    const bool ordered = f.actual_gate_out <= f.actual_wheels_off &&
                         f.actual_wheels_off <= f.actual_wheels_on &&
                         f.actual_wheels_on <= f.actual_gate_in;
    if (!ordered) {
      throw InvariantViolation(f.flight_id, "actual times out of order (gate out <= wheels off "
                                            "<= wheels on <= gate in)");
    }
  }
  return f;
}

QuarterHourRecord parse_quarter_row(const csv::Row& row, Epoch epoch) {
  csv::RowCursor cur(row, kQuarterColumns);
  QuarterHourRecord r;
  r.airport = cur.next_code();
  const TimePoint start = required_time(cur, epoch);
  if (start.minutes % kMinutesPerQuarter != 0) {
    throw cur.error("quarter_start must fall on a 15-minute boundary");
  }
  r.quarter = quarter_of(start);
  r.arr_rate = cur.next_double();
  if (r.arr_rate < 0) throw cur.error("arr_rate must be >= 0");
  return r;
}

RateSchedule parse_par_schedule(csv::RowCursor& cur, std::string_view text, Epoch epoch) {
  RateSchedule schedule;
  for (const auto& item : split_list(text, ';')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw cur.error("par entry '" + item + "' lacks '='");
    TimePoint t;
    try {
      t = parse_time(item.substr(0, eq), epoch);
    } catch (const std::exception& e) {
      throw cur.error(e.what());
    }
    if (t.minutes < 0) throw cur.error("par breakpoint precedes the run epoch");
    if (t.minutes % kMinutesPerQuarter != 0) {
      throw cur.error("par breakpoint must fall on a 15-minute boundary");
    }
    double rate;
    try {
      rate = csv::parse_double(item.substr(eq + 1));
    } catch (const std::exception& e) {
      throw cur.error(e.what());
    }
    if (rate < 0) throw cur.error("par rate must be >= 0");
    if (!schedule.empty() && schedule.back().quarter >= quarter_of(t)) {
      throw cur.error("par breakpoints must be strictly ascending");
    }
    schedule.push_back({quarter_of(t), rate});
  }
  return schedule;
}

std::vector<std::string> parse_scope_list(csv::RowCursor& cur, std::string_view text) {
  std::vector<std::string> codes;
  for (const auto& item : split_list(text, '|')) {
    if (!csv::is_airport_code(item)) {
      throw cur.error("scope entry '" + item + "' is not an airport code");
    }
    codes.push_back(item);
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return codes;
}

AdvisoryEvent parse_advisory_row(const csv::Row& row, Epoch epoch, const CauseMap& causes) {
  csv::RowCursor cur(row, kAdvisoryColumns);
  AdvisoryEvent e;
  e.gdp_key = cur.next_string();
  e.airport = cur.next_code();
  const std::string kind = cur.next_string();
  if (kind == "release") {
    e.kind = AdvisoryKind::Release;
  } else if (kind == "revision") {
    e.kind = AdvisoryKind::Revision;
  } else if (kind == "cancel") {
    e.kind = AdvisoryKind::Cancel;
  } else {
    throw cur.error("kind must be release, revision or cancel, got '" + kind + "'");
  }
  e.adl_time = required_time(cur, epoch);
  e.start = optional_time(cur, epoch);
  e.end = optional_time(cur, epoch);
  const std::string par_text = cur.next_optional();
  if (!par_text.empty()) e.par = parse_par_schedule(cur, par_text, epoch);
  const std::string us_text = cur.next_optional();
  if (!us_text.empty()) e.scope_us = parse_scope_list(cur, us_text);
  const std::string ca_text = cur.next_optional();
  if (!ca_text.empty()) e.scope_ca = parse_scope_list(cur, ca_text);
  const std::string cause_text = cur.next_optional();
  if (!cause_text.empty()) {
    try {
      e.cause = causes.canonicalize(cause_text);
    } catch (const std::exception& ex) {
      throw cur.error(ex.what());
    }
  }

  switch (e.kind) {
    case AdvisoryKind::Release:
      if (!e.start || !e.end || !e.par || !e.cause) {
        throw cur.error("release must carry start, end, par_schedule and cause");
      }
      if (*e.start >= *e.end) throw cur.error("release start must precede end");
      if (!e.scope_us) e.scope_us.emplace();
      if (!e.scope_ca) e.scope_ca.emplace();
      break;
    case AdvisoryKind::Revision:
      if (e.cause) throw cur.error("revision must not carry a cause");
      if (!e.start && !e.end && !e.par && !e.scope_us && !e.scope_ca) {
        throw cur.error("revision must change at least one program parameter");
      }
      break;
    case AdvisoryKind::Cancel:
      if (e.start || e.end || e.par || e.scope_us || e.scope_ca || e.cause) {
        throw cur.error("cancel must carry only gdp_key, airport, kind and adl_time");
      }
      break;
  }
  return e;
}

template <typename T, typename RowFn>
flightdata::ParseOutcome<T> parse_collect(std::istream& in,
                                          const std::vector<std::string>& columns, RowFn fn) {
  flightdata::ParseOutcome<T> out;
  const auto rows = csv::read_rows(in, columns);
  out.rows_in = rows.size();
  for (const auto& row : rows) {
    try {
      out.records.push_back(fn(row));
    } catch (const Error& e) {
      out.errors.emplace_back(e.what());
    }
  }
  return out;
}

// Strict counterpart of parse_collect: the first bad row propagates its typed
// error instead of being recorded.
template <typename T, typename RowFn>
std::vector<T> parse_rows(std::istream& in, const std::vector<std::string>& columns, RowFn fn) {
  const auto rows = csv::read_rows(in, columns);
  std::vector<T> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(fn(row));
  return out;
}

// Events keep file order by key; within a key they sort by ADL time.
void sort_events_in_key_order(std::vector<AdvisoryEvent>& events) {
  std::unordered_map<std::string, std::size_t> key_order;
  for (const auto& e : events) {
    key_order.emplace(e.gdp_key, key_order.size());
  }
  std::stable_sort(events.begin(), events.end(),
                   [&](const AdvisoryEvent& a, const AdvisoryEvent& b) {
                     const auto ka = key_order.at(a.gdp_key), kb = key_order.at(b.gdp_key);
                     if (ka != kb) return ka < kb;
                     return a.adl_time < b.adl_time;
                   });
}

std::string scope_field(const std::optional<std::vector<std::string>>& scope) {
  if (!scope) return {};
  std::string out;
  for (std::size_t i = 0; i < scope->size(); ++i) {
    if (i) out += '|';
    out += (*scope)[i];
  }
  return out;
}

std::string par_field(const std::optional<RateSchedule>& par, Epoch epoch) {
  if (!par) return {};
  std::string out;
  for (std::size_t i = 0; i < par->size(); ++i) {
    if (i) out += ';';
    out += format_time(quarter_start((*par)[i].quarter), epoch);
    out += '=';
    out += csv::format_double((*par)[i].rate);
  }
  return out;
}

}  // namespace

const std::string& cause_token(Cause c) {
  static const std::string kTokens[] = {"wind", "snow_ice", "low_ceiling", "thunderstorms",
                                        "runway_construction"};
  return kTokens[static_cast<int>(c)];
}

CauseMap CauseMap::builtin() {
  CauseMap m;
  m.add("wind", Cause::Wind);
  m.add("snow_ice", Cause::SnowIce);
  m.add("snow", Cause::SnowIce);
  m.add("snow-ice", Cause::SnowIce);
  m.add("snow/ice", Cause::SnowIce);
  m.add("low_ceiling", Cause::LowCeiling);
  m.add("low ceilings", Cause::LowCeiling);
  m.add("low ceiling", Cause::LowCeiling);
  m.add("ceilings", Cause::LowCeiling);
  m.add("thunderstorms", Cause::Thunderstorms);
  m.add("thunderstorm", Cause::Thunderstorms);
  m.add("tstms", Cause::Thunderstorms);
  m.add("runway_construction", Cause::RunwayConstruction);
  m.add("runway construction", Cause::RunwayConstruction);
  m.add("rwy construction", Cause::RunwayConstruction);
  m.add("construction", Cause::RunwayConstruction);
  return m;
}

void CauseMap::add(std::string pattern, Cause cause) {
  for (char& c : pattern) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  table_[std::move(pattern)] = cause;
}

void CauseMap::load(std::istream& in) {
  const auto rows = csv::read_rows(in, {"pattern", "cause"});
  for (const auto& row : rows) {
    csv::RowCursor cur(row, {"pattern", "cause"});
    const std::string pattern = cur.next_string();
    const std::string canonical = cur.next_string();
    bool found = false;
    for (int i = 0; i < 5; ++i) {
      if (cause_token(static_cast<Cause>(i)) == canonical) {
        add(pattern, static_cast<Cause>(i));
        found = true;
        break;
      }
    }
    if (!found) throw cur.error("unknown canonical cause '" + canonical + "'");
  }
}

Cause CauseMap::canonicalize(std::string_view text) const {
  std::string key(text);
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto it = table_.find(key);
  if (it == table_.end()) {
    throw std::invalid_argument("unknown GDP cause '" + std::string(text) + "'");
  }
  return it->second;
}

namespace flightdata {

ParseOutcome<FlightRecord> parse_flights_collect(std::istream& in, Epoch epoch) {
  auto outcome = parse_collect<FlightRecord>(
      in, kFlightColumns, [epoch](const csv::Row& row) { return parse_flight_row(row, epoch); });
  std::unordered_set<std::string> seen;
  std::vector<FlightRecord> unique;
  unique.reserve(outcome.records.size());
  for (auto& f : outcome.records) {
    if (!seen.insert(f.flight_id).second) {
      outcome.errors.push_back(DuplicateKey(f.flight_id).what());
    } else {
      unique.push_back(std::move(f));
    }
  }
  outcome.records = std::move(unique);
  return outcome;
}

std::vector<FlightRecord> parse_flights(std::istream& in, Epoch epoch) {
  auto records = parse_rows<FlightRecord>(
      in, kFlightColumns, [epoch](const csv::Row& row) { return parse_flight_row(row, epoch); });
  std::unordered_set<std::string> seen;
  for (const auto& f : records) {
    if (!seen.insert(f.flight_id).second) throw DuplicateKey(f.flight_id);
  }
  return records;
}

ParseOutcome<QuarterHourRecord> parse_quarters_collect(std::istream& in, Epoch epoch) {
  auto outcome = parse_collect<QuarterHourRecord>(
      in, kQuarterColumns, [epoch](const csv::Row& row) { return parse_quarter_row(row, epoch); });
  std::set<std::pair<std::string, std::int64_t>> seen;
  std::vector<QuarterHourRecord> unique;
  unique.reserve(outcome.records.size());
  for (auto& r : outcome.records) {
    if (!seen.insert({r.airport, r.quarter.value}).second) {
      outcome.errors.push_back(
          DuplicateKey(r.airport + "@q" + std::to_string(r.quarter.value)).what());
    } else {
      unique.push_back(std::move(r));
    }
  }
  outcome.records = std::move(unique);
  return outcome;
}

std::vector<QuarterHourRecord> parse_quarters(std::istream& in, Epoch epoch) {
  auto records = parse_rows<QuarterHourRecord>(
      in, kQuarterColumns, [epoch](const csv::Row& row) { return parse_quarter_row(row, epoch); });
  std::set<std::pair<std::string, std::int64_t>> seen;
  for (const auto& r : records) {
    if (!seen.insert({r.airport, r.quarter.value}).second) {
      throw DuplicateKey(r.airport + "@q" + std::to_string(r.quarter.value));
    }
  }
  return records;
}

ParseOutcome<AdvisoryEvent> parse_advisories_collect(std::istream& in, Epoch epoch,
                                                     const CauseMap& causes) {
  auto outcome = parse_collect<AdvisoryEvent>(in, kAdvisoryColumns, [&](const csv::Row& row) {
    return parse_advisory_row(row, epoch, causes);
  });

  sort_events_in_key_order(outcome.records);
  std::vector<AdvisoryEvent> checked;
  checked.reserve(outcome.records.size());
  for (auto& e : outcome.records) {
    if (!checked.empty() && checked.back().gdp_key == e.gdp_key) {
      if (checked.back().adl_time == e.adl_time) {
        outcome.errors.push_back(
            DuplicateKey(e.gdp_key + "@" + std::to_string(e.adl_time.minutes)).what());
        continue;
      }
      if (checked.back().airport != e.airport) {
        outcome.errors.push_back(
            InvariantViolation(e.gdp_key, "events disagree on the GDP airport").what());
        continue;
      }
    }
    checked.push_back(std::move(e));
  }
  outcome.records = std::move(checked);
  return outcome;
}

std::vector<AdvisoryEvent> parse_advisories(std::istream& in, Epoch epoch,
                                            const CauseMap& causes) {
  auto records = parse_rows<AdvisoryEvent>(in, kAdvisoryColumns, [&](const csv::Row& row) {
    return parse_advisory_row(row, epoch, causes);
  });
  sort_events_in_key_order(records);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i - 1].gdp_key != records[i].gdp_key) continue;
    if (records[i - 1].adl_time == records[i].adl_time) {
      throw DuplicateKey(records[i].gdp_key + "@" + std::to_string(records[i].adl_time.minutes));
    }
    if (records[i - 1].airport != records[i].airport) {
      throw InvariantViolation(records[i].gdp_key, "events disagree on the GDP airport");
    }
  }
  return records;
}

std::string serialize_flights(std::span<const FlightRecord> records, Epoch epoch) {
  std::string out;
  csv::append_row(out, kFlightColumns);
  for (const auto& f : records) {
    csv::append_row(
        out, {f.flight_id, f.origin, f.dest, format_time(f.sched_gate_arr, epoch),
              format_time(f.fp_gate_out, epoch), format_time(f.fp_wheels_off, epoch),
              std::to_string(f.ete_min), std::to_string(f.unimpeded_taxi_out_min),
              f.edct_wheels_off ? format_time(*f.edct_wheels_off, epoch) : std::string{},
              format_time(f.actual_gate_out, epoch), format_time(f.actual_wheels_off, epoch),
              format_time(f.actual_wheels_on, epoch), format_time(f.actual_gate_in, epoch),
              f.cancelled ? "true" : "false"});
  }
  return out;
}

std::string serialize_quarters(std::span<const QuarterHourRecord> records, Epoch epoch) {
  std::string out;
  csv::append_row(out, kQuarterColumns);
  for (const auto& r : records) {
    csv::append_row(out, {r.airport, format_time(quarter_start(r.quarter), epoch),
                          csv::format_double(r.arr_rate)});
  }
  return out;
}

std::string serialize_advisories(std::span<const AdvisoryEvent> events, Epoch epoch) {
  std::string out;
  csv::append_row(out, kAdvisoryColumns);
  for (const auto& e : events) {
    std::string kind;
    switch (e.kind) {
      case AdvisoryKind::Release: kind = "release"; break;
      case AdvisoryKind::Revision: kind = "revision"; break;
      case AdvisoryKind::Cancel: kind = "cancel"; break;
    }
    csv::append_row(out, {e.gdp_key, e.airport, kind, format_time(e.adl_time, epoch),
                          e.start ? format_time(*e.start, epoch) : std::string{},
                          e.end ? format_time(*e.end, epoch) : std::string{},
                          par_field(e.par, epoch), scope_field(e.scope_us),
                          scope_field(e.scope_ca),
                          e.cause ? cause_token(*e.cause) : std::string{}});
  }
  return out;
}

TimePoint srta(const FlightRecord& f, std::int64_t taxi_in_min) {
  return f.sched_gate_arr - taxi_in_min;
}

}  // namespace flightdata
}  // namespace gdpx
