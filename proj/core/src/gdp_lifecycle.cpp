#include "gdpx/gdp_lifecycle.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "gdpx/errors.hpp"

namespace gdpx {

bool GdpProgram::contains_origin(std::string_view origin) const {
  auto has = [origin](const std::vector<std::string>& set) {
    return std::binary_search(set.begin(), set.end(), origin,
                              [](std::string_view a, std::string_view b) { return a < b; });
  };
  return has(scope_us) || has(scope_ca);
}

namespace lifecycle {
namespace {

void require_coverage(const RateSchedule& series, const GdpProgram& p, const char* name) {
  if (series.empty() || series.front().quarter > quarter_of(p.start)) {
    throw InvariantViolation("par_coverage", std::string(name) + " schedule of GDP '" +
                                                 p.gdp_key + "' does not reach the start time");
  }
}

GdpProgram fold_key(const std::string& key, std::vector<AdvisoryEvent> events) {
  std::sort(events.begin(), events.end(),
            [](const AdvisoryEvent& a, const AdvisoryEvent& b) { return a.adl_time < b.adl_time; });
  if (events.front().kind != AdvisoryKind::Release) throw OrphanEvent(key);

  const AdvisoryEvent& release = events.front();
  if (!release.start || !release.end || !release.par || !release.cause) {
    throw InvariantViolation(
        "release_fields", "release for GDP '" + key + "' must carry start, end, rates and cause");
  }

  GdpProgram p;
  p.gdp_key = key;
  p.airport = release.airport;
  p.release_time = release.adl_time;
  p.start = *release.start;
  p.planned_end = *release.end;
  p.initial_par = *release.par;
  p.final_par = *release.par;
  p.cause = *release.cause;
  if (release.scope_us) p.scope_us = *release.scope_us;
  if (release.scope_ca) p.scope_ca = *release.scope_ca;

  for (std::size_t i = 1; i < events.size(); ++i) {
    const AdvisoryEvent& e = events[i];
    if (e.airport != p.airport) {
      throw InvariantViolation("event_airport",
                               "GDP '" + key + "' mixes airports " + p.airport + " and " + e.airport);
    }
    if (p.cancel_time) {
      throw InvariantViolation("event_after_cancel",
                               "GDP '" + key + "' has events after its cancel");
    }
    switch (e.kind) {
      case AdvisoryKind::Release:
        throw InvariantViolation("duplicate_release",
                                 "GDP '" + key + "' has more than one release");
      case AdvisoryKind::Revision:
        if (e.start) p.start = *e.start;
        if (e.end) p.planned_end = *e.end;
        if (e.par) p.final_par = *e.par;
        if (e.scope_us) p.scope_us = *e.scope_us;
        if (e.scope_ca) p.scope_ca = *e.scope_ca;
        p.revisions.push_back(e);
        break;
      case AdvisoryKind::Cancel:
        p.cancel_time = e.adl_time;
        break;
    }
  }

  if (p.start < p.release_time) {
    throw InvariantViolation("release_before_start",
                             "GDP '" + key + "' starts before its release advisory");
  }
  if (p.planned_end <= p.start) {
    throw InvariantViolation("program_window", "GDP '" + key + "' has an empty program window");
  }
  if (p.cancel_time && *p.cancel_time > p.planned_end) {
    throw InvariantViolation("cancel_window",
                             "GDP '" + key + "' is cancelled after its planned end");
  }
  require_coverage(p.initial_par, p, "initial");
  require_coverage(p.final_par, p, "final");
  return p;
}

}  // namespace

std::vector<GdpProgram> assemble_programs(std::span<const AdvisoryEvent> events) {
  std::map<std::string, std::vector<AdvisoryEvent>> groups;
  for (const AdvisoryEvent& e : events) groups[e.gdp_key].push_back(e);

  std::vector<GdpProgram> programs;
  programs.reserve(groups.size());
  for (auto& [key, group] : groups) programs.push_back(fold_key(key, std::move(group)));

  std::sort(programs.begin(), programs.end(), [](const GdpProgram& a, const GdpProgram& b) {
    return std::tie(a.airport, a.start, a.gdp_key) < std::tie(b.airport, b.start, b.gdp_key);
  });
  for (std::size_t i = 1; i < programs.size(); ++i) {
    const GdpProgram& prev = programs[i - 1];
    const GdpProgram& cur = programs[i];
    if (cur.airport == prev.airport && cur.start < prev.planned_end) {
      throw OverlapError(cur.airport, prev.gdp_key, cur.gdp_key);
    }
  }
  return programs;
}

LifecycleTimes program_times(const GdpProgram& p) {
  LifecycleTimes t;
  t.gt_hr = static_cast<double>(p.start - p.release_time) / 60.0;
  t.et_hr = static_cast<double>(p.planned_end - p.start) / 60.0;
  t.ct_hr = p.cancel_time ? static_cast<double>(p.planned_end - *p.cancel_time) / 60.0 : 0.0;
  t.cnt_r = static_cast<int>(p.revisions.size());
  return t;
}

double par_at(const GdpProgram& p, QuarterIndex q, ParSeries which) {
  if (q < quarter_of(p.start) || quarter_start(q) >= p.planned_end) throw OutOfWindow(q.value);
  const RateSchedule& series = which == ParSeries::Initial ? p.initial_par : p.final_par;
  auto it = std::upper_bound(series.begin(), series.end(), q,
                             [](QuarterIndex lhs, const RateBreakpoint& bp) { return lhs < bp.quarter; });
  if (it == series.begin()) {
    throw InvariantViolation("par_coverage", "no rate at quarter " + std::to_string(q.value));
  }
  return std::prev(it)->rate;
}

}  // namespace lifecycle
}  // namespace gdpx
