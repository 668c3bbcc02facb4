#include <algorithm>

#include "doctest.h"
#include "gdpx/errors.hpp"
#include "gdpx/gdp_lifecycle.hpp"
#include "test_helpers.hpp"

using namespace gdpx;
using gdpx::testing::at;

namespace {

AdvisoryEvent release_event(std::string key, std::string airport, TimePoint adl, TimePoint start,
                            TimePoint end, double par = 8.0) {
  AdvisoryEvent e;
  e.gdp_key = std::move(key);
  e.airport = std::move(airport);
  e.kind = AdvisoryKind::Release;
  e.adl_time = adl;
  e.start = start;
  e.end = end;
  e.par = RateSchedule{{quarter_of(start), par}};
  e.scope_us = std::vector<std::string>{"UAA", "UAB"};
  e.scope_ca = std::vector<std::string>{"CAA"};
  e.cause = Cause::SnowIce;
  return e;
}

AdvisoryEvent revision_event(std::string key, std::string airport, TimePoint adl) {
  AdvisoryEvent e;
  e.gdp_key = std::move(key);
  e.airport = std::move(airport);
  e.kind = AdvisoryKind::Revision;
  e.adl_time = adl;
  return e;
}

AdvisoryEvent cancel_event(std::string key, std::string airport, TimePoint adl) {
  AdvisoryEvent e;
  e.gdp_key = std::move(key);
  e.airport = std::move(airport);
  e.kind = AdvisoryKind::Cancel;
  e.adl_time = adl;
  return e;
}

}  // namespace

TEST_CASE("release alone assembles a revision-free program") {
  const auto events = std::vector<AdvisoryEvent>{
      release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0))};
  const auto programs = lifecycle::assemble_programs(events);
  REQUIRE(programs.size() == 1);
  const GdpProgram& p = programs[0];
  CHECK(p.release_time == at(12, 0));
  CHECK(p.start == at(13, 30));
  CHECK(p.planned_end == at(19, 0));
  CHECK(p.final_par == p.initial_par);
  CHECK(p.revisions.empty());
  CHECK_FALSE(p.cancel_time.has_value());
  CHECK(lifecycle::program_times(p).cnt_r == 0);
}

TEST_CASE("lifecycle decomposition of a cancelled, twice-revised program") {
  // release 12:00, start 13:30, end 19:00, cancel 17:30, 2 revisions
  std::vector<AdvisoryEvent> events{
      release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0)),
      revision_event("GDP-1-EWR", "EWR", at(14, 0)),
      revision_event("GDP-1-EWR", "EWR", at(15, 0)),
      cancel_event("GDP-1-EWR", "EWR", at(17, 30))};
  const auto programs = lifecycle::assemble_programs(events);
  REQUIRE(programs.size() == 1);
  const LifecycleTimes t = lifecycle::program_times(programs[0]);
  CHECK(t.et_hr == 5.5);
  CHECK(t.gt_hr == 1.5);
  CHECK(t.ct_hr == 1.5);
  CHECK(t.cnt_r == 2);  // the cancel is not a revision
}

TEST_CASE("uncancelled program has no cut-off tail") {
  const auto programs = lifecycle::assemble_programs(
      std::vector<AdvisoryEvent>{release_event("GDP-1-EWR", "EWR", at(13, 30), at(13, 30), at(19, 0))});
  const LifecycleTimes t = lifecycle::program_times(programs[0]);
  CHECK(t.ct_hr == 0.0);
  CHECK(t.gt_hr == 0.0);  // release == start
  CHECK(t.et_hr == 5.5);
}

TEST_CASE("revision precedes release") {
  std::vector<AdvisoryEvent> events{revision_event("GDP-1-EWR", "EWR", at(11, 0)),
                                    release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30),
                                                  at(19, 0))};
  CHECK_THROWS_AS(lifecycle::assemble_programs(events), OrphanEvent);
}

TEST_CASE("assembly does not depend on event interleaving") {
  std::vector<AdvisoryEvent> events{
      release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0)),
      revision_event("GDP-1-EWR", "EWR", at(14, 0)),
      release_event("GDP-2-BOS", "BOS", at(12, 30), at(14, 0), at(18, 0)),
      cancel_event("GDP-1-EWR", "EWR", at(17, 30))};
  const auto sorted = lifecycle::assemble_programs(events);
  std::reverse(events.begin(), events.end());
  CHECK(lifecycle::assemble_programs(events) == sorted);
}

TEST_CASE("overlapping windows at one airport are rejected") {
  std::vector<AdvisoryEvent> events{
      release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0)),
      release_event("GDP-2-EWR", "EWR", at(13, 0), at(18, 0), at(21, 0))};
  CHECK_THROWS_AS(lifecycle::assemble_programs(events), OverlapError);

  // same windows at different airports coexist
  events[1] = release_event("GDP-2-BOS", "BOS", at(13, 0), at(18, 0), at(21, 0));
  CHECK(lifecycle::assemble_programs(events).size() == 2);
}

TEST_CASE("revisions update end, par and scope wholesale") {
  AdvisoryEvent rev = revision_event("GDP-1-EWR", "EWR", at(15, 0));
  rev.end = at(20, 0);
  rev.par = RateSchedule{{quarter_of(at(13, 30)), 8.0}, {quarter_of(at(16, 0)), 10.0}};
  rev.scope_us = std::vector<std::string>{"UAC"};
  std::vector<AdvisoryEvent> events{
      release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0)), rev};
  const auto programs = lifecycle::assemble_programs(events);
  REQUIRE(programs.size() == 1);
  const GdpProgram& p = programs[0];
  CHECK(p.planned_end == at(20, 0));
  CHECK(p.initial_par.size() == 1);
  CHECK(p.final_par.size() == 2);
  CHECK(p.scope_us == std::vector<std::string>{"UAC"});
  CHECK(p.scope_ca == std::vector<std::string>{"CAA"});  // untouched tier survives
  CHECK(p.revisions.size() == 1);
  CHECK(lifecycle::program_times(p).et_hr == 6.5);
}

TEST_CASE("par_at follows step-function semantics inside the window") {
  AdvisoryEvent rel = release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0));
  rel.par = RateSchedule{{quarter_of(at(13, 30)), 8.0}, {quarter_of(at(16, 0)), 10.0}};
  const auto programs = lifecycle::assemble_programs(std::vector<AdvisoryEvent>{rel});
  const GdpProgram& p = programs[0];
  CHECK(lifecycle::par_at(p, quarter_of(at(13, 30)), lifecycle::ParSeries::Initial) == 8.0);
  CHECK(lifecycle::par_at(p, quarter_of(at(15, 45)), lifecycle::ParSeries::Initial) == 8.0);
  CHECK(lifecycle::par_at(p, quarter_of(at(16, 0)), lifecycle::ParSeries::Initial) == 10.0);
  CHECK(lifecycle::par_at(p, quarter_of(at(18, 45)), lifecycle::ParSeries::Final) == 10.0);
  CHECK_THROWS_AS(lifecycle::par_at(p, quarter_of(at(13, 0)), lifecycle::ParSeries::Initial),
                  OutOfWindow);
  CHECK_THROWS_AS(lifecycle::par_at(p, quarter_of(at(19, 0)), lifecycle::ParSeries::Final),
                  OutOfWindow);
}

TEST_CASE("window length in quarters matches the lifecycle hours") {
  const auto programs = lifecycle::assemble_programs(
      std::vector<AdvisoryEvent>{release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0))});
  const GdpProgram& p = programs[0];
  const LifecycleTimes t = lifecycle::program_times(p);
  const auto window_quarters = quarter_of(p.planned_end).value - quarter_of(p.start).value;
  CHECK(t.et_hr * 4.0 == static_cast<double>(window_quarters));
}

TEST_CASE("effective end shrinks only on early cancellation") {
  std::vector<AdvisoryEvent> events{
      release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0)),
      cancel_event("GDP-1-EWR", "EWR", at(17, 30))};
  const auto cancelled = lifecycle::assemble_programs(events);
  CHECK(cancelled[0].cancelled_early());
  CHECK(cancelled[0].effective_end() == at(17, 30));

  const auto ran_out = lifecycle::assemble_programs(
      std::vector<AdvisoryEvent>{release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0))});
  CHECK_FALSE(ran_out[0].cancelled_early());
  CHECK(ran_out[0].effective_end() == at(19, 0));
}

TEST_CASE("scope membership covers both tiers") {
  const auto programs = lifecycle::assemble_programs(
      std::vector<AdvisoryEvent>{release_event("GDP-1-EWR", "EWR", at(12, 0), at(13, 30), at(19, 0))});
  const GdpProgram& p = programs[0];
  CHECK(p.contains_origin("UAA"));
  CHECK(p.contains_origin("CAA"));
  CHECK_FALSE(p.contains_origin("XYZ"));
}
