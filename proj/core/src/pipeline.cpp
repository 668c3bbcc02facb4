#include "gdpx/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <utility>

#include "gdpx/classifier.hpp"
#include "gdpx/csv.hpp"
#include "gdpx/errors.hpp"
#include "gdpx/features.hpp"
#include "gdpx/gdp_lifecycle.hpp"
#include "gdpx/queueing.hpp"
#include "gdpx/regression.hpp"
#include "gdpx/rng.hpp"
#include "gdpx/svg_render.hpp"
#include "json.hpp"

namespace gdpx::pipeline {
namespace {

using ordered_json = nlohmann::ordered_json;

// Measurement set per program: arrivals to the program airport landing
// within this envelope around the program window.
constexpr std::int64_t kSetLeadMin = 12 * 60;
constexpr std::int64_t kSetTailMin = 24 * 60;

// Independent seed streams derived from the master seed.
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kRidgeCvStream = 102;
constexpr std::uint64_t kLassoCvStream = 103;
constexpr std::uint64_t kImportanceStream = 104;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("GDPX_LOG");
    if (env == nullptr) return 0;
    const std::string v{env};
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[gdpx] " << msg << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << body;
  if (!out) throw ConfigError("failed writing output file: " + path.string());
}

std::string sanitize_key(const std::string& key) {
  std::string out;
  for (char c : key) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string{"gdp"} : out;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.taxi_in_min < 0) throw ConfigError("taxi-in minutes must be non-negative");
  if (cfg.others_threshold < 1) throw ConfigError("others threshold must be at least 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie strictly between 0 and 1");
  }
  if (cfg.folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (cfg.perm_repeats < 1) throw ConfigError("permutation repeats must be at least 1");
  for (double lam : cfg.lambda_grid) {
    if (!(lam >= 0.0)) throw ConfigError("lambda grid entries must be non-negative");
  }
}

// ---------------------------------------------------------------------------
// ingestion

struct Prepared {
  Epoch epoch{};
  std::vector<FlightRecord> flights;
  std::vector<QuarterHourRecord> quarters;
  std::vector<GdpProgram> programs;
  std::vector<std::size_t> flight_order;  // flights sorted by (dest, actual_wheels_on)
  std::map<std::string, std::vector<std::pair<std::int64_t, double>>> rates_by_airport;
  bool have_flights{false};
  bool have_quarters{false};
  bool have_advisories{false};
};

template <typename Record, typename Parser>
bool ingest_file(const std::filesystem::path& path, const char* stage, Parser parse,
                 std::vector<Record>& out, std::vector<StageError>& errors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    errors.push_back({stage, "cannot open " + path.string()});
    return false;
  }
  auto outcome = parse(in);
  for (const auto& e : outcome.errors) errors.push_back({stage, e});
  out = std::move(outcome.records);
  return true;
}

void shift_times(Prepared& prep, std::int64_t delta_min) {
  if (delta_min == 0) return;
  const std::int64_t delta_q = delta_min / kMinutesPerQuarter;
  for (FlightRecord& f : prep.flights) {
    f.sched_gate_arr.minutes -= delta_min;
    f.fp_gate_out.minutes -= delta_min;
    f.fp_wheels_off.minutes -= delta_min;
    if (f.edct_wheels_off) f.edct_wheels_off->minutes -= delta_min;
    f.actual_gate_out.minutes -= delta_min;
    f.actual_wheels_off.minutes -= delta_min;
    f.actual_wheels_on.minutes -= delta_min;
    f.actual_gate_in.minutes -= delta_min;
  }
  for (QuarterHourRecord& q : prep.quarters) q.quarter.value -= delta_q;
  for (GdpProgram& p : prep.programs) {
    p.release_time.minutes -= delta_min;
    p.start.minutes -= delta_min;
    p.planned_end.minutes -= delta_min;
    if (p.cancel_time) p.cancel_time->minutes -= delta_min;
    for (RateBreakpoint& bp : p.initial_par) bp.quarter.value -= delta_q;
    for (RateBreakpoint& bp : p.final_par) bp.quarter.value -= delta_q;
    for (AdvisoryEvent& e : p.revisions) {
      e.adl_time.minutes -= delta_min;
      if (e.start) e.start->minutes -= delta_min;
      if (e.end) e.end->minutes -= delta_min;
      if (e.par) {
        for (RateBreakpoint& bp : *e.par) bp.quarter.value -= delta_q;
      }
    }
  }
}

std::int64_t earliest_abs_minute(const Prepared& prep,
                                 const std::vector<AdvisoryEvent>& events) {
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  auto upd = [&lo](TimePoint t) { lo = std::min(lo, t.minutes); };
  for (const FlightRecord& f : prep.flights) {
    upd(f.sched_gate_arr);
    upd(f.fp_gate_out);
    upd(f.fp_wheels_off);
    if (f.edct_wheels_off) upd(*f.edct_wheels_off);
    upd(f.actual_gate_out);
    upd(f.actual_wheels_off);
    upd(f.actual_wheels_on);
    upd(f.actual_gate_in);
  }
  for (const QuarterHourRecord& q : prep.quarters) upd(quarter_start(q.quarter));
  for (const AdvisoryEvent& e : events) {
    upd(e.adl_time);
    if (e.start) upd(*e.start);
    if (e.end) upd(*e.end);
    if (e.par) {
      for (const RateBreakpoint& bp : *e.par) upd(quarter_start(bp.quarter));
    }
  }
  return lo == std::numeric_limits<std::int64_t>::max() ? 0 : lo;
}

/// Loads the inputs relative to epoch zero, derives or validates the run
/// epoch, rebases every time, assembles programs per key, and drops the
/// later of any two overlapping same-airport programs. Quarter-hour rates
/// are only required past the classify stage, so an empty quarters path is
/// fine when `need_quarters` is false.
Prepared prepare_inputs(const RunConfig& cfg, bool need_quarters,
                        std::vector<StageError>& errors) {
  Prepared prep;
  const Epoch zero{0};
  std::vector<AdvisoryEvent> events;

  prep.have_flights = ingest_file<FlightRecord>(
      cfg.flights_path, "ingest/flights",
      [&](std::istream& in) { return flightdata::parse_flights_collect(in, zero); }, prep.flights,
      errors);
  if (need_quarters || !cfg.quarters_path.empty()) {
    prep.have_quarters = ingest_file<QuarterHourRecord>(
        cfg.quarters_path, "ingest/quarters",
        [&](std::istream& in) { return flightdata::parse_quarters_collect(in, zero); },
        prep.quarters, errors);
  }
  prep.have_advisories = ingest_file<AdvisoryEvent>(
      cfg.advisories_path, "ingest/advisories",
      [&](std::istream& in) { return flightdata::parse_advisories_collect(in, zero); }, events,
      errors);

  std::int64_t epoch_abs = 0;
  if (cfg.epoch_iso) {
    try {
      epoch_abs = parse_iso_minutes(*cfg.epoch_iso);
    } catch (const std::invalid_argument&) {
      throw ConfigError("epoch must be an ISO minute timestamp: " + *cfg.epoch_iso);
    }
    if (epoch_abs % kMinutesPerQuarter != 0) {
      throw ConfigError("epoch must be quarter-aligned: " + *cfg.epoch_iso);
    }
  } else {
    epoch_abs = floor_to_midnight(earliest_abs_minute(prep, events));
  }
  prep.epoch = Epoch{epoch_abs};

  // fold advisory events into programs, one key at a time
  std::map<std::string, std::vector<AdvisoryEvent>> by_key;
  for (AdvisoryEvent& e : events) by_key[e.gdp_key].push_back(std::move(e));
  for (auto& [key, group] : by_key) {
    try {
      auto assembled = lifecycle::assemble_programs(group);
      for (GdpProgram& p : assembled) prep.programs.push_back(std::move(p));
    } catch (const Error& e) {
      errors.push_back({"lifecycle/" + key, e.what()});
    }
  }
  std::sort(prep.programs.begin(), prep.programs.end(),
            [](const GdpProgram& a, const GdpProgram& b) {
              return std::tie(a.airport, a.start.minutes, a.gdp_key) <
                     std::tie(b.airport, b.start.minutes, b.gdp_key);
            });
  std::vector<GdpProgram> kept;
  for (GdpProgram& p : prep.programs) {
    if (!kept.empty() && kept.back().airport == p.airport &&
        p.start < kept.back().planned_end) {
      errors.push_back({"lifecycle/overlap", "program " + p.gdp_key + " overlaps " +
                                                 kept.back().gdp_key + " at " + p.airport +
                                                 "; dropping " + p.gdp_key});
      continue;
    }
    kept.push_back(std::move(p));
  }
  prep.programs = std::move(kept);

  shift_times(prep, epoch_abs);

  prep.flight_order.resize(prep.flights.size());
  std::iota(prep.flight_order.begin(), prep.flight_order.end(), std::size_t{0});
  std::sort(prep.flight_order.begin(), prep.flight_order.end(),
            [&fl = prep.flights](std::size_t a, std::size_t b) {
              return std::tie(fl[a].dest, fl[a].actual_wheels_on.minutes, a) <
                     std::tie(fl[b].dest, fl[b].actual_wheels_on.minutes, b);
            });
  for (const QuarterHourRecord& q : prep.quarters) {
    prep.rates_by_airport[q.airport].emplace_back(q.quarter.value, q.arr_rate);
  }
  for (auto& [airport, rows] : prep.rates_by_airport) std::sort(rows.begin(), rows.end());

  log_info("prepared " + std::to_string(prep.flights.size()) + " flights, " +
           std::to_string(prep.quarters.size()) + " quarter rows, " +
           std::to_string(prep.programs.size()) + " programs");
  return prep;
}

/// Flights landing at the program airport inside the measurement envelope,
/// ordered by landing time.
std::vector<FlightRecord> slice_for(const Prepared& prep, const GdpProgram& p) {
  const auto& order = prep.flight_order;
  const auto& fl = prep.flights;
  auto begin_key = std::make_pair(std::string_view{p.airport}, p.start.minutes - kSetLeadMin);
  auto end_key = std::make_pair(std::string_view{p.airport}, p.planned_end.minutes + kSetTailMin);
  auto less = [&fl](std::size_t idx, const std::pair<std::string_view, std::int64_t>& key) {
    const FlightRecord& f = fl[idx];
    if (f.dest != key.first) return f.dest < key.first;
    return f.actual_wheels_on.minutes < key.second;
  };
  auto lo = std::lower_bound(order.begin(), order.end(), begin_key, less);
  auto hi = std::lower_bound(order.begin(), order.end(), end_key, less);
  std::vector<FlightRecord> out;
  out.reserve(static_cast<std::size_t>(hi - lo));
  for (auto it = lo; it != hi; ++it) out.push_back(fl[*it]);
  return out;
}

// ---------------------------------------------------------------------------
// per-program stages

struct ExcessRow {
  std::string gdp_key;
  std::string airport;
  ExcessDelayResult r{};
};

struct Outputs {
  std::string classified_csv;
  std::string excess_csv;
  std::string features_csv;
  std::vector<ExcessRow> excess_rows;
  std::vector<features::FeatureVector> feature_rows;
  std::map<std::string, std::vector<std::string>> flags;
};

enum class Depth { Classify, Measure, Features };

Outputs run_stages(const Prepared& prep, const RunConfig& cfg, Depth depth,
                   std::vector<StageError>& errors) {
  Outputs out;
  csv::append_row(out.classified_csv,
                  {"flight_id", "gdp_key", "class", "gdp_delay_min", "edct_delay_min"});
  csv::append_row(out.excess_csv, {"gdp_key", "airport", "excess_delay_min", "excess_per_rf_min",
                                   "airborne_increase_min", "rf_count"});
  {
    std::vector<std::string> header{"gdp_key"};
    for (const auto& name : features::names()) header.push_back(name);
    header.push_back("excess_per_rf_min");
    csv::append_row(out.features_csv, header);
  }

  const classifier::Options class_opt{.taxi_in_min = cfg.taxi_in_min,
                                      .early_anchor = classifier::EarlyDepartureAnchor::Release};
  features::DummyPolicy dummy_policy;
  dummy_policy.others_threshold = cfg.others_threshold;
  for (const GdpProgram& p : prep.programs) ++dummy_policy.annual_gdp_counts[p.airport];

  std::map<std::string, features::RateLookup> lookups;
  auto lookup_for = [&](const std::string& airport) -> const features::RateLookup& {
    auto it = lookups.find(airport);
    if (it == lookups.end()) {
      it = lookups.emplace(airport, features::RateLookup(prep.quarters, airport)).first;
    }
    return it->second;
  };

  for (const GdpProgram& p : prep.programs) {
    const std::vector<FlightRecord> flights = slice_for(prep, p);
    std::vector<ClassifiedFlight> classes;
    try {
      classes = classifier::classify_all(flights, p, class_opt);
    } catch (const Error& e) {
      errors.push_back({"classify/" + p.gdp_key, e.what()});
      continue;
    }
    for (std::size_t i = 0; i < classes.size(); ++i) {
      csv::append_row(out.classified_csv,
                      {classes[i].flight_id, p.gdp_key, class_token(classes[i].klass),
                       std::to_string(classes[i].gdp_delay_min),
                       std::to_string(classes[i].edct_delay_min)});
    }
    if (depth == Depth::Classify) continue;

    std::int64_t rf_count = 0;
    for (const ClassifiedFlight& c : classes) {
      if (c.klass == FlightClass::InScope || c.klass == FlightClass::CancelDelay) ++rf_count;
    }
    std::vector<queueing::ArrivalSample> samples;
    samples.reserve(flights.size());
    for (std::size_t i = 0; i < flights.size(); ++i) {
      if (flights[i].cancelled) continue;
      samples.push_back({flights[i].actual_wheels_on,
                         flights[i].actual_wheels_on - classes[i].gdp_delay_min});
    }

    QueueingDiagram diagram;
    ExcessDelayResult measured{};
    auto& gdp_flags = out.flags[p.gdp_key];
    try {
      if (samples.empty()) {
        diagram.airport = p.airport;
        diagram.first = quarter_of(p.start);
      } else {
        std::int64_t lo = std::numeric_limits<std::int64_t>::max();
        std::int64_t hi = std::numeric_limits<std::int64_t>::min();
        for (const auto& s : samples) {
          lo = std::min(lo, quarter_of(s.model_wheels_on).value);
          hi = std::max(hi, quarter_of(s.actual_wheels_on).value);
        }
        const auto rows_it = prep.rates_by_airport.find(p.airport);
        std::vector<double> rates;
        rates.reserve(static_cast<std::size_t>(hi - lo + 1));
        auto row = rows_it != prep.rates_by_airport.end()
                       ? std::lower_bound(rows_it->second.begin(), rows_it->second.end(),
                                          std::make_pair(lo, 0.0))
                       : std::vector<std::pair<std::int64_t, double>>::const_iterator{};
        for (std::int64_t q = lo; q <= hi; ++q) {
          if (rows_it == prep.rates_by_airport.end() || row == rows_it->second.end() ||
              row->first != q) {
            throw MissingQuarter(p.airport, q);
          }
          rates.push_back(row->second);
          ++row;
        }
        const double fallback = std::max(1.0, rates.back());
        const queueing::CapacitySeries series(QuarterIndex{lo}, std::move(rates), fallback);
        diagram = queueing::build_diagram(samples, series, p.airport);
      }
      try {
        measured = queueing::excess_delay(diagram, rf_count);
      } catch (const NoRestrictedFlights& e) {
        measured = ExcessDelayResult{e.excess_delay_min(), 0.0, e.airborne_increase_min(), 0};
        gdp_flags.push_back("no_restricted_flights");
      }
    } catch (const Error& e) {
      errors.push_back({"measure/" + p.gdp_key, e.what()});
      continue;
    }
    if (diagram.model_below_actual) gdp_flags.push_back("capacity_below_actual");
    if (diagram.fallback_quarters > 0) gdp_flags.push_back("capacity_fallback");

    csv::append_row(out.excess_csv,
                    {p.gdp_key, p.airport, csv::format_double(measured.excess_delay_min),
                     csv::format_double(measured.excess_per_rf_min),
                     csv::format_double(measured.airborne_increase_min),
                     std::to_string(measured.rf_count)});
    out.excess_rows.push_back({p.gdp_key, p.airport, measured});
    if (cfg.write_svg) {
      write_text(cfg.out_dir / "svg" / (sanitize_key(p.gdp_key) + ".svg"),
                 svg::render_diagram_svg(diagram));
    }
    if (depth == Depth::Measure) continue;

    if (measured.rf_count == 0) continue;  // outcome undefined; flagged above
    try {
      features::FeatureVector fv = features::extract(p, flights, classes,
                                                     lookup_for(p.airport), measured, dummy_policy);
      std::vector<std::string> fields{fv.gdp_key};
      for (double v : fv.x) fields.push_back(csv::format_double(v));
      fields.push_back(csv::format_double(fv.outcome));
      csv::append_row(out.features_csv, fields);
      for (const std::string& flag : fv.flags) gdp_flags.push_back(flag);
      out.feature_rows.push_back(std::move(fv));
    } catch (const Error& e) {
      errors.push_back({"features/" + p.gdp_key, e.what()});
    }
  }

  // drop empty flag entries so the summary lists only flagged programs
  for (auto it = out.flags.begin(); it != out.flags.end();) {
    it = it->second.empty() ? out.flags.erase(it) : std::next(it);
  }
  return out;
}

// ---------------------------------------------------------------------------
// model fitting

struct FeatureTable {
  std::vector<std::string> keys;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Eigen::Index n() const { return X.rows(); }
};

FeatureTable table_from_rows(const std::vector<features::FeatureVector>& rows) {
  FeatureTable t;
  t.X.resize(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(features::kCount));
  t.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.keys.push_back(rows[i].gdp_key);
    for (std::size_t j = 0; j < features::kCount; ++j) {
      t.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].x[j];
    }
    t.y(static_cast<Eigen::Index>(i)) = rows[i].outcome;
  }
  return t;
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::string> columns{"gdp_key"};
  for (const auto& name : features::names()) columns.push_back(name);
  columns.push_back("excess_per_rf_min");
  const std::vector<csv::Row> rows = csv::read_rows(in, columns);

  FeatureTable t;
  t.X.resize(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(features::kCount));
  t.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv::RowCursor cur(rows[i], columns);
    t.keys.push_back(cur.next_string());
    for (std::size_t j = 0; j < features::kCount; ++j) {
      t.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cur.next_double();
    }
    t.y(static_cast<Eigen::Index>(i)) = cur.next_double();
  }
  return t;
}

struct MetricsOut {
  double rmse{0.0};
  double mae{0.0};
  std::optional<double> r2;
};

MetricsOut safe_metrics(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
  MetricsOut m;
  m.rmse = regression::rmse_of(yhat, y);
  m.mae = regression::mae_of(yhat, y);
  try {
    m.r2 = regression::r2_of(yhat, y);
  } catch (const ZeroVarianceTarget&) {
    m.r2 = std::nullopt;
  }
  return m;
}

struct ModelReport {
  bool available{false};
  std::string note;  // why unavailable or partial
  regression::ModelFit fit;
  std::optional<regression::CvResult> cv;
  std::vector<std::string> dropped;  // OLS: columns constant in training data
  std::vector<std::string> aliased;  // OLS: columns spanned by earlier ones
  bool converged{true};
  MetricsOut train_m, test_m;
};

struct FitBundle {
  bool ok{false};  // split + scaling succeeded
  std::vector<std::string> names;
  Eigen::Index n_rows{0}, n_train{0}, n_test{0};
  std::vector<std::string> zero_variance;
  regression::Dataset train_scaled, test_scaled;
  ModelReport ols, ridge, lasso;
};

/// Metrics for a fit whose coefficients live in the dropped-column-reduced
/// space get computed through the same reduced matrices.
FitBundle fit_models(const FeatureTable& table, const RunConfig& cfg,
                     std::vector<StageError>& errors) {
  FitBundle out;
  const auto& names = features::names();
  out.names.assign(names.begin(), names.end());

  regression::Dataset data;
  data.X = table.X;
  data.y = table.y;
  data.names = out.names;
  data.dummy_mask.resize(features::kCount);
  for (std::size_t j = 0; j < features::kCount; ++j) {
    data.dummy_mask[j] = features::is_dummy(names[j]) ? 1 : 0;
  }
  out.n_rows = data.n();

  if (data.n() < 5) {
    errors.push_back({"fit", "need at least 5 feature rows to fit, have " +
                                 std::to_string(data.n())});
    return out;
  }
  regression::Split split;
  try {
    split = regression::split(data, cfg.test_fraction, derive_seed(cfg.seed, kSplitStream));
  } catch (const Error& e) {
    errors.push_back({"fit/split", e.what()});
    return out;
  }
  out.n_train = split.train.n();
  out.n_test = split.test.n();
  if (out.n_test < 1 || out.n_train < 2) {
    errors.push_back({"fit/split", "degenerate split: " + std::to_string(out.n_train) +
                                       " train / " + std::to_string(out.n_test) + " test rows"});
    return out;
  }
  const regression::Scaler scaler = regression::fit_scaler(split.train);
  out.zero_variance = scaler.zero_variance;
  out.train_scaled = regression::apply_scaler(scaler, split.train);
  out.test_scaled = regression::apply_scaler(scaler, split.test);
  out.ok = true;

  std::vector<double> grid =
      cfg.lambda_grid.empty() ? regression::default_lambda_grid() : cfg.lambda_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // --- plain least squares on the non-constant training columns -----------
  {
    // Constant columns carry nothing; columns that are exact linear
    // combinations of the intercept and earlier columns cannot be attributed
    // a coefficient of their own (the rate-difference means are one such trio
    // by construction: mean(arr-final) == mean(arr-initial) + mean(initial-
    // final)). Like R's lm() aliasing, fit the reduced basis and report what
    // was set aside. Greedy in column order, so the earliest definition of a
    // spanned quantity is the one that keeps its coefficient.
    std::vector<Eigen::Index> keep;
    const Eigen::Index n_tr = out.train_scaled.X.rows();
    Eigen::MatrixXd basis(n_tr, std::min(out.train_scaled.X.cols() + 1, n_tr));
    basis.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n_tr)));
    Eigen::Index basis_rank = 1;
    for (Eigen::Index j = 0; j < out.train_scaled.X.cols(); ++j) {
      const Eigen::VectorXd col = out.train_scaled.X.col(j);
      if (col.maxCoeff() == col.minCoeff()) {
        out.ols.dropped.push_back(out.names[static_cast<std::size_t>(j)]);
        continue;
      }
      Eigen::VectorXd resid = col;
      for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once for stability
        resid -= basis.leftCols(basis_rank) * (basis.leftCols(basis_rank).transpose() * resid);
      }
      if (basis_rank >= basis.cols() || resid.norm() <= 1e-8 * col.norm()) {
        out.ols.aliased.push_back(out.names[static_cast<std::size_t>(j)]);
        continue;
      }
      basis.col(basis_rank++) = resid / resid.norm();
      keep.push_back(j);
    }
    Eigen::MatrixXd x_train(out.train_scaled.X.rows(), static_cast<Eigen::Index>(keep.size()));
    Eigen::MatrixXd x_test(out.test_scaled.X.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      x_train.col(static_cast<Eigen::Index>(k)) = out.train_scaled.X.col(keep[k]);
      x_test.col(static_cast<Eigen::Index>(k)) = out.test_scaled.X.col(keep[k]);
    }
    try {
      regression::ModelFit reduced = regression::fit_ols(x_train, out.train_scaled.y);
      // re-inflate to the full column order; dropped columns get zero weight
      out.ols.fit = reduced;
      out.ols.fit.coefs = Eigen::VectorXd::Zero(out.train_scaled.X.cols());
      if (reduced.p_values.size() > 0) {
        out.ols.fit.std_errors = Eigen::VectorXd::Zero(out.train_scaled.X.cols());
        out.ols.fit.p_values = Eigen::VectorXd::Ones(out.train_scaled.X.cols());
      }
      for (std::size_t k = 0; k < keep.size(); ++k) {
        out.ols.fit.coefs(keep[k]) = reduced.coefs(static_cast<Eigen::Index>(k));
        if (reduced.p_values.size() > 0) {
          out.ols.fit.std_errors(keep[k]) = reduced.std_errors(static_cast<Eigen::Index>(k));
          out.ols.fit.p_values(keep[k]) = reduced.p_values(static_cast<Eigen::Index>(k));
        }
      }
      out.ols.available = true;
      out.ols.train_m = safe_metrics(regression::predict(reduced, x_train), out.train_scaled.y);
      out.ols.test_m = safe_metrics(regression::predict(reduced, x_test), out.test_scaled.y);
    } catch (const Error& e) {
      out.ols.note = e.what();
      errors.push_back({"fit/ols", e.what()});
    }
  }

  // --- ridge ---------------------------------------------------------------
  try {
    regression::CvResult cv = regression::cross_validate(
        split.train, regression::ModelKind::Ridge, grid, static_cast<int>(cfg.folds),
        derive_seed(cfg.seed, kRidgeCvStream));
    out.ridge.fit =
        regression::fit_ridge(out.train_scaled.X, out.train_scaled.y, cv.best_lambda);
    out.ridge.cv = std::move(cv);
    out.ridge.available = true;
    out.ridge.train_m =
        safe_metrics(regression::predict(out.ridge.fit, out.train_scaled.X), out.train_scaled.y);
    out.ridge.test_m =
        safe_metrics(regression::predict(out.ridge.fit, out.test_scaled.X), out.test_scaled.y);
  } catch (const Error& e) {
    out.ridge.note = e.what();
    errors.push_back({"fit/ridge", e.what()});
  }

  // --- lasso ---------------------------------------------------------------
  try {
    regression::CvResult cv = regression::cross_validate(
        split.train, regression::ModelKind::Lasso, grid, static_cast<int>(cfg.folds),
        derive_seed(cfg.seed, kLassoCvStream));
    try {
      out.lasso.fit =
          regression::fit_lasso(out.train_scaled.X, out.train_scaled.y, cv.best_lambda);
    } catch (const NotConverged& e) {
      out.lasso.fit.kind = regression::ModelKind::Lasso;
      out.lasso.fit.lambda = cv.best_lambda;
      out.lasso.fit.coefs = Eigen::Map<const Eigen::VectorXd>(
          e.partial_coefs().data(), static_cast<Eigen::Index>(e.partial_coefs().size()));
      out.lasso.fit.intercept = e.partial_intercept();
      out.lasso.converged = false;
      out.lasso.note = e.what();
      errors.push_back({"fit/lasso", e.what()});
    }
    out.lasso.cv = std::move(cv);
    out.lasso.available = true;
    out.lasso.train_m =
        safe_metrics(regression::predict(out.lasso.fit, out.train_scaled.X), out.train_scaled.y);
    out.lasso.test_m =
        safe_metrics(regression::predict(out.lasso.fit, out.test_scaled.X), out.test_scaled.y);
  } catch (const Error& e) {
    out.lasso.note = e.what();
    errors.push_back({"fit/lasso", e.what()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// report emission

ordered_json metrics_json(const MetricsOut& m) {
  ordered_json j;
  j["rmse"] = m.rmse;
  j["mae"] = m.mae;
  j["r2"] = m.r2 ? ordered_json(*m.r2) : ordered_json(nullptr);
  return j;
}

ordered_json coefficients_json(const std::vector<std::string>& names,
                               const Eigen::VectorXd& coefs) {
  ordered_json j;
  for (std::size_t i = 0; i < names.size(); ++i) {
    j[names[i]] = coefs(static_cast<Eigen::Index>(i));
  }
  return j;
}

ordered_json model_json(const FitBundle& bundle, const ModelReport& m, bool with_p_values,
                        bool with_cv) {
  ordered_json j;
  j["available"] = m.available;
  if (!m.note.empty()) j["note"] = m.note;
  if (!m.available) return j;
  j["lambda"] = m.fit.lambda;
  j["intercept"] = m.fit.intercept;
  j["coefficients"] = coefficients_json(bundle.names, m.fit.coefs);
  if (with_p_values) {
    ordered_json pv;
    for (std::size_t i = 0; i < bundle.names.size(); ++i) {
      if (m.fit.p_values.size() > 0) {
        pv[bundle.names[i]] = m.fit.p_values(static_cast<Eigen::Index>(i));
      } else {
        pv[bundle.names[i]] = nullptr;  // no residual degrees of freedom
      }
    }
    j["p_values"] = std::move(pv);
    j["intercept_p_value"] =
        m.fit.p_values.size() > 0 ? ordered_json(m.fit.intercept_p_value) : ordered_json(nullptr);
    j["dropped_constant_columns"] = m.dropped;
    j["dropped_aliased_columns"] = m.aliased;
  }
  if (with_cv && m.cv) {
    ordered_json cv;
    cv["grid"] = m.cv->grid;
    cv["mean_rmse"] = m.cv->mean_rmse;
    cv["best_lambda"] = m.cv->best_lambda;
    j["cv"] = std::move(cv);
  }
  if (m.fit.kind == regression::ModelKind::Lasso) {
    j["converged"] = m.converged;
    std::int64_t nonzero = 0;
    for (Eigen::Index i = 0; i < m.fit.coefs.size(); ++i) {
      if (m.fit.coefs(i) != 0.0) ++nonzero;
    }
    j["nonzero_coefficients"] = nonzero;
  }
  j["train"] = metrics_json(m.train_m);
  j["test"] = metrics_json(m.test_m);
  return j;
}

std::string fit_report_json(const FitBundle& bundle, const RunConfig& cfg) {
  ordered_json root;
  root["schema_version"] = 1;
  root["seed"] = cfg.seed;
  root["test_fraction"] = cfg.test_fraction;
  root["folds"] = cfg.folds;
  root["rows"] = bundle.n_rows;
  root["train_rows"] = bundle.n_train;
  root["test_rows"] = bundle.n_test;
  root["zero_variance_columns"] = bundle.zero_variance;
  ordered_json models;
  models["ols"] = model_json(bundle, bundle.ols, /*with_p_values=*/true, /*with_cv=*/false);
  models["ridge"] = model_json(bundle, bundle.ridge, false, true);
  models["lasso"] = model_json(bundle, bundle.lasso, false, true);
  root["models"] = std::move(models);
  return root.dump(2) + "\n";
}

/// Permutation importance of the ridge fit on the held-out rows.
std::string importance_csv(const FitBundle& bundle, const RunConfig& cfg,
                           std::vector<StageError>& errors) {
  std::string out;
  csv::append_row(out, {"feature", "alpha", "rank"});
  if (!bundle.ok || !bundle.ridge.available) return out;
  try {
    const regression::ImportanceResult imp = regression::permutation_importance(
        bundle.ridge.fit, bundle.test_scaled.X, bundle.test_scaled.y,
        static_cast<int>(cfg.perm_repeats), derive_seed(cfg.seed, kImportanceStream));
    for (std::size_t rank = 0; rank < imp.ranking.size(); ++rank) {
      const std::size_t j = imp.ranking[rank];
      csv::append_row(out, {bundle.names[j], csv::format_double(imp.alpha[j]),
                            std::to_string(rank + 1)});
    }
  } catch (const Error& e) {
    errors.push_back({"report/importance", e.what()});
  }
  return out;
}

struct MeasuredStats {
  std::int64_t measured_programs{0};
  std::int64_t rf_total{0};
  std::optional<double> mean;
  std::optional<double> stdev;
};

MeasuredStats stats_from(const std::vector<ExcessRow>& rows) {
  MeasuredStats s;
  s.measured_programs = std::ssize(rows);
  std::vector<double> per_rf;
  for (const ExcessRow& r : rows) {
    s.rf_total += r.r.rf_count;
    if (r.r.rf_count > 0) per_rf.push_back(r.r.excess_per_rf_min);
  }
  if (!per_rf.empty()) {
    s.mean = features::mean_of(per_rf);
    s.stdev = features::pop_std_of(per_rf);
  }
  return s;
}

std::string summary_json(const RunConfig& cfg, const std::optional<std::string>& epoch_iso,
                         std::optional<std::int64_t> programs_assembled,
                         const MeasuredStats& stats, Eigen::Index feature_rows,
                         const std::map<std::string, std::vector<std::string>>& flags,
                         const std::vector<StageError>& errors) {
  ordered_json root;
  root["schema_version"] = 1;
  root["seed"] = cfg.seed;
  root["epoch"] = epoch_iso ? ordered_json(*epoch_iso) : ordered_json(nullptr);
  root["programs_assembled"] =
      programs_assembled ? ordered_json(*programs_assembled) : ordered_json(nullptr);
  root["programs_measured"] = stats.measured_programs;
  root["rf_total"] = stats.rf_total;
  root["excess_per_rf_mean_min"] = stats.mean ? ordered_json(*stats.mean) : ordered_json(nullptr);
  root["excess_per_rf_std_min"] =
      stats.stdev ? ordered_json(*stats.stdev) : ordered_json(nullptr);
  root["feature_rows"] = feature_rows;
  ordered_json flag_obj = ordered_json::object();
  for (const auto& [key, list] : flags) flag_obj[key] = list;
  root["flags"] = std::move(flag_obj);
  ordered_json errs = ordered_json::array();
  for (const StageError& e : errors) {
    ordered_json row;
    row["stage"] = e.stage;
    row["detail"] = e.detail;
    errs.push_back(std::move(row));
  }
  root["stage_errors"] = std::move(errs);
  return root.dump(2) + "\n";
}

std::vector<ExcessRow> read_excess_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  const std::vector<std::string> columns{"gdp_key",           "airport",
                                         "excess_delay_min",  "excess_per_rf_min",
                                         "airborne_increase_min", "rf_count"};
  std::vector<ExcessRow> rows;
  for (const csv::Row& raw : csv::read_rows(in, columns)) {
    csv::RowCursor cur(raw, columns);
    ExcessRow r;
    r.gdp_key = cur.next_string();
    r.airport = cur.next_code();
    r.r.excess_delay_min = cur.next_double();
    r.r.excess_per_rf_min = cur.next_double();
    r.r.airborne_increase_min = cur.next_double();
    r.r.rf_count = cur.next_int();
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// entry points

RunResult guarded(const RunConfig& cfg, const char* verb,
                  const std::function<void(std::vector<StageError>&)>& body) {
  RunResult res;
  try {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    body(res.errors);
  } catch (const Error& e) {
    res.errors.push_back({"config", e.what()});
  } catch (const std::exception& e) {
    res.errors.push_back({verb, e.what()});
  }
  log_info(std::string{verb} + ": " + std::to_string(res.errors.size()) + " stage errors");
  return res;
}

}  // namespace

RunResult run_classify(const RunConfig& cfg) {
  return guarded(cfg, "classify", [&](std::vector<StageError>& errors) {
    Prepared prep = prepare_inputs(cfg, /*need_quarters=*/false, errors);
    if (!prep.have_flights || !prep.have_advisories) return;
    Outputs out = run_stages(prep, cfg, Depth::Classify, errors);
    write_text(cfg.out_dir / "classified_flights.csv", out.classified_csv);
  });
}

RunResult run_measure(const RunConfig& cfg) {
  return guarded(cfg, "measure", [&](std::vector<StageError>& errors) {
    Prepared prep = prepare_inputs(cfg, /*need_quarters=*/true, errors);
    if (!prep.have_flights || !prep.have_advisories || !prep.have_quarters) return;
    Outputs out = run_stages(prep, cfg, Depth::Measure, errors);
    write_text(cfg.out_dir / "classified_flights.csv", out.classified_csv);
    write_text(cfg.out_dir / "excess.csv", out.excess_csv);
  });
}

RunResult run_features(const RunConfig& cfg) {
  return guarded(cfg, "features", [&](std::vector<StageError>& errors) {
    Prepared prep = prepare_inputs(cfg, /*need_quarters=*/true, errors);
    if (!prep.have_flights || !prep.have_advisories || !prep.have_quarters) return;
    Outputs out = run_stages(prep, cfg, Depth::Features, errors);
    write_text(cfg.out_dir / "classified_flights.csv", out.classified_csv);
    write_text(cfg.out_dir / "excess.csv", out.excess_csv);
    write_text(cfg.out_dir / "features.csv", out.features_csv);
  });
}

RunResult run_fit(const RunConfig& cfg) {
  return guarded(cfg, "fit", [&](std::vector<StageError>& errors) {
    FeatureTable table;
    try {
      table = read_features_csv(cfg.out_dir / "features.csv");
    } catch (const Error& e) {
      errors.push_back({"fit/features_input", e.what()});
      return;
    }
    const FitBundle bundle = fit_models(table, cfg, errors);
    write_text(cfg.out_dir / "fit_report.json", fit_report_json(bundle, cfg));
  });
}

RunResult run_report(const RunConfig& cfg) {
  return guarded(cfg, "report", [&](std::vector<StageError>& errors) {
    FeatureTable table;
    try {
      table = read_features_csv(cfg.out_dir / "features.csv");
    } catch (const Error& e) {
      errors.push_back({"report/features_input", e.what()});
      return;
    }
    MeasuredStats stats;
    try {
      stats = stats_from(read_excess_csv(cfg.out_dir / "excess.csv"));
    } catch (const Error& e) {
      errors.push_back({"report/excess_input", e.what()});
    }
    const FitBundle bundle = fit_models(table, cfg, errors);
    write_text(cfg.out_dir / "fit_report.json", fit_report_json(bundle, cfg));
    write_text(cfg.out_dir / "importance.csv", importance_csv(bundle, cfg, errors));
    write_text(cfg.out_dir / "summary.json",
               summary_json(cfg, std::nullopt, std::nullopt, stats, table.n(), {}, errors));
  });
}

RunResult run_all(const RunConfig& cfg) {
  return guarded(cfg, "run", [&](std::vector<StageError>& errors) {
    Prepared prep = prepare_inputs(cfg, /*need_quarters=*/true, errors);
    if (!prep.have_flights || !prep.have_advisories || !prep.have_quarters) return;
    Outputs out = run_stages(prep, cfg, Depth::Features, errors);
    write_text(cfg.out_dir / "classified_flights.csv", out.classified_csv);
    write_text(cfg.out_dir / "excess.csv", out.excess_csv);
    write_text(cfg.out_dir / "features.csv", out.features_csv);

    const FitBundle bundle = fit_models(table_from_rows(out.feature_rows), cfg, errors);
    write_text(cfg.out_dir / "fit_report.json", fit_report_json(bundle, cfg));
    write_text(cfg.out_dir / "importance.csv", importance_csv(bundle, cfg, errors));

    const MeasuredStats stats = stats_from(out.excess_rows);
    write_text(cfg.out_dir / "summary.json",
               summary_json(cfg, format_iso_minutes(prep.epoch.abs_minutes),
                            std::ssize(prep.programs), stats,
                            static_cast<Eigen::Index>(out.feature_rows.size()), out.flags,
                            errors));
  });
}

}  // namespace gdpx::pipeline
