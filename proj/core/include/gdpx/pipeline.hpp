#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gdpx/flightdata.hpp"

namespace gdpx::pipeline {

/// Full run parameters. Defaults: taxi-in 10 min, airport grouping threshold
/// 52 programs, 20% test split, five folds, 20 permutation repeats, and the
/// standard penalty grid when `lambda_grid` is empty.
struct RunConfig {
  std::filesystem::path flights_path;
  std::filesystem::path quarters_path;
  std::filesystem::path advisories_path;
  std::filesystem::path out_dir;
  std::uint64_t seed{1};
  std::optional<std::string> epoch_iso;  // quarter-aligned ISO minute; derived from the
                                         // earliest input timestamp (midnight) when absent
  std::int64_t taxi_in_min{flightdata::kDefaultTaxiInMin};
  std::int64_t others_threshold{52};
  double test_fraction{0.2};
  std::int64_t folds{5};
  std::int64_t perm_repeats{20};
  std::vector<double> lambda_grid;
  bool write_svg{false};
};

/// One recoverable failure, tagged with the stage and offending record key.
struct StageError {
  std::string stage;
  std::string detail;
};

struct RunResult {
  std::vector<StageError> errors;

  int exit_code() const { return errors.empty() ? 0 : 1; }
};

/// Stage entry points, each writing its artifacts under cfg.out_dir and
/// returning every stage error hit on the way. Earlier stages are recomputed
/// in memory where needed; `run_fit` and `run_report` instead resume from
/// features.csv (and excess.csv) already present in the output directory.
///
///   run_classify  -> classified_flights.csv
///   run_measure   -> excess.csv (plus svg/<gdp>.svg with write_svg)
///   run_features  -> features.csv
///   run_fit       -> fit_report.json
///   run_report    -> fit_report.json, importance.csv, summary.json
///   run_all       -> all of the above
RunResult run_classify(const RunConfig& cfg);
RunResult run_measure(const RunConfig& cfg);
RunResult run_features(const RunConfig& cfg);
RunResult run_fit(const RunConfig& cfg);
RunResult run_report(const RunConfig& cfg);
RunResult run_all(const RunConfig& cfg);

}  // namespace gdpx::pipeline
