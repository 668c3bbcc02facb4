#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdpx/classifier.hpp"
#include "gdpx/flightdata.hpp"
#include "gdpx/gdp_lifecycle.hpp"
#include "gdpx/queueing.hpp"

namespace gdpx::features {

inline constexpr std::size_t kCount = 41;

/// Column indices of the covariate vector, in the fixed emission order.
namespace col {
inline constexpr std::size_t et = 0;             // program window length (hr)
inline constexpr std::size_t gt = 1;             // release-to-start lead (hr)
inline constexpr std::size_t ct = 2;             // tail cut off by a cancel (hr)
inline constexpr std::size_t cnt_r = 3;          // revision count
inline constexpr std::size_t sc_us_ete = 4;      // mean IF enroute time, US tier (hr)
inline constexpr std::size_t sc_ca_ete = 5;      // mean IF enroute time, CA tier (hr)
inline constexpr std::size_t cnt_ef = 6;         // exempt flight count
inline constexpr std::size_t cnt_if = 7;         // in-scope flight count
inline constexpr std::size_t cnt_cf = 8;         // cancel-delay flight count
inline constexpr std::size_t prehold = 9;        // IF holding before start (hr)
inline constexpr std::size_t c_snow = 10;        // cause dummies (benchmark: wind)
inline constexpr std::size_t c_lc = 11;
inline constexpr std::size_t c_ts = 12;
inline constexpr std::size_t c_rwy = 13;
inline constexpr std::size_t d_arr = 14;         // mean ARR RATE minus annual mean
inline constexpr std::size_t u_par_initial = 15; // ARR RATE − initial PAR, mean/std
inline constexpr std::size_t s_par_initial = 16;
inline constexpr std::size_t u_par_final = 17;   // ARR RATE − final PAR, mean/std
inline constexpr std::size_t s_par_final = 18;
inline constexpr std::size_t u_par_revise = 19;  // initial PAR − final PAR, mean/std
inline constexpr std::size_t s_par_revise = 20;
inline constexpr std::size_t d_go_if = 21;       // IF gate-out vs EDCT gate-out (min)
inline constexpr std::size_t s_go_if = 22;
inline constexpr std::size_t d_to_if = 23;       // IF taxi-out vs unimpeded (min)
inline constexpr std::size_t s_to_if = 24;
inline constexpr std::size_t d_ete_if = 25;      // IF airborne vs planned enroute (min)
inline constexpr std::size_t s_ete_if = 26;
inline constexpr std::size_t d_go_ex = 27;       // EF gate-out vs flight plan (min)
inline constexpr std::size_t s_go_ex = 28;
inline constexpr std::size_t d_to_ef = 29;       // EF taxi-out vs unimpeded (min)
inline constexpr std::size_t s_to_ef = 30;
inline constexpr std::size_t d_ete_ef = 31;      // EF airborne vs planned enroute (min)
inline constexpr std::size_t s_ete_ef = 32;
inline constexpr std::size_t apt_bos = 33;       // airport dummies (benchmark: EWR)
inline constexpr std::size_t apt_jfk = 34;
inline constexpr std::size_t apt_lga = 35;
inline constexpr std::size_t apt_ord = 36;
inline constexpr std::size_t apt_phl = 37;
inline constexpr std::size_t apt_sea = 38;
inline constexpr std::size_t apt_sfo = 39;
inline constexpr std::size_t apt_others = 40;
}  // namespace col

/// Column names aligned with the col:: indices.
const std::array<std::string, kCount>& names();

/// Index of a named column; throws ConfigError for unknown names.
std::size_t index_of(std::string_view name);

/// Whether a column is a 0/1 dummy (cause and airport groups).
bool is_dummy(std::string_view name);

/// One GDP's covariates plus the measured outcome. `flags` carries
/// non-fatal notes raised during extraction (empty flight classes, empty
/// program window, unnamed airports above the grouping threshold).
struct FeatureVector {
  std::string gdp_key;
  std::string airport;
  std::array<double, kCount> x{};
  double outcome{0.0};
  std::vector<std::string> flags;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Observed acceptance rates of one airport keyed by quarter, with the
/// airport's mean rate over every recorded quarter.
class RateLookup {
 public:
  RateLookup(std::span<const QuarterHourRecord> records, std::string_view airport);

  std::optional<double> at(QuarterIndex q) const;
  double annual_mean() const { return mean_; }
  std::size_t count() const { return rates_.size(); }
  const std::string& airport() const { return airport_; }

 private:
  std::string airport_;
  std::vector<std::pair<std::int64_t, double>> rates_;  // sorted by quarter
  double mean_{0.0};
};

/// Mean of a series; 0 for an empty series.
double mean_of(std::span<const double> xs);

/// Population standard deviation; 0 for series shorter than two entries.
double pop_std_of(std::span<const double> xs);

/// Mean/std of the three per-quarter rate difference series over the
/// program's effective window. `empty_window` marks a program cancelled
/// before its start (no quarters to average); all six values are then 0.
struct ParStats {
  double u_initial{0.0}, s_initial{0.0};
  double u_final{0.0}, s_final{0.0};
  double u_revise{0.0}, s_revise{0.0};
  double d_arr{0.0};  // mean of ARR RATE − annual mean rate over the window
  bool empty_window{false};
};

/// Throws MissingQuarter when the lookup lacks a rate for a window quarter.
ParStats par_stats(const GdpProgram& p, const RateLookup& rates);

/// Mean/std of the per-flight schedule deviations, split by class. Empty
/// classes yield zeros with the matching flag set.
struct TimeVariationStats {
  double d_go_if{0.0}, s_go_if{0.0};
  double d_to_if{0.0}, s_to_if{0.0};
  double d_ete_if{0.0}, s_ete_if{0.0};
  double d_go_ex{0.0}, s_go_ex{0.0};
  double d_to_ef{0.0}, s_to_ef{0.0};
  double d_ete_ef{0.0}, s_ete_ef{0.0};
  bool no_in_scope{false};
  bool no_exempt{false};
};

TimeVariationStats time_variation_stats(std::span<const FlightRecord> flights,
                                        std::span<const ClassifiedFlight> classes);

/// How airports map onto the dummy group: the seven named airports get their
/// own column, the benchmark airport gets all zeros, and everything else
/// falls into apt_others. An unnamed airport whose annual program count
/// reaches `others_threshold` still lands in apt_others but raises a flag,
/// since it would have deserved its own column.
struct DummyPolicy {
  std::map<std::string, std::int64_t> annual_gdp_counts;
  std::int64_t others_threshold{52};
  std::string benchmark_airport{"EWR"};
};

/// Assembles the full covariate vector and outcome for one program.
/// `flights` and `classes` are parallel. The outcome is the measured excess
/// delay per restricted flight.
FeatureVector extract(const GdpProgram& p, std::span<const FlightRecord> flights,
                      std::span<const ClassifiedFlight> classes, const RateLookup& rates,
                      const ExcessDelayResult& measured, const DummyPolicy& dummies);

}  // namespace gdpx::features
