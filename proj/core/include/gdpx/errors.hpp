#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdpx {

/// Base class for all pipeline errors. `what()` carries a fully formatted
/// message; typed fields stay available for programmatic handling.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, std::string column, const std::string& detail)
      : Error("malformed row at line " + std::to_string(line) + ", column '" + column +
              "': " + detail),
        line_(line),
        column_(std::move(column)) {}

  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string id, const std::string& detail)
      : Error("invariant violation for '" + id + "': " + detail), id_(std::move(id)) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class DuplicateKey : public Error {
 public:
  explicit DuplicateKey(std::string key)
      : Error("duplicate key '" + key + "'"), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class OrphanEvent : public Error {
 public:
  explicit OrphanEvent(std::string gdp_key)
      : Error("revision or cancel precedes release for GDP '" + gdp_key + "'"),
        gdp_key_(std::move(gdp_key)) {}

  const std::string& gdp_key() const { return gdp_key_; }

 private:
  std::string gdp_key_;
};

class OverlapError : public Error {
 public:
  OverlapError(std::string airport, std::string key_a, std::string key_b)
      : Error("overlapping GDP windows at " + airport + ": '" + key_a + "' and '" + key_b + "'"),
        airport_(std::move(airport)),
        key_a_(std::move(key_a)),
        key_b_(std::move(key_b)) {}

  const std::string& airport() const { return airport_; }
  const std::string& key_a() const { return key_a_; }
  const std::string& key_b() const { return key_b_; }

 private:
  std::string airport_, key_a_, key_b_;
};

class OutOfWindow : public Error {
 public:
  explicit OutOfWindow(std::int64_t quarter)
      : Error("quarter " + std::to_string(quarter) + " outside the program window"),
        quarter_(quarter) {}

  std::int64_t quarter() const { return quarter_; }

 private:
  std::int64_t quarter_;
};

class MissingEdct : public Error {
 public:
  explicit MissingEdct(std::string flight_id)
      : Error("restricted flight '" + flight_id + "' has no EDCT"),
        flight_id_(std::move(flight_id)) {}

  const std::string& flight_id() const { return flight_id_; }

 private:
  std::string flight_id_;
};

class UnderdefinedCapacity : public Error {
 public:
  explicit UnderdefinedCapacity(std::int64_t quarter)
      : Error("no capacity defined for quarter " + std::to_string(quarter) +
              " and no default rate configured"),
        quarter_(quarter) {}

  std::int64_t quarter() const { return quarter_; }

 private:
  std::int64_t quarter_;
};

class MissingQuarter : public Error {
 public:
  MissingQuarter(std::string airport, std::int64_t quarter)
      : Error("no ARR RATE for " + airport + " at quarter " + std::to_string(quarter)),
        airport_(std::move(airport)),
        quarter_(quarter) {}

  const std::string& airport() const { return airport_; }
  std::int64_t quarter() const { return quarter_; }

 private:
  std::string airport_;
  std::int64_t quarter_;
};

class NoRestrictedFlights : public Error {
 public:
  NoRestrictedFlights(double excess_delay_min, double airborne_increase_min)
      : Error("no restricted flights; per-flight excess delay undefined"),
        excess_delay_min_(excess_delay_min),
        airborne_increase_min_(airborne_increase_min) {}

  double excess_delay_min() const { return excess_delay_min_; }
  double airborne_increase_min() const { return airborne_increase_min_; }

 private:
  double excess_delay_min_;
  double airborne_increase_min_;
};

class RankDeficient : public Error {
 public:
  RankDeficient() : Error("design matrix is rank deficient") {}
};

class NotConverged : public Error {
 public:
  NotConverged(int max_iter, std::vector<double> partial_coefs, double partial_intercept)
      : Error("coordinate descent did not converge in " + std::to_string(max_iter) +
              " iterations"),
        max_iter_(max_iter),
        partial_coefs_(std::move(partial_coefs)),
        partial_intercept_(partial_intercept) {}

  int max_iter() const { return max_iter_; }
  const std::vector<double>& partial_coefs() const { return partial_coefs_; }
  double partial_intercept() const { return partial_intercept_; }

 private:
  int max_iter_;
  std::vector<double> partial_coefs_;
  double partial_intercept_;
};

class ZeroVarianceTarget : public Error {
 public:
  ZeroVarianceTarget() : Error("target has zero variance, R^2 undefined") {}
};

class DegenerateScore : public Error {
 public:
  explicit DegenerateScore(double baseline)
      : Error("baseline R^2 of " + std::to_string(baseline) +
              " is not positive; permutation importance undefined"),
        baseline_(baseline) {}

  double baseline() const { return baseline_; }

 private:
  double baseline_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& detail) : Error("config error: " + detail) {}
};

}  // namespace gdpx
