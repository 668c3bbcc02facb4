#include "gdpx/time.hpp"

#include <cstdio>
#include <stdexcept>

namespace gdpx {

namespace {

constexpr std::int64_t kMinutesPerDay = 1440;

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (static_cast<unsigned>(m) + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || (y % 400 == 0);
    return leap ? 29 : 28;
  }
  return kDays[m - 1];
}

}  // namespace

QuarterIndex quarter_of(TimePoint t) {
  std::int64_t m = t.minutes;
  std::int64_t q = m / kMinutesPerQuarter;
  if (m < 0 && m % kMinutesPerQuarter != 0) --q;
  return QuarterIndex{q};
}

TimePoint quarter_start(QuarterIndex q) { return TimePoint{q.value * kMinutesPerQuarter}; }

std::int64_t parse_iso_minutes(std::string_view text) {
  // YYYY-MM-DDTHH:MMZ, 17 characters, no variants accepted.
  if (text.size() != 17 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != 'Z') {
    throw std::invalid_argument("expected YYYY-MM-DDTHH:MMZ, got '" + std::string(text) + "'");
  }
  const auto ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
  const auto hs = text.substr(11, 2), mins = text.substr(14, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds) || !all_digits(hs) ||
      !all_digits(mins)) {
    throw std::invalid_argument("non-numeric field in timestamp '" + std::string(text) + "'");
  }
  const int y = to_int(ys), mo = to_int(ms), d = to_int(ds), h = to_int(hs), mi = to_int(mins);
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 || mi > 59) {
    throw std::invalid_argument("out-of-range timestamp '" + std::string(text) + "'");
  }
  return days_from_civil(y, mo, d) * kMinutesPerDay + h * 60 + mi;
}

std::string format_iso_minutes(std::int64_t abs_minutes) {
  std::int64_t days = abs_minutes / kMinutesPerDay;
  std::int64_t rem = abs_minutes % kMinutesPerDay;
  if (rem < 0) {
    rem += kMinutesPerDay;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 60), static_cast<int>(rem % 60));
  return buf;
}

TimePoint parse_time(std::string_view text, Epoch epoch) {
  return TimePoint{parse_iso_minutes(text) - epoch.abs_minutes};
}

std::string format_time(TimePoint t, Epoch epoch) {
  return format_iso_minutes(epoch.abs_minutes + t.minutes);
}

std::int64_t floor_to_midnight(std::int64_t abs_minutes) {
  std::int64_t days = abs_minutes / kMinutesPerDay;
  if (abs_minutes < 0 && abs_minutes % kMinutesPerDay != 0) --days;
  return days * kMinutesPerDay;
}

}  // namespace gdpx
