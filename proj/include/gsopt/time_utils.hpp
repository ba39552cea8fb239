#ifndef GSOPT_TIME_UTILS_HPP
#define GSOPT_TIME_UTILS_HPP

#include <cstdint>
#include <string>

namespace gsopt {

// Time is UTC seconds since 1970-01-01T00:00:00Z, leap seconds ignored.
// Stored as double so refined contact endpoints keep sub-second precision.

// Parses "YYYY-MM-DDTHH:MM:SS[.fff][Z]"; a space separator is also accepted.
// Throws InputError on anything else.
double parse_utc(const std::string& text);

// Formats with millisecond precision: "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_utc(double t_seconds);

// Civil date <-> day count conversions (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// Julian date for sidereal-time computations.
inline double julian_date(double t_seconds) {
    return 2440587.5 + t_seconds / 86400.0;
}

constexpr double kSecondsPerDay = 86400.0;
constexpr double kSecondsPerHour = 3600.0;

} // namespace gsopt

#endif // GSOPT_TIME_UTILS_HPP
