#include "gsopt/time_utils.hpp"
#include "gsopt/errors.hpp"

#include <cmath>
#include <cstdio>

namespace gsopt {

// Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

double parse_utc(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    char sep = 0;
    int consumed = 0;
    const int n = std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%lf%n",
                              &y, &mo, &d, &sep, &h, &mi, &sec, &consumed);
    if (n != 7 || (sep != 'T' && sep != ' '))
        throw InputError("invalid UTC timestamp: '" + text + "'");
    std::string rest = text.substr(static_cast<size_t>(consumed));
    if (!rest.empty() && rest != "Z")
        throw InputError("invalid UTC timestamp suffix: '" + text + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0)
        throw InputError("UTC timestamp out of range: '" + text + "'");
    const std::int64_t days = days_from_civil(y, mo, d);
    return static_cast<double>(days) * kSecondsPerDay + h * 3600.0 + mi * 60.0 + sec;
}

std::string format_utc(double t_seconds) {
    // Round to whole milliseconds first so 59.9999 doesn't print as 59.100.
    double ms_total = std::round(t_seconds * 1000.0);
    std::int64_t ms = static_cast<std::int64_t>(ms_total);
    std::int64_t day_ms = 86400000;
    std::int64_t days = ms >= 0 ? ms / day_ms : (ms - (day_ms - 1)) / day_ms;
    std::int64_t rem = ms - days * day_ms;
    int year, month, day;
    civil_from_days(days, year, month, day);
    const int h = static_cast<int>(rem / 3600000);
    rem -= static_cast<std::int64_t>(h) * 3600000;
    const int mi = static_cast<int>(rem / 60000);
    rem -= static_cast<std::int64_t>(mi) * 60000;
    const int s = static_cast<int>(rem / 1000);
    const int frac = static_cast<int>(rem % 1000);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  year, month, day, h, mi, s, frac);
    return buf;
}

} // namespace gsopt
