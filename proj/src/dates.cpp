#include "amdcast/dates.hpp"

#include "amdcast/errors.hpp"

#include <array>
#include <cstdio>

namespace amdcast {

namespace {

// Civil <-> epoch-day conversions (Howard Hinnant's algorithms).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

} // namespace

Date::Date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
        throw DataError("invalid calendar date " + std::to_string(year) + "-" +
                        std::to_string(month) + "-" + std::to_string(day));
    }
    days_ = days_from_civil(year, month, day);
}

Date Date::from_epoch_days(std::int64_t days) {
    Date d;
    d.days_ = days;
    return d;
}

Date Date::parse_iso(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw DataError("date '" + text + "' is not in YYYY-MM-DD form");
    }
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (text[i] < '0' || text[i] > '9') {
            throw DataError("date '" + text + "' is not in YYYY-MM-DD form");
        }
    }
    const int y = std::stoi(text.substr(0, 4));
    const int m = std::stoi(text.substr(5, 2));
    const int d = std::stoi(text.substr(8, 2));
    return Date(y, m, d);
}

int Date::year() const {
    int y, m, d;
    civil_from_days(days_, y, m, d);
    return y;
}

int Date::month() const {
    int y, m, d;
    civil_from_days(days_, y, m, d);
    return m;
}

int Date::day() const {
    int y, m, d;
    civil_from_days(days_, y, m, d);
    return d;
}

int Date::day_of_year() const {
    int y, m, d;
    civil_from_days(days_, y, m, d);
    return static_cast<int>(days_ - days_from_civil(y, 1, 1)) + 1;
}

std::string Date::to_iso() const {
    int y, m, d;
    civil_from_days(days_, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

} // namespace amdcast
