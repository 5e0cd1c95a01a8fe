#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace amdcast {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
    Date() = default;
    Date(int year, int month, int day);

    static Date from_epoch_days(std::int64_t days);
    /// Parses "YYYY-MM-DD". Throws DataError on malformed input.
    static Date parse_iso(const std::string& text);

    std::int64_t epoch_days() const { return days_; }
    int year() const;
    int month() const;
    int day() const;
    /// 1-based day of year (Jan 1 -> 1).
    int day_of_year() const;

    std::string to_iso() const;

    Date plus_days(std::int64_t n) const { return from_epoch_days(days_ + n); }

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t days_ = 0;
};

} // namespace amdcast
