#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tmf {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, unsigned month, unsigned day);

    /// Accepts `YYYY-MM-DD` or `DD/MM/YYYY`. Throws std::invalid_argument.
    static Date parse(std::string_view text);

    constexpr std::int32_t days() const { return days_; }
    std::string iso() const;

    friend constexpr auto operator<=>(Date, Date) = default;

private:
    std::int32_t days_ = 0;
};

/// UTC instant with one-second resolution.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t seconds) : seconds_(seconds) {}

    /// Accepts `YYYY-MM-DDTHH:MM:SS[Z]`, `YYYY-MM-DD HH:MM:SS`, or a bare date.
    static Timestamp parse(std::string_view text);

    static constexpr Timestamp min() { return Timestamp{INT64_MIN}; }

    constexpr std::int64_t seconds() const { return seconds_; }
    Date date() const;
    std::string iso() const;

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

private:
    std::int64_t seconds_ = 0;
};

} // namespace tmf
