#include "tmf/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace tmf {
namespace {

int parse_int(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("malformed date: '" + std::string(whole) + "'");
    return value;
}

bool all_digits(std::string_view s) {
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return !s.empty();
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok())
        throw std::invalid_argument("invalid calendar date " + std::to_string(year) + "-" +
                                    std::to_string(month) + "-" + std::to_string(day));
    return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view text) {
    if (text.size() == 10 && text[4] == '-' && text[7] == '-' && all_digits(text.substr(0, 4)))
        return from_ymd(parse_int(text.substr(0, 4), text), parse_int(text.substr(5, 2), text),
                        parse_int(text.substr(8, 2), text));
    if (text.size() == 10 && text[2] == '/' && text[5] == '/')
        return from_ymd(parse_int(text.substr(6, 4), text), parse_int(text.substr(3, 2), text),
                        parse_int(text.substr(0, 2), text));
    throw std::invalid_argument("unrecognized date format: '" + std::string(text) + "'");
}

std::string Date::iso() const {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp Timestamp::parse(std::string_view text) {
    if (text.size() < 10) throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
    const Date d = Date::parse(text.substr(0, 10));
    std::int64_t secs = static_cast<std::int64_t>(d.days()) * 86400;
    std::string_view rest = text.substr(10);
    if (rest.empty()) return Timestamp{secs};
    if (rest.front() != 'T' && rest.front() != ' ')
        throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
    rest.remove_prefix(1);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (rest.size() != 8 || rest[2] != ':' || rest[5] != ':')
        throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
    const int hh = parse_int(rest.substr(0, 2), text);
    const int mm = parse_int(rest.substr(3, 2), text);
    const int ss = parse_int(rest.substr(6, 2), text);
    if (hh > 23 || mm > 59 || ss > 60)
        throw std::invalid_argument("time of day out of range: '" + std::string(text) + "'");
    return Timestamp{secs + hh * 3600 + mm * 60 + ss};
}

Date Timestamp::date() const {
    // floor division so pre-1970 instants land on the right day
    std::int64_t days = seconds_ / 86400;
    if (seconds_ % 86400 < 0) --days;
    return Date{static_cast<std::int32_t>(days)};
}

std::string Timestamp::iso() const {
    const Date d = date();
    const std::int64_t sod = seconds_ - static_cast<std::int64_t>(d.days()) * 86400;
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(sod / 3600),
                  static_cast<int>((sod / 60) % 60), static_cast<int>(sod % 60));
    return d.iso() + buf;
}

} // namespace tmf
