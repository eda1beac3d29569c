#include "ddk/time.hpp"

#include <charconv>
#include <cstdio>

namespace ddk {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

LocalMillis floor_div(LocalMillis a, LocalMillis b) {
    LocalMillis q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

Date date_of(LocalMillis t) {
    const auto days = floor_div(t, kMillisPerDay);
    return Date{std::chrono::sys_days{std::chrono::days{days}}};
}

LocalMillis day_start(Date d) {
    return static_cast<LocalMillis>(std::chrono::sys_days{d}.time_since_epoch().count()) *
           kMillisPerDay;
}

LocalMillis millis_of_day(LocalMillis t) { return t - floor_div(t, kMillisPerDay) * kMillisPerDay; }

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::optional<int> parse_time_of_day(std::string_view text) {
    int h = 0, m = 0, s = 0;
    if (text.size() != 5 && text.size() != 8) return std::nullopt;
    if (text[2] != ':') return std::nullopt;
    if (!parse_int(text.substr(0, 2), h) || !parse_int(text.substr(3, 2), m)) return std::nullopt;
    if (text.size() == 8) {
        if (text[5] != ':' || !parse_int(text.substr(6, 2), s)) return std::nullopt;
    }
    if (h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 59) return std::nullopt;
    return h * 3600 + m * 60 + s;
}

std::optional<LocalMillis> parse_timestamp(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    if (text.find('-', 1) == std::string_view::npos) {
        LocalMillis ms = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), ms);
        if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
        return ms;
    }

    if (text.back() == 'Z') text.remove_suffix(1);
    if (text.size() < 19 || (text[10] != ' ' && text[10] != 'T')) return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    auto tod = parse_time_of_day(text.substr(11, 8));
    if (!date || !tod) return std::nullopt;

    int millis = 0;
    if (text.size() > 19) {
        if (text[19] != '.') return std::nullopt;
        auto frac = text.substr(20);
        if (frac.empty() || frac.size() > 9) return std::nullopt;
        int value = 0;
        if (!parse_int(frac, value)) return std::nullopt;
        // scale to milliseconds, truncating sub-millisecond digits
        int digits = static_cast<int>(frac.size());
        while (digits < 3) {
            value *= 10;
            ++digits;
        }
        while (digits > 3) {
            value /= 10;
            --digits;
        }
        millis = value;
    }
    return day_start(*date) + static_cast<LocalMillis>(*tod) * 1000 + millis;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_timestamp(LocalMillis t) {
    const auto ms = millis_of_day(t);
    const int secs = static_cast<int>(ms / 1000);
    const int frac = static_cast<int>(ms % 1000);
    char buf[32];
    if (frac == 0) {
        std::snprintf(buf, sizeof buf, " %02d:%02d:%02d", secs / 3600, (secs / 60) % 60, secs % 60);
    } else {
        std::snprintf(buf, sizeof buf, " %02d:%02d:%02d.%03d", secs / 3600, (secs / 60) % 60,
                      secs % 60, frac);
    }
    return format_date(date_of(t)) + buf;
}

}  // namespace ddk
