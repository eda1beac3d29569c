#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ddk {

// Exchange-local wall-clock time, milliseconds since 1970-01-01 00:00 local.
// No timezone or DST arithmetic is ever applied.
using LocalMillis = std::int64_t;

using Date = std::chrono::year_month_day;

inline constexpr LocalMillis kMillisPerDay = 86'400'000;

Date date_of(LocalMillis t);
LocalMillis day_start(Date d);
LocalMillis millis_of_day(LocalMillis t);

// Accepts "YYYY-MM-DD HH:MM:SS[.fff]" (space or 'T' separator, optional
// trailing 'Z') or a bare integer of epoch milliseconds.
std::optional<LocalMillis> parse_timestamp(std::string_view text);

std::optional<Date> parse_date(std::string_view text);

// "HH:MM" or "HH:MM:SS" -> seconds after midnight.
std::optional<int> parse_time_of_day(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(LocalMillis t);

}  // namespace ddk
