#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "ddk/time.hpp"

namespace ddk {

struct TickRecord {
    LocalMillis timestamp = 0;
    double price = 0.0;  // 0 means missing
    double bid = 0.0;
    double ask = 0.0;
    double volume = 0.0;
    bool corrected = false;
};

// CSV header names for each field. Empty bid/ask/volume/corrected names mean
// the column is absent from the file.
struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string price = "price";
    std::string bid = "bid";
    std::string ask = "ask";
    std::string volume = "volume";
    std::string corrected = "corrected";
};

struct RowError {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string message;
};

struct TickFile {
    std::vector<TickRecord> ticks;
    std::vector<RowError> errors;
    bool has_quotes = false;
};

// Parses a CSV tick file. Malformed rows are reported, not thrown. Output is
// stable-sorted by timestamp. Throws InputError if the header lacks a
// required column.
TickFile parse_ticks(std::istream& source, const ColumnMap& columns = {});

struct SessionSpec {
    int ath_start = 0;  // seconds after local midnight
    int ath_end = 0;
    std::string timezone_label;
    int max_gap = 300;  // seconds

    void validate() const;
};

enum class CleanRule : std::size_t {
    outside_session = 0,
    zero_price,
    negative_spread,
    wide_spread,
    corrected_trade,
    price_outside_quotes,
};

inline constexpr std::size_t kCleanRuleCount = 6;

const char* clean_rule_name(CleanRule rule);

struct CleanReport {
    std::size_t input_rows = 0;
    std::array<std::size_t, kCleanRuleCount> removed{};
    std::array<bool, kCleanRuleCount> applied{};
    std::size_t removed_gap_days = 0;  // surviving rows dropped with their day
    std::size_t survivors = 0;
    std::vector<Date> excluded_days;
    std::size_t passes = 0;

    bool balanced() const;
};

struct CleanResult {
    std::vector<TickRecord> ticks;
    CleanReport report;
};

// Applies cleaning rules (i)-(vi) in order, then drops days with an intra-session
// gap longer than session.max_gap. Rules that need quotes are skipped when
// has_quotes is false. Repeats until no further rows are removed, so the
// output is a fixed point.
CleanResult clean_ticks(const std::vector<TickRecord>& ticks, const SessionSpec& session,
                        bool has_quotes = true);

struct BarSeries {
    Date day{};
    int bar_width = 30;      // seconds
    int first_bar = 1;       // bar index k of closes[0]; bar k closes at ath_start + k*bar_width
    int n_bars = 0;          // floor(session length / bar_width)
    LocalMillis session_start = 0;
    std::vector<double> closes;
    std::vector<double> returns;  // returns[i] = log(closes[i+1]) - log(closes[i])
    std::string source;           // contract the day was taken from

    LocalMillis bar_time(std::size_t close_index) const {
        return session_start +
               static_cast<LocalMillis>(first_bar + static_cast<int>(close_index)) * bar_width * 1000;
    }
};

std::vector<double> log_returns(const std::vector<double>& closes);

struct AggregateResult {
    std::vector<BarSeries> days;
    std::vector<std::string> notices;
};

// Builds one bar series per day. Close of bar k is the last trade at or before
// session_start + k*bar_width; empty bars repeat the previous close.
AggregateResult aggregate_bars(const std::vector<TickRecord>& ticks, int bar_width,
                               const SessionSpec& session, const std::string& source = {});

// Days strictly before roll_date come from front, the rest from next.
// Throws AnalysisError if next has no data on roll_date.
std::vector<BarSeries> stitch_roll(const std::vector<BarSeries>& front,
                                   const std::vector<BarSeries>& next, Date roll_date);

}  // namespace ddk
