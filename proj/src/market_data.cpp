#include "ddk/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "ddk/error.hpp"

namespace ddk {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"'))
        s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(pos)));
            break;
        }
        fields.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return 0.0;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<bool> parse_flag(std::string_view s) {
    if (s.empty() || s == "0" || s == "false" || s == "FALSE" || s == "N" || s == "n" || s == "F")
        return false;
    if (s == "1" || s == "true" || s == "TRUE" || s == "Y" || s == "y" || s == "T") return true;
    return std::nullopt;
}

std::optional<std::size_t> find_column(const std::vector<std::string_view>& header,
                                       const std::string& name) {
    if (name.empty()) return std::nullopt;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

double median_of(std::vector<double> values) {
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

// Half-open index ranges [first, last) of rows sharing a calendar day.
std::vector<std::pair<std::size_t, std::size_t>> day_ranges(const std::vector<TickRecord>& ticks) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= ticks.size(); ++i) {
        if (i == ticks.size() || date_of(ticks[i].timestamp) != date_of(ticks[begin].timestamp)) {
            if (i > begin) ranges.emplace_back(begin, i);
            begin = i;
        }
    }
    return ranges;
}

}  // namespace

TickFile parse_ticks(std::istream& source, const ColumnMap& columns) {
    TickFile out;
    std::string line;
    if (!std::getline(source, line)) return out;

    const auto header = split_fields(line);
    const auto ts_col = find_column(header, columns.timestamp);
    const auto price_col = find_column(header, columns.price);
    if (!ts_col) throw InputError("tick file header has no column '" + columns.timestamp + "'");
    if (!price_col) throw InputError("tick file header has no column '" + columns.price + "'");
    const auto bid_col = find_column(header, columns.bid);
    const auto ask_col = find_column(header, columns.ask);
    if (bid_col.has_value() != ask_col.has_value())
        throw InputError("tick file must carry both bid and ask columns or neither");
    const auto volume_col = find_column(header, columns.volume);
    const auto corrected_col = find_column(header, columns.corrected);
    out.has_quotes = bid_col.has_value();

    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            out.errors.push_back({line_no, "expected " + std::to_string(header.size()) +
                                               " fields, found " + std::to_string(fields.size())});
            continue;
        }
        TickRecord tick;
        const auto ts = parse_timestamp(fields[*ts_col]);
        if (!ts) {
            out.errors.push_back({line_no, "unparsable timestamp '" + std::string(fields[*ts_col]) + "'"});
            continue;
        }
        tick.timestamp = *ts;

        auto read = [&](std::optional<std::size_t> col, double& target, const char* what) {
            if (!col) return true;
            const auto v = parse_number(fields[*col]);
            if (!v || *v < 0.0) {
                out.errors.push_back({line_no, std::string("bad ") + what + " '" +
                                                   std::string(fields[*col]) + "'"});
                return false;
            }
            target = *v;
            return true;
        };
        if (!read(price_col, tick.price, "price") || !read(bid_col, tick.bid, "bid") ||
            !read(ask_col, tick.ask, "ask") || !read(volume_col, tick.volume, "volume"))
            continue;
        if (corrected_col) {
            const auto flag = parse_flag(fields[*corrected_col]);
            if (!flag) {
                out.errors.push_back({line_no, "bad correction flag '" +
                                                   std::string(fields[*corrected_col]) + "'"});
                continue;
            }
            tick.corrected = *flag;
        }
        out.ticks.push_back(tick);
    }

    std::stable_sort(out.ticks.begin(), out.ticks.end(),
                     [](const TickRecord& a, const TickRecord& b) { return a.timestamp < b.timestamp; });
    return out;
}

void SessionSpec::validate() const {
    if (ath_start < 0 || ath_end > 86400 || ath_start >= ath_end)
        throw InputError("session start must precede session end within one day");
    if (max_gap <= 0) throw InputError("max_gap must be positive");
}

const char* clean_rule_name(CleanRule rule) {
    switch (rule) {
        case CleanRule::outside_session: return "outside_session";
        case CleanRule::zero_price: return "zero_price";
        case CleanRule::negative_spread: return "negative_spread";
        case CleanRule::wide_spread: return "wide_spread";
        case CleanRule::corrected_trade: return "corrected_trade";
        case CleanRule::price_outside_quotes: return "price_outside_quotes";
    }
    return "unknown";
}

bool CleanReport::balanced() const {
    const auto removed_total = std::accumulate(removed.begin(), removed.end(), std::size_t{0});
    return removed_total + removed_gap_days + survivors == input_rows;
}

CleanResult clean_ticks(const std::vector<TickRecord>& ticks, const SessionSpec& session,
                        bool has_quotes) {
    session.validate();
    CleanResult result;
    auto& report = result.report;
    report.input_rows = ticks.size();
    report.applied = {true, true, has_quotes, has_quotes, true, has_quotes};

    const LocalMillis start_ms = static_cast<LocalMillis>(session.ath_start) * 1000;
    const LocalMillis end_ms = static_cast<LocalMillis>(session.ath_end) * 1000;
    const LocalMillis max_gap_ms = static_cast<LocalMillis>(session.max_gap) * 1000;

    std::vector<TickRecord> current = ticks;
    auto count = [&](CleanRule rule) -> std::size_t& {
        return report.removed[static_cast<std::size_t>(rule)];
    };
    auto apply = [&](CleanRule rule, auto&& drop) {
        const auto before = current.size();
        std::erase_if(current, drop);
        count(rule) += before - current.size();
    };

    while (true) {
        ++report.passes;
        const auto pass_start = current.size();

        apply(CleanRule::outside_session, [&](const TickRecord& t) {
            const auto tod = millis_of_day(t.timestamp);
            return tod < start_ms || tod > end_ms;
        });
        apply(CleanRule::zero_price, [&](const TickRecord& t) {
            return t.price == 0.0 || (has_quotes && (t.bid == 0.0 || t.ask == 0.0));
        });
        if (has_quotes) {
            apply(CleanRule::negative_spread, [](const TickRecord& t) { return t.ask < t.bid; });

            std::vector<TickRecord> kept;
            kept.reserve(current.size());
            for (const auto& [first, last] : day_ranges(current)) {
                std::vector<double> spreads;
                spreads.reserve(last - first);
                for (auto i = first; i < last; ++i) spreads.push_back(current[i].ask - current[i].bid);
                const double limit = 20.0 * median_of(spreads);
                for (auto i = first; i < last; ++i) {
                    if (current[i].ask - current[i].bid > limit)
                        ++count(CleanRule::wide_spread);
                    else
                        kept.push_back(current[i]);
                }
            }
            current = std::move(kept);
        }
        apply(CleanRule::corrected_trade, [](const TickRecord& t) { return t.corrected; });
        if (has_quotes) {
            apply(CleanRule::price_outside_quotes, [](const TickRecord& t) {
                const double spread = t.ask - t.bid;
                return t.price > t.ask + spread || t.price < t.bid - spread;
            });
        }

        std::vector<TickRecord> kept;
        kept.reserve(current.size());
        for (const auto& [first, last] : day_ranges(current)) {
            bool gap = false;
            for (auto i = first + 1; i < last && !gap; ++i)
                gap = current[i].timestamp - current[i - 1].timestamp > max_gap_ms;
            if (gap) {
                report.removed_gap_days += last - first;
                report.excluded_days.push_back(date_of(current[first].timestamp));
            } else {
                kept.insert(kept.end(), current.begin() + static_cast<std::ptrdiff_t>(first),
                            current.begin() + static_cast<std::ptrdiff_t>(last));
            }
        }
        current = std::move(kept);

        if (current.size() == pass_start) break;
    }

    std::sort(report.excluded_days.begin(), report.excluded_days.end());
    report.survivors = current.size();
    result.ticks = std::move(current);
    return result;
}

std::vector<double> log_returns(const std::vector<double>& closes) {
    std::vector<double> out;
    if (closes.size() < 2) return out;
    out.reserve(closes.size() - 1);
    for (std::size_t i = 0; i + 1 < closes.size(); ++i)
        out.push_back(std::log(closes[i + 1]) - std::log(closes[i]));
    return out;
}

AggregateResult aggregate_bars(const std::vector<TickRecord>& ticks, int bar_width,
                               const SessionSpec& session, const std::string& source) {
    session.validate();
    if (bar_width <= 0) throw InputError("bar width must be positive");
    AggregateResult out;
    const int n_bars = (session.ath_end - session.ath_start) / bar_width;
    const LocalMillis width_ms = static_cast<LocalMillis>(bar_width) * 1000;

    for (const auto& [first, last] : day_ranges(ticks)) {
        const Date day = date_of(ticks[first].timestamp);
        const LocalMillis start = day_start(day) + static_cast<LocalMillis>(session.ath_start) * 1000;
        const LocalMillis end = day_start(day) + static_cast<LocalMillis>(session.ath_end) * 1000;

        BarSeries bars;
        bars.day = day;
        bars.bar_width = bar_width;
        bars.n_bars = n_bars;
        bars.session_start = start;
        bars.source = source;

        std::optional<double> last_price;
        std::size_t i = first;
        for (int k = 1; k <= n_bars; ++k) {
            const LocalMillis boundary = start + k * width_ms;
            while (i < last && ticks[i].timestamp <= boundary) {
                if (ticks[i].timestamp >= start && ticks[i].timestamp <= end && ticks[i].price > 0.0)
                    last_price = ticks[i].price;
                ++i;
            }
            if (!last_price) continue;
            if (bars.closes.empty()) bars.first_bar = k;
            bars.closes.push_back(*last_price);
        }

        if (bars.closes.size() < 2) {
            out.notices.push_back(format_date(day) + ": " +
                                  (bars.closes.empty() ? "no trades inside the session"
                                                       : "fewer than two bars") +
                                  ", day omitted");
            continue;
        }
        bars.returns = log_returns(bars.closes);
        out.days.push_back(std::move(bars));
    }
    return out;
}

std::vector<BarSeries> stitch_roll(const std::vector<BarSeries>& front,
                                   const std::vector<BarSeries>& next, Date roll_date) {
    const bool covered = std::any_of(next.begin(), next.end(),
                                     [&](const BarSeries& d) { return d.day == roll_date; });
    if (!covered)
        throw AnalysisError("roll gap: next contract has no data on roll date " +
                            format_date(roll_date));
    std::vector<BarSeries> out;
    for (const auto& d : front)
        if (d.day < roll_date) out.push_back(d);
    for (const auto& d : next)
        if (d.day >= roll_date) out.push_back(d);
    return out;
}

}  // namespace ddk
