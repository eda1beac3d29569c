#include "ddk/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddk/error.hpp"
#include "ddk/quantile.hpp"

namespace ddk {

const char* event_kind_name(EventKind kind) {
    return kind == EventKind::drawdown ? "drawdown" : "drawup";
}

void EpsilonConfig::validate() const {
    if (bar_width <= 0) throw InputError("bar width must be positive");
    if (mode == EpsilonMode::adaptive && !(epsilon0 > 0.0))
        throw InputError("epsilon0 must be positive in adaptive mode");
    if (mode == EpsilonMode::fixed && !(fixed_epsilon >= 0.0))
        throw InputError("fixed epsilon must be non-negative");
}

double EpsilonConfig::threshold(double sigma_prev) const {
    return mode == EpsilonMode::adaptive ? epsilon0 * sigma_prev : fixed_epsilon;
}

double rms_volatility(std::span<const double> returns) {
    if (returns.empty()) throw AnalysisError("volatility of an empty return series");
    std::vector<double> squares;
    squares.reserve(returns.size());
    for (double r : returns) squares.push_back(r * r);
    std::sort(squares.begin(), squares.end());
    double sum = 0.0;
    for (double s : squares) sum += s;
    return std::sqrt(sum / static_cast<double>(returns.size()));
}

DayVolatility day_volatility(const BarSeries& day) { return {day.day, rms_volatility(day.returns)}; }

std::vector<EventSpan> detect_events(std::span<const double> returns, double epsilon) {
    if (!(epsilon >= 0.0)) throw AnalysisError("epsilon must be non-negative");
    std::vector<EventSpan> out;
    const std::size_t n = returns.size();

    std::size_t start = 0;
    while (start < n && returns[start] == 0.0) ++start;
    if (start == n) return out;
    EventKind kind = returns[start] < 0.0 ? EventKind::drawdown : EventKind::drawup;

    while (true) {
        double cum = 0.0;
        double extremum = 0.0;
        std::size_t arg = start;
        bool ended = false;
        for (std::size_t k = start + 1; k <= n; ++k) {
            cum += returns[k - 1];
            double deviation;
            if (kind == EventKind::drawdown) {
                if (cum < extremum) {
                    extremum = cum;
                    arg = k;
                }
                deviation = cum - extremum;
            } else {
                if (cum > extremum) {
                    extremum = cum;
                    arg = k;
                }
                deviation = extremum - cum;
            }
            if (deviation > epsilon) {
                out.push_back({kind, start, arg});
                start = arg;
                kind = kind == EventKind::drawdown ? EventKind::drawup : EventKind::drawdown;
                ended = true;
                break;
            }
        }
        if (!ended) break;
    }
    return out;
}

Event characterize(const EventSpan& span, const BarSeries& day, double sigma_prev) {
    if (span.k_end <= span.k_start || span.k_end >= day.closes.size())
        throw AnalysisError("event span outside the day's bars");
    if (sigma_prev < 0.0) throw AnalysisError("negative volatility");

    const double p0 = day.closes[span.k_start];
    const double p1 = day.closes[span.k_end];
    Event e;
    e.kind = span.kind;
    e.contract = day.source;
    e.day = day.day;
    e.start_time = day.bar_time(span.k_start);
    e.k_start = span.k_start;
    e.k_end = span.k_end;
    e.duration = static_cast<double>(span.k_end - span.k_start) * day.bar_width;
    e.size = std::abs(p1 - p0);
    e.ret = std::abs(std::log(p1) - std::log(p0));
    e.speed = e.ret / e.duration;
    e.sigma_prev = sigma_prev;
    if (sigma_prev > 0.0) {
        e.norm_ret = e.ret / sigma_prev;
        e.norm_speed = e.norm_ret / e.duration;
    } else {
        e.normalizable = false;
        e.norm_ret = std::numeric_limits<double>::quiet_NaN();
        e.norm_speed = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
}

EventSeries detect_series(const std::string& contract, const std::vector<BarSeries>& days,
                          const EpsilonConfig& config) {
    config.validate();
    EventSeries series{contract, config, {}};
    for (std::size_t i = 1; i < days.size(); ++i) {
        if (days[i].bar_width != config.bar_width)
            throw AnalysisError("bar width of " + format_date(days[i].day) +
                                " does not match the detection config");
        const double sigma_prev = rms_volatility(days[i - 1].returns);
        for (const auto& span : detect_events(days[i].returns, config.threshold(sigma_prev))) {
            auto e = characterize(span, days[i], sigma_prev);
            if (e.contract.empty()) e.contract = contract;
            series.events.push_back(std::move(e));
        }
    }
    return series;
}

const char* event_field_name(EventField field) {
    switch (field) {
        case EventField::duration: return "duration";
        case EventField::size: return "size";
        case EventField::ret: return "return";
        case EventField::norm_ret: return "norm_return";
        case EventField::speed: return "speed";
        case EventField::norm_speed: return "norm_speed";
    }
    return "unknown";
}

double field_value(const Event& e, EventField field) {
    switch (field) {
        case EventField::duration: return e.duration;
        case EventField::size: return e.size;
        case EventField::ret: return e.ret;
        case EventField::norm_ret: return e.norm_ret;
        case EventField::speed: return e.speed;
        case EventField::norm_speed: return e.norm_speed;
    }
    return 0.0;
}

std::vector<double> field_values(const std::vector<Event>& events, EventKind kind, EventField field) {
    const bool normalized = field == EventField::norm_ret || field == EventField::norm_speed;
    std::vector<double> out;
    for (const auto& e : events) {
        if (e.kind != kind || (normalized && !e.normalizable)) continue;
        out.push_back(field_value(e, field));
    }
    return out;
}

DescriptiveStats descriptive_stats(std::span<const double> values) {
    if (values.empty()) throw AnalysisError("descriptive statistics of an empty sample");
    return {values.size(), order_statistic_quantile(values, 0.5), order_statistic_quantile(values, 0.9),
            *std::max_element(values.begin(), values.end())};
}

std::vector<double> PooledEvents::values(EventKind kind, EventField field) const {
    return field_values(of(kind), kind, field);
}

PooledEvents pool_events(std::span<const EventSeries> series) {
    PooledEvents pooled;
    if (series.empty()) return pooled;
    pooled.config = series.front().config;
    for (const auto& s : series) {
        if (!(s.config == pooled.config))
            throw AnalysisError("cannot pool event series '" + s.contract +
                                "': detection config differs from '" + series.front().contract + "'");
        for (const auto& e : s.events) {
            if (!e.normalizable) continue;
            (e.kind == EventKind::drawdown ? pooled.drawdowns : pooled.drawups).push_back(e);
        }
    }
    return pooled;
}

namespace {

template <typename Fn>
void for_each_tail_return(const Event& event, const BarSeries& day, double threshold, Fn&& fn) {
    if (event.k_end > day.returns.size() || event.k_start >= event.k_end)
        throw AnalysisError("event does not belong to the given day");
    if (!(event.sigma_prev > 0.0)) return;
    for (std::size_t i = event.k_start; i < event.k_end; ++i) {
        const double r = day.returns[i];
        const bool same_sign = event.kind == EventKind::drawdown ? r < 0.0 : r > 0.0;
        if (!same_sign) continue;
        const double normalized = std::abs(r) / event.sigma_prev;
        if (normalized >= threshold) fn(normalized);
    }
}

}  // namespace

std::size_t count_tail_returns(const Event& event, const BarSeries& day, double threshold) {
    std::size_t n = 0;
    for_each_tail_return(event, day, threshold, [&](double) { ++n; });
    return n;
}

std::optional<double> contribution_ratio(const Event& event, const BarSeries& day, double threshold) {
    std::size_t n = 0;
    double sum = 0.0;
    for_each_tail_return(event, day, threshold, [&](double v) {
        ++n;
        sum += v;
    });
    if (n == 0) return std::nullopt;
    return sum / event.norm_ret;
}

}  // namespace ddk
