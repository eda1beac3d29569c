#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddk/market_data.hpp"

namespace ddk {

enum class EventKind { drawdown, drawup };

const char* event_kind_name(EventKind kind);

enum class EpsilonMode { adaptive, fixed };

struct EpsilonConfig {
    int bar_width = 30;  // seconds
    double epsilon0 = 1.0;
    EpsilonMode mode = EpsilonMode::adaptive;
    double fixed_epsilon = 0.0;  // log-return units, used in fixed mode

    void validate() const;
    double threshold(double sigma_prev) const;

    bool operator==(const EpsilonConfig&) const = default;
};

struct DayVolatility {
    Date day{};
    double sigma = 0.0;
};

// Uncentered RMS of the returns, sqrt(sum r^2 / N). Squares are summed in
// ascending order so the value does not depend on the order of the input.
double rms_volatility(std::span<const double> returns);

DayVolatility day_volatility(const BarSeries& day);

// Boundaries of one event as close indices of its day: the event spans
// returns[k_start] .. returns[k_end - 1].
struct EventSpan {
    EventKind kind = EventKind::drawdown;
    std::size_t k_start = 0;
    std::size_t k_end = 0;

    bool operator==(const EventSpan&) const = default;
};

// Epsilon-drawdown / drawup decomposition of one day. Leading zero returns are
// skipped; an event runs until the price retreats from its running extremum by
// more than epsilon, ends at that extremum (earliest bar attaining it), and the
// opposite event starts there. The final event, whose retreat never exceeds
// epsilon, is not emitted.
std::vector<EventSpan> detect_events(std::span<const double> returns, double epsilon);

struct Event {
    EventKind kind = EventKind::drawdown;
    std::string contract;
    Date day{};
    LocalMillis start_time = 0;
    std::size_t k_start = 0;
    std::size_t k_end = 0;
    double duration = 0.0;  // tau, seconds
    double size = 0.0;      // |P_end - P_start|
    double ret = 0.0;       // |log P_end - log P_start|
    double norm_ret = 0.0;  // ret / sigma_prev
    double speed = 0.0;     // ret / tau
    double norm_speed = 0.0;
    double sigma_prev = 0.0;
    bool normalizable = true;  // false when sigma_prev == 0
};

Event characterize(const EventSpan& span, const BarSeries& day, double sigma_prev);

struct EventSeries {
    std::string contract;
    EpsilonConfig config;
    std::vector<Event> events;
};

// Runs detection day by day. Day i uses the volatility of day i-1 both for the
// adaptive threshold and for normalization, so days[0] only seeds sigma.
EventSeries detect_series(const std::string& contract, const std::vector<BarSeries>& days,
                          const EpsilonConfig& config);

enum class EventField { duration, size, ret, norm_ret, speed, norm_speed };

const char* event_field_name(EventField field);
double field_value(const Event& e, EventField field);

// Values of one field over the events of one kind. Normalized fields skip
// un-normalizable events.
std::vector<double> field_values(const std::vector<Event>& events, EventKind kind, EventField field);

struct DescriptiveStats {
    std::size_t count = 0;
    double median = 0.0;
    double q90 = 0.0;
    double max = 0.0;
};

DescriptiveStats descriptive_stats(std::span<const double> values);

struct PooledEvents {
    EpsilonConfig config;
    std::vector<Event> drawdowns;
    std::vector<Event> drawups;

    const std::vector<Event>& of(EventKind kind) const {
        return kind == EventKind::drawdown ? drawdowns : drawups;
    }
    std::vector<double> values(EventKind kind, EventField field) const;
};

// Concatenates normalizable events, keeping contract and start time on each.
// Throws AnalysisError if the series were produced with different configs.
PooledEvents pool_events(std::span<const EventSeries> series);

// Number of the event's constituent returns with the event's sign whose
// magnitude, in units of sigma_prev, is at least threshold.
std::size_t count_tail_returns(const Event& event, const BarSeries& day, double threshold);

// Sum of those normalized magnitudes divided by the event's r_norm; empty when
// no return reaches the threshold.
std::optional<double> contribution_ratio(const Event& event, const BarSeries& day, double threshold);

}  // namespace ddk
