#include "ddk/null_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddk/error.hpp"
#include "ddk/special_functions.hpp"

namespace ddk {

BarSeries reshuffle_day(const BarSeries& day, SeededGenerator& gen) {
    if (day.closes.empty()) throw AnalysisError("cannot reshuffle an empty day");
    BarSeries out = day;
    auto& r = out.returns;
    for (std::size_t i = r.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(gen.uniform_index(i));
        std::swap(r[i - 1], r[j]);
    }
    const double log_first = std::log(day.closes.front());
    double log_price = log_first;
    for (std::size_t i = 0; i < r.size(); ++i) {
        log_price += r[i];
        out.closes[i + 1] = std::exp(log_price);
    }
    return out;
}

std::vector<BarSeries> reshuffle_series(const std::vector<BarSeries>& days, std::uint64_t seed) {
    std::vector<BarSeries> out;
    out.reserve(days.size());
    for (std::size_t i = 0; i < days.size(); ++i) {
        SeededGenerator gen(seed, i);
        out.push_back(reshuffle_day(days[i], gen));
    }
    return out;
}

BarSeries synthetic_day(std::vector<double> returns, double first_close, Date day, int bar_width) {
    BarSeries bars;
    bars.day = day;
    bars.bar_width = bar_width;
    bars.first_bar = 1;
    bars.n_bars = static_cast<int>(returns.size()) + 1;
    bars.session_start = day_start(day);
    bars.closes.reserve(returns.size() + 1);
    bars.closes.push_back(first_close);
    double log_price = std::log(first_close);
    for (double r : returns) {
        log_price += r;
        bars.closes.push_back(std::exp(log_price));
    }
    bars.returns = std::move(returns);
    return bars;
}

std::vector<double> sample_pareto(std::size_t n, double alpha, double x_m, SeededGenerator& gen) {
    if (!(alpha > 0.0) || !(x_m > 0.0)) throw AnalysisError("Pareto needs alpha > 0 and x_m > 0");
    std::vector<double> out(n);
    for (auto& x : out) x = x_m * std::pow(gen.uniform_open(), -1.0 / alpha);
    return out;
}

std::vector<double> sample_exponential(std::size_t n, double rate, SeededGenerator& gen) {
    if (!(rate > 0.0)) throw AnalysisError("exponential rate must be positive");
    std::vector<double> out(n);
    for (auto& x : out) x = gen.exponential() / rate;
    return out;
}

std::vector<double> sample_weibull(std::size_t n, double shape, double scale, SeededGenerator& gen) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw AnalysisError("Weibull needs positive shape and scale");
    std::vector<double> out(n);
    for (auto& x : out) x = scale * std::pow(gen.exponential(), 1.0 / shape);
    return out;
}

std::vector<double> sample_lognormal(std::size_t n, double log_mean, double log_sd, SeededGenerator& gen) {
    std::vector<double> out(n);
    for (auto& x : out) x = std::exp(log_mean + log_sd * gen.normal());
    return out;
}

std::vector<double> sample_ar1_returns(std::size_t n, double phi, double sd, SeededGenerator& gen) {
    if (!(std::abs(phi) < 1.0)) throw AnalysisError("AR(1) coefficient must satisfy |phi| < 1");
    std::vector<double> out(n);
    if (n == 0) return out;
    double prev = sd / std::sqrt(1.0 - phi * phi) * gen.normal();
    for (auto& r : out) {
        r = prev;
        prev = phi * prev + sd * gen.normal();
    }
    return out;
}

ExponentialTail inject_outliers(const ExponentialTail& tail, std::span<const double> factors) {
    if (tail.y.empty()) throw AnalysisError("cannot inject outliers into an empty tail");
    ExponentialTail out = tail;
    const double top = tail.y.front();
    for (double f : factors) {
        if (!(f > 1.0)) throw AnalysisError("outlier factors must exceed 1");
        out.y.push_back(f * top);
        out.source_index.push_back(kInjectedIndex);
    }
    std::vector<std::size_t> order(out.y.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.y[a] > out.y[b]; });
    ExponentialTail sorted;
    sorted.x_m = out.x_m;
    for (auto i : order) {
        sorted.y.push_back(out.y[i]);
        sorted.source_index.push_back(out.source_index[i]);
    }
    return sorted;
}

double lognormal_pdf(double x, double log_mean, double log_sd) {
    if (!(x > 0.0)) return 0.0;
    const double z = (std::log(x) - log_mean) / log_sd;
    return std::exp(-0.5 * z * z) / (x * log_sd * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(double x, double log_mean, double log_sd) {
    if (!(x > 0.0)) return 0.0;
    return normal_cdf((std::log(x) - log_mean) / log_sd);
}

double spliced_tail_weight(const SplicedParams& p) {
    if (!(p.splice > 0.0)) throw AnalysisError("splice point must be positive");
    if (!(p.body_log_sd > 0.0) || !(p.tail_alpha > 0.0))
        throw AnalysisError("spliced sample needs positive body sd and tail alpha");
    if (std::isinf(p.splice)) return 0.0;
    const double body_cdf = lognormal_cdf(p.splice, p.body_log_mean, p.body_log_sd);
    const double body_pdf = lognormal_pdf(p.splice, p.body_log_mean, p.body_log_sd);
    if (!(body_cdf > 1e-6) || !(body_pdf > 0.0))
        throw AnalysisError("infeasible splice: body has no mass below the splice point");
    // (1 - w) * body_pdf / body_cdf = w * alpha / splice
    const double body_side = body_pdf / body_cdf;
    return body_side / (body_side + p.tail_alpha / p.splice);
}

SplicedSample sample_spliced(std::size_t n, const SplicedParams& p, SeededGenerator& gen) {
    SplicedSample out;
    out.tail_weight = spliced_tail_weight(p);
    out.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (out.tail_weight > 0.0 && gen.uniform() < out.tail_weight) {
            out.values.push_back(p.splice * std::pow(gen.uniform_open(), -1.0 / p.tail_alpha));
            continue;
        }
        double x;
        do {
            x = std::exp(p.body_log_mean + p.body_log_sd * gen.normal());
        } while (x >= p.splice);
        out.values.push_back(x);
    }
    return out;
}

}  // namespace ddk
