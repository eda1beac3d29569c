#include "ddk/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ddk/error.hpp"

namespace ddk {

namespace {

// Sum of ln(x_i / x_m) in ascending order of x_i.
double log_excess_sum(std::span<const double> sorted_tail, double x_m) {
    double sum = 0.0;
    for (double x : sorted_tail) sum += std::log(x / x_m);
    return sum;
}

void require_tail(std::span<const double> sorted_tail, double x_m) {
    if (sorted_tail.empty()) throw AnalysisError("distance over an empty tail");
    if (!(x_m > 0.0)) throw AnalysisError("x_m must be positive");
    if (sorted_tail.front() < x_m) throw AnalysisError("tail contains a value below x_m");
}

}  // namespace

double pareto_cdf(double x, double x_m, double alpha) {
    if (x <= x_m) return 0.0;
    return 1.0 - std::pow(x_m / x, alpha);
}

HillEstimate hill_mle(std::span<const double> sample, double x_m) {
    if (!(x_m > 0.0)) throw AnalysisError("x_m must be positive");
    std::vector<double> tail;
    for (double x : sample)
        if (x >= x_m) tail.push_back(x);
    if (tail.empty()) throw AnalysisError("no sample point at or above x_m");
    std::sort(tail.begin(), tail.end());
    const double sum = log_excess_sum(tail, x_m);
    if (!(sum > 0.0)) throw AnalysisError("degenerate tail: every tail point equals x_m");
    const double n = static_cast<double>(tail.size());
    const double alpha = n / sum;
    return {alpha, alpha / std::sqrt(n), tail.size()};
}

double ks_distance(std::span<const double> sorted_tail, double x_m, double alpha) {
    require_tail(sorted_tail, x_m);
    const double n = static_cast<double>(sorted_tail.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_tail.size(); ++i) {
        const double f = pareto_cdf(sorted_tail[i], x_m, alpha);
        const double above = (static_cast<double>(i) + 1.0) / n;
        const double below = static_cast<double>(i) / n;
        d = std::max({d, std::abs(above - f), std::abs(below - f)});
    }
    return d;
}

double ad_distance(std::span<const double> sorted_tail, double x_m, double alpha) {
    require_tail(sorted_tail, x_m);
    const std::size_t n = sorted_tail.size();
    const double nd = static_cast<double>(n);
    const double floor = 1.0 / (2.0 * nd);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f_low = std::max(pareto_cdf(sorted_tail[i], x_m, alpha), floor);
        const double s_high = std::max(1.0 - pareto_cdf(sorted_tail[n - 1 - i], x_m, alpha), floor);
        if (!(f_low > 0.0) || !(s_high > 0.0) || !std::isfinite(f_low) || !std::isfinite(s_high))
            throw AnalysisError("Anderson-Darling term undefined at index " + std::to_string(i));
        sum += (2.0 * static_cast<double>(i) + 1.0) / nd * (std::log(f_low) + std::log(s_high));
    }
    return -nd - sum;
}

const char* distance_name(Distance d) { return d == Distance::ks ? "KS" : "AD"; }

void ScanConfig::validate() const {
    if (n_min < 10) throw InputError("n_min must be at least 10");
    if (policy == CandidatePolicy::quantile_grid && grid_size < 2)
        throw InputError("quantile grid needs at least two points");
}

PowerLawFit fit_at(std::span<const double> sample, double x_m) {
    const auto hill = hill_mle(sample, x_m);
    std::vector<double> tail;
    for (double x : sample)
        if (x >= x_m) tail.push_back(x);
    std::sort(tail.begin(), tail.end());
    PowerLawFit fit;
    fit.x_m = x_m;
    fit.alpha = hill.alpha;
    fit.alpha_se = hill.alpha_se;
    fit.n_tail = hill.n_tail;
    fit.ks = ks_distance(tail, x_m, hill.alpha);
    fit.ad = ad_distance(tail, x_m, hill.alpha);
    fit.candidates_evaluated = 1;
    return fit;
}

PowerLawFit scan_xmin(std::span<const double> sample, const ScanConfig& config, Distance distance) {
    config.validate();
    if (sample.size() < config.n_min)
        throw AnalysisError("sample of " + std::to_string(sample.size()) +
                            " points is smaller than n_min = " + std::to_string(config.n_min));
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) throw AnalysisError("power-law scan needs a positive sample");
    const std::size_t n = sorted.size();
    const std::size_t last_start = n - config.n_min;

    // Start index of each candidate: first occurrence of its value.
    std::vector<std::size_t> starts;
    auto first_of = [&](std::size_t j) {
        return static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), sorted[j]) - sorted.begin());
    };
    if (config.policy == CandidatePolicy::unique_values) {
        for (std::size_t j = 0; j <= last_start; ++j)
            if (j == 0 || sorted[j] != sorted[j - 1]) starts.push_back(j);
    } else {
        const std::size_t g = config.grid_size;
        for (std::size_t q = 0; q < g; ++q) {
            const auto j = first_of(q * last_start / (g - 1));
            if (starts.empty() || starts.back() != j) starts.push_back(j);
        }
    }

    PowerLawFit best;
    bool found = false;
    double best_distance = 0.0;
    std::size_t evaluated = 0;
    for (const auto j : starts) {
        const std::span<const double> tail(sorted.data() + j, n - j);
        const double x_m = sorted[j];
        const double sum = log_excess_sum(tail, x_m);
        if (!(sum > 0.0)) continue;
        const double alpha = static_cast<double>(tail.size()) / sum;
        const double d = distance == Distance::ks ? ks_distance(tail, x_m, alpha)
                                                  : ad_distance(tail, x_m, alpha);
        ++evaluated;
        if (!found || d < best_distance) {
            found = true;
            best_distance = d;
            best.x_m = x_m;
            best.alpha = alpha;
            best.n_tail = tail.size();
        }
    }
    if (!found) throw AnalysisError("no x_m candidate leaves a non-degenerate tail of n_min points");

    const std::span<const double> tail(
        sorted.data() + (std::lower_bound(sorted.begin(), sorted.end(), best.x_m) - sorted.begin()),
        best.n_tail);
    best.alpha_se = best.alpha / std::sqrt(static_cast<double>(best.n_tail));
    best.ks = ks_distance(tail, best.x_m, best.alpha);
    best.ad = ad_distance(tail, best.x_m, best.alpha);
    best.distance_used = distance;
    best.candidates_evaluated = evaluated;
    return best;
}

}  // namespace ddk
