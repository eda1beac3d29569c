#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ddk/market_data.hpp"
#include "ddk/outlier_tests.hpp"
#include "ddk/random.hpp"

namespace ddk {

// Fisher-Yates permutation of one day's returns. Closes are rebuilt from the
// permuted returns, anchored at the day's first close.
BarSeries reshuffle_day(const BarSeries& day, SeededGenerator& gen);

// Reshuffles every day independently; day i draws from stream i of `seed`.
std::vector<BarSeries> reshuffle_series(const std::vector<BarSeries>& days, std::uint64_t seed);

// Builds a bar series whose returns are exactly `returns`.
BarSeries synthetic_day(std::vector<double> returns, double first_close, Date day, int bar_width = 30);

std::vector<double> sample_pareto(std::size_t n, double alpha, double x_m, SeededGenerator& gen);
std::vector<double> sample_exponential(std::size_t n, double rate, SeededGenerator& gen);
std::vector<double> sample_weibull(std::size_t n, double shape, double scale, SeededGenerator& gen);
std::vector<double> sample_lognormal(std::size_t n, double log_mean, double log_sd, SeededGenerator& gen);

// AR(1) returns r_k = phi * r_{k-1} + sd * e_k with r_0 drawn from the stationary law.
std::vector<double> sample_ar1_returns(std::size_t n, double phi, double sd, SeededGenerator& gen);

inline constexpr std::size_t kInjectedIndex = std::numeric_limits<std::size_t>::max();

// Appends factor * y_1 for each factor (> 1) and re-sorts descending.
// Injected values carry source index kInjectedIndex.
ExponentialTail inject_outliers(const ExponentialTail& tail, std::span<const double> factors);

// Lognormal body truncated below `splice`, Pareto(tail_alpha) above it, with
// the mixing weight chosen so the density is continuous at the splice.
// An infinite splice yields the untruncated body.
struct SplicedParams {
    double body_log_mean = 1.8;
    double body_log_sd = 0.5;
    double tail_alpha = 4.0;
    double splice = 10.0;
};

// Probability mass above the splice. Throws AnalysisError when the body has
// no mass below the splice, so continuity cannot be met.
double spliced_tail_weight(const SplicedParams& params);
double lognormal_pdf(double x, double log_mean, double log_sd);
double lognormal_cdf(double x, double log_mean, double log_sd);

struct SplicedSample {
    std::vector<double> values;
    double tail_weight = 0.0;
};

SplicedSample sample_spliced(std::size_t n, const SplicedParams& params, SeededGenerator& gen);

}  // namespace ddk
