#include "ddk/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ddk/error.hpp"

namespace ddk {

std::size_t quantile_rank(double p, std::size_t n) {
    const double pn = p * static_cast<double>(n);
    double rank = std::ceil(pn);
    if (rank >= 1.0 && pn - (rank - 1.0) < 1e-9 * std::max(1.0, pn)) rank -= 1.0;
    return std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, n);
}

double order_statistic_quantile(std::span<const double> values, double p) {
    if (values.empty()) throw AnalysisError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw AnalysisError("quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    const auto rank = quantile_rank(p, sorted.size());
    const auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(sorted.begin(), nth, sorted.end());
    return *nth;
}

}  // namespace ddk
