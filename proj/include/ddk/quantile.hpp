#pragma once

#include <cstddef>
#include <span>

namespace ddk {

// 1-based rank used for the empirical p-quantile: ceil(p*n), clamped to [1, n].
// Products that land within rounding noise of an integer are taken as that
// integer, so 0.99 * 100000 maps to rank 99000.
std::size_t quantile_rank(double p, std::size_t n);

// Lower order statistic x_(ceil(p*n)); no interpolation. Input need not be
// sorted. Throws AnalysisError on an empty sample or p outside [0, 1].
double order_statistic_quantile(std::span<const double> values, double p);

}  // namespace ddk
