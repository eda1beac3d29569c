#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ddk {

struct LambdaPoint {
    double u = 0.0;
    std::optional<double> lambda;  // empty when nothing exceeds the conditioning quantile
    std::size_t n_cond = 0;
};

// Empirical Pr[X > q_x(u) | Y > q_y(u)] with q the lower order-statistic
// quantile x_(ceil(u n)). Strict exceedances on both sides.
LambdaPoint lambda_u(std::span<const double> x, std::span<const double> y, double u);

struct LambdaCurve {
    std::vector<LambdaPoint> points;
};

inline const std::vector<double> kDefaultLambdaGrid{0.90, 0.95, 0.99, 0.995, 0.999};

LambdaCurve lambda_curve(std::span<const double> x, std::span<const double> y,
                         std::span<const double> u_grid = kDefaultLambdaGrid);

}  // namespace ddk
