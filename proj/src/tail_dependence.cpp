#include "ddk/tail_dependence.hpp"

#include <cmath>

#include "ddk/error.hpp"
#include "ddk/quantile.hpp"

namespace ddk {

LambdaPoint lambda_u(std::span<const double> x, std::span<const double> y, double u) {
    if (x.size() != y.size()) throw AnalysisError("tail dependence needs paired samples of equal length");
    if (!(u > 0.0 && u < 1.0)) throw AnalysisError("probability level u must lie in (0, 1)");
    const double n = static_cast<double>(x.size());
    // n >= 1/(1-u), with slack for the rounding of 1 - u
    if (x.empty() || n * (1.0 - u) < 1.0 - 1e-9)
        throw AnalysisError("sample of " + std::to_string(x.size()) +
                            " pairs is too small for u = " + std::to_string(u));

    const double qx = order_statistic_quantile(x, u);
    const double qy = order_statistic_quantile(y, u);
    LambdaPoint point;
    point.u = u;
    std::size_t joint = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] > qy) {
            ++point.n_cond;
            if (x[i] > qx) ++joint;
        }
    }
    if (point.n_cond > 0)
        point.lambda = static_cast<double>(joint) / static_cast<double>(point.n_cond);
    return point;
}

LambdaCurve lambda_curve(std::span<const double> x, std::span<const double> y,
                         std::span<const double> u_grid) {
    LambdaCurve curve;
    for (double u : u_grid) curve.points.push_back(lambda_u(x, y, u));
    return curve;
}

}  // namespace ddk
