#include "ddk/tail_dependence.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ddk/error.hpp"
#include "ddk/random.hpp"

using namespace ddk;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    SeededGenerator gen(seed, stream);
    std::vector<double> v(n);
    for (auto& x : v) x = gen.uniform();
    return v;
}

}  // namespace

TEST(LambdaU, ComonotoneIsOne) {
    const auto x = uniforms(5000, 1, 0);
    const auto curve = lambda_curve(x, x);
    ASSERT_EQ(curve.points.size(), kDefaultLambdaGrid.size());
    for (const auto& p : curve.points) {
        ASSERT_TRUE(p.lambda.has_value());
        EXPECT_EQ(*p.lambda, 1.0);
        EXPECT_GE(p.n_cond, 1u);
    }
}

TEST(LambdaU, CountermonotoneIsZero) {
    const auto x = uniforms(5000, 2, 0);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -x[i];
    for (double u : {0.6, 0.9, 0.99}) EXPECT_EQ(*lambda_u(x, y, u).lambda, 0.0);
}

TEST(LambdaU, IndependentUniformsNearOneMinusU) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto x = uniforms(100000, seed, 0);
        const auto y = uniforms(100000, seed, 1);
        const auto p = lambda_u(x, y, 0.99);
        EXPECT_EQ(p.n_cond, 1000u);
        EXPECT_LE(std::abs(*p.lambda - 0.01), 3 * std::sqrt(0.01 * 0.99 / p.n_cond));
    }
}

TEST(LambdaU, RankInvariantUnderMonotoneTransforms) {
    const auto x = uniforms(20000, 3, 0);
    auto y = uniforms(20000, 3, 1);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * y[i] + 0.5 * x[i];
    std::vector<double> fx(x.size()), gy(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        fx[i] = std::exp(3 * x[i]);
        gy[i] = std::pow(y[i], 5) - 2;
    }
    const auto a = lambda_curve(x, y);
    const auto b = lambda_curve(fx, gy);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].lambda, b.points[i].lambda);
        EXPECT_EQ(a.points[i].n_cond, b.points[i].n_cond);
    }
}

TEST(LambdaU, BoundedAndConditioningShrinks) {
    const auto x = uniforms(3000, 4, 0);
    const auto y = uniforms(3000, 4, 1);
    const std::vector<double> grid{0.5, 0.7, 0.9, 0.95, 0.99, 0.999};
    const auto c = lambda_curve(x, y, grid);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        ASSERT_TRUE(c.points[i].lambda);
        EXPECT_GE(*c.points[i].lambda, 0.0);
        EXPECT_LE(*c.points[i].lambda, 1.0);
        if (i > 0) {
            EXPECT_LE(c.points[i].n_cond, c.points[i - 1].n_cond);
        }
    }
}

TEST(LambdaU, TiedConditioningSampleHasNoValue) {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> y(10, 4.0);
    const auto p = lambda_u(x, y, 0.9);
    EXPECT_EQ(p.n_cond, 0u);
    EXPECT_FALSE(p.lambda.has_value());
}

TEST(LambdaU, Preconditions) {
    const std::vector<double> x(100, 1.0), y(99, 1.0);
    EXPECT_THROW(lambda_u(x, y, 0.9), AnalysisError);
    EXPECT_THROW(lambda_u(x, x, 1.0), AnalysisError);
    EXPECT_THROW(lambda_u(x, x, 0.0), AnalysisError);
    EXPECT_THROW(lambda_u(x, x, 0.999), AnalysisError);
    EXPECT_NO_THROW(lambda_u(x, x, 0.99));
}
