#include "ddk/outlier_tests.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddk/error.hpp"
#include "ddk/null_model.hpp"
#include "ddk/powerlaw.hpp"
#include "ddk/random.hpp"
#include "ddk/special_functions.hpp"

using namespace ddk;

namespace {

ExponentialTail pareto_tail(std::size_t n, std::uint64_t seed, double alpha = 3.0) {
    SeededGenerator gen(seed, 7);
    return to_exponential(sample_pareto(n, alpha, 1.0, gen), 1.0);
}

ExponentialTail tail_of(std::vector<double> y_desc) {
    ExponentialTail t;
    t.x_m = 1.0;
    t.y = std::move(y_desc);
    t.source_index.resize(t.y.size());
    std::iota(t.source_index.begin(), t.source_index.end(), std::size_t{0});
    return t;
}

}  // namespace

TEST(ToExponential, TrivialMappings) {
    const double x_m = 2.5;
    EXPECT_EQ(to_exponential(std::vector<double>{x_m}, x_m).y, std::vector<double>{0.0});
    const auto t = to_exponential(std::vector<double>{std::exp(1.0) * x_m, std::exp(2.0) * x_m}, x_m);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(t.y[0], 2.0, 1e-15);
    EXPECT_NEAR(t.y[1], 1.0, 1e-15);
    EXPECT_EQ(t.source_index, (std::vector<std::size_t>{1, 0}));
}

TEST(ToExponential, ValueBelowBoundNamed) {
    try {
        to_exponential(std::vector<double>{3, 1.5, 4}, 2.0);
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos);
    }
}

TEST(ToExponential, ParetoMapsToExponential) {
    int passes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double alpha = 2.2;
        auto y = pareto_tail(500, seed, alpha).y;
        std::sort(y.begin(), y.end());
        const double d = ks_statistic(y, [&](double v) { return 1 - std::exp(-alpha * v); });
        if (ks_pvalue(d, y.size()) > 0.05) ++passes;
    }
    EXPECT_GE(passes, 90);
}

TEST(Spacings, DirectArithmetic) {
    EXPECT_EQ(spacings(std::vector<double>{3, 2, 1}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(spacings(std::vector<double>{0.7, 0.7, 0.7}), (std::vector<double>{0, 0, 3 * 0.7}));
    EXPECT_THROW(spacings(std::vector<double>{1}), AnalysisError);
}

TEST(Spacings, TelescopeToTotal) {
    const auto t = pareto_tail(1000, 3);
    const auto z = spacings(t.y);
    const double sz = std::accumulate(z.begin(), z.end(), 0.0);
    const double sy = std::accumulate(t.y.begin(), t.y.end(), 0.0);
    EXPECT_NEAR(sz, sy, 1e-12 * sy);
}

TEST(DkStatistic, RatioOfMeans) {
    EXPECT_DOUBLE_EQ(dk_statistic(std::vector<double>(6, 0.3), 1), 1.0);
    EXPECT_DOUBLE_EQ(dk_statistic(std::vector<double>{4, 1, 1, 1, 1}, 1), 4.0);
    EXPECT_THROW(dk_statistic(std::vector<double>{4, 0, 0}, 1), AnalysisError);
    EXPECT_THROW(dk_statistic(std::vector<double>{1, 1}, 2), AnalysisError);
}

TEST(DkPvalue, SymmetryAndLimits) {
    for (std::size_t n : {2u, 10u, 200u}) EXPECT_NEAR(dk_pvalue(1.0, n / 2, n), 0.5, 1e-12);
    EXPECT_EQ(dk_pvalue(0.0, 3, 50), 1.0);
    EXPECT_LT(dk_pvalue(1e9, 3, 50), 1e-30);
    double prev = 1.0;
    for (double t = 0.05; t < 20; t *= 1.3) {
        const double p = dk_pvalue(t, 4, 120);
        EXPECT_LE(p, prev);
        prev = p;
    }
}

TEST(DkPvalue, UniformUnderExponentialNull) {
    std::vector<double> p;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) p.push_back(dk_rank_pvalue(pareto_tail(200, seed).y, 1));
    std::sort(p.begin(), p.end());
    const double d = ks_statistic(p, [](double v) { return v; });
    EXPECT_GT(ks_pvalue(d, p.size()), 0.05);
}

TEST(OriginalDk, RejectionRateNearP0UnderNull) {
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto res = original_dk_test(pareto_tail(200, seed), 0.1, 30);
        if (res.p_values[0] < 0.1) ++rejected;
    }
    EXPECT_NEAR(rejected / 1000.0, 0.1, 3 * std::sqrt(0.09 / 1000));
}

TEST(OriginalDk, SingleOutlierFlagsManyRanks) {
    int many = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::vector<double> factors{2.0};
        const auto tail = inject_outliers(pareto_tail(100, seed), factors);
        const auto res = original_dk_test(tail, 0.1, 30);
        ASSERT_EQ(res.p_values.size(), 30u);
        if (res.flagged_ranks.size() >= 10) ++many;
    }
    EXPECT_GE(many, 100);
}

TEST(OriginalDk, TooShortTail) {
    EXPECT_THROW(original_dk_test(pareto_tail(31, 0), 0.1, 30), AnalysisError);
    EXPECT_NO_THROW(original_dk_test(pareto_tail(32, 0), 0.1, 30));
}

TEST(ModifiedDk, ReportedRankSatisfiesSystem) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::vector<double> factors{2.0, 2.2};
        const auto tail = inject_outliers(pareto_tail(100, seed), factors);
        const auto res = modified_dk_test(tail, 0.1, 30);
        ASSERT_EQ(res.p_table.front().size(), 1u);
        if (res.r == 0) continue;
        ASSERT_EQ(res.p_values.size(), res.r + 1);
        for (std::size_t k = 0; k < res.r; ++k) ASSERT_LT(res.p_values[k], 0.1);
        ASSERT_GE(res.p_values[res.r], 0.1);
        // no smaller rank satisfies the system
        for (std::size_t r = 1; r < res.r; ++r) {
            const auto& row = res.p_table[r];
            const bool ok = std::all_of(row.begin(), row.end() - 1, [](double p) { return p < 0.1; }) &&
                            row.back() >= 0.1;
            ASSERT_FALSE(ok);
        }
    }
}

TEST(ModifiedDk, CalibratedUnderNull) {
    int r_zero = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        if (modified_dk_test(pareto_tail(200, seed), 0.1, 30).r == 0) ++r_zero;
    EXPECT_GE(r_zero, 850);
    EXPECT_LE(r_zero, 950);
}

TEST(ModifiedDk, DetectsSingleAndPairedOutliers) {
    int single = 0, pair = 0, original_misses_largest = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto base = pareto_tail(100, seed);
        const std::vector<double> one{2.0}, two{2.0, 2.2};
        if (modified_dk_test(inject_outliers(base, one)).r == 1) ++single;
        const auto paired = inject_outliers(base, two);
        if (modified_dk_test(paired).r == 2) ++pair;
        if (original_dk_test(paired).p_values[0] >= 0.1) ++original_misses_largest;
    }
    EXPECT_GE(single, 160);
    EXPECT_GE(pair, 160);
    // masking: the top rank alone often looks unremarkable next to its twin
    EXPECT_GE(original_misses_largest, 20);
}

TEST(ModifiedDk, InconclusiveWhenNoRankFits) {
    // a geometric ladder of large values keeps rejecting the trimmed tail
    std::vector<double> y;
    for (int i = 0; i < 45; ++i) y.push_back(100.0 * std::pow(0.7, i));
    for (int i = 0; i < 55; ++i) y.push_back(1e-6 * (55 - i));
    const auto res = modified_dk_test(tail_of(y), 0.1, 30);
    EXPECT_EQ(res.r, 0u);
    EXPECT_TRUE(res.inconclusive);
    EXPECT_EQ(res.p_table.size(), 31u);
}

TEST(ModifiedDk, FullPipelineScaleInvariance) {
    SeededGenerator gen(12, 3);
    auto x = sample_pareto(150, 2.0, 1.5, gen);
    x.push_back(x[0] * 40);
    const auto base = modified_dk_test(to_exponential(x, 1.5));
    for (double c : {4.0, 0.125}) {
        auto scaled = x;
        for (auto& v : scaled) v *= c;
        const auto res = modified_dk_test(to_exponential(scaled, 1.5 * c));
        EXPECT_EQ(res.r, base.r);
        EXPECT_EQ(res.p_table, base.p_table);
    }
    auto scaled = x;
    for (auto& v : scaled) v *= 3.7;
    const auto res = modified_dk_test(to_exponential(scaled, 1.5 * 3.7));
    EXPECT_EQ(res.r, base.r);
    for (std::size_t i = 0; i < res.p_table.size(); ++i)
        for (std::size_t j = 0; j < res.p_table[i].size(); ++j)
            EXPECT_NEAR(res.p_table[i][j], base.p_table[i][j], 1e-9);
}

TEST(UTest, NoCensoringOnUnitTail) {
    const auto res = u_test(tail_of(std::vector<double>(10, 1.0)), 0);
    EXPECT_EQ(res.alpha_censored, 1.0);
    EXPECT_TRUE(res.p_values.empty());
}

TEST(UTest, RankZeroEqualsHill) {
    SeededGenerator gen(8);
    const auto x = sample_pareto(777, 3.3, 2.0, gen);
    const auto tail = to_exponential(x, 2.0);
    double sum = 0;
    for (auto it = tail.y.rbegin(); it != tail.y.rend(); ++it) sum += *it;
    const auto res = u_test(tail, 0);
    EXPECT_EQ(res.alpha_censored, static_cast<double>(tail.size()) / sum);
    EXPECT_EQ(res.alpha_censored, hill_mle(x, 2.0).alpha);
}

TEST(UTest, CensoredEstimatorByHand) {
    const auto tail = tail_of({9, 5, 3, 2, 1});
    const auto res = u_test(tail, 2);
    // (N - r) / (r * y_3 + y_3 + y_4 + y_5) = 3 / (6 + 6)
    EXPECT_DOUBLE_EQ(res.alpha_censored, 0.25);
    ASSERT_EQ(res.p_values.size(), 2u);
    for (std::size_t k = 1; k <= 2; ++k) {
        const double f = 1 - std::exp(-0.25 * tail.y[k - 1]);
        EXPECT_NEAR(res.p_values[k - 1], 1 - regularized_incomplete_beta(5 - k + 1.0, k, f), 1e-14);
    }
}

TEST(UTest, Preconditions) {
    EXPECT_THROW(u_test(tail_of({3, 2, 1}), 2), AnalysisError);
    EXPECT_THROW(u_test(tail_of({0, 0, 0}), 0), AnalysisError);
}

TEST(UTest, OutlierFlaggedAgainstFittedTail) {
    auto base = pareto_tail(200, 4);
    const std::vector<double> factors{3.0};
    const auto tail = inject_outliers(base, factors);
    const auto res = u_test(tail, 1);
    EXPECT_LT(res.p_values[0], 0.1);
    EXPECT_EQ(res.outlier_ranks, std::vector<std::size_t>{1});
    const auto autor = u_test_auto(tail, 0.1, 10);
    EXPECT_TRUE(autor.auto_rank);
    EXPECT_GE(autor.r, 1u);
    EXPECT_EQ(autor.outlier_ranks.empty() ? 0 : autor.outlier_ranks.back(), autor.r);
}

TEST(UTest, TopPvalueUniformUnderNullForLargeTails) {
    std::vector<double> p;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) p.push_back(u_test(pareto_tail(1000, seed), 1).p_values[0]);
    std::sort(p.begin(), p.end());
    const double d = ks_statistic(p, [](double v) { return v; });
    EXPECT_GT(ks_pvalue(d, p.size()), 0.05);
}
