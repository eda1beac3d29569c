#include "ddk/events.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ddk/error.hpp"
#include "ddk/null_model.hpp"
#include "ddk/random.hpp"

using namespace ddk;

namespace {

const Date kDay = *parse_date("2010-05-06");

std::vector<double> log1p_all(std::vector<double> simple_pct) {
    for (auto& r : simple_pct) r = std::log1p(r / 100.0);
    return simple_pct;
}

// The worked example: simple returns in percent.
const std::vector<double> kWorkedExample =
    log1p_all({+0.8, -5, -3, -10, -2, +0.01, -8, -13, -3, -4, -2.01, +1.2});

std::vector<double> gaussian_returns(std::size_t n, double sd, std::uint64_t seed, std::uint64_t stream = 0) {
    SeededGenerator gen(seed, stream);
    std::vector<double> r(n);
    for (auto& x : r) x = sd * gen.normal();
    return r;
}

// Number of maximal runs of equal sign among the nonzero returns.
std::size_t sign_runs(const std::vector<double>& r) {
    std::size_t runs = 0;
    int prev = 0;
    for (double x : r) {
        if (x == 0.0) continue;
        const int s = x > 0 ? 1 : -1;
        if (s != prev) ++runs;
        prev = s;
    }
    return runs;
}

}  // namespace

TEST(DayVolatility, SymmetricPair) {
    const auto day = synthetic_day({0.01, -0.01}, 100, kDay);
    EXPECT_DOUBLE_EQ(day_volatility(day).sigma, 0.01);
}

TEST(DayVolatility, ConstantPrice) {
    const auto day = synthetic_day({0, 0, 0}, 100, kDay);
    EXPECT_EQ(day_volatility(day).sigma, 0.0);
}

TEST(DayVolatility, EmptyIsError) {
    EXPECT_THROW(rms_volatility(std::vector<double>{}), AnalysisError);
}

TEST(DayVolatility, GaussianSamplingBand) {
    const double sd = 0.002;
    const std::size_t n = 10000;
    const double band = 3 * sd / std::sqrt(2.0 * n);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        EXPECT_NEAR(rms_volatility(gaussian_returns(n, sd, seed)), sd, band) << "seed " << seed;
}

TEST(DayVolatility, PermutationInvariantBitForBit) {
    auto r = gaussian_returns(4001, 0.003, 11);
    const double sigma = rms_volatility(r);
    std::reverse(r.begin(), r.end());
    EXPECT_EQ(rms_volatility(r), sigma);
    SeededGenerator gen(3);
    std::shuffle(r.begin(), r.end(), std::mt19937_64(gen.next_u64()));
    EXPECT_EQ(rms_volatility(r), sigma);
}

TEST(DetectEvents, WorkedExampleSingleDrawdownAtHalfPercent) {
    const auto spans = detect_events(kWorkedExample, 0.005);
    std::vector<EventSpan> drawdowns;
    for (const auto& s : spans)
        if (s.kind == EventKind::drawdown) drawdowns.push_back(s);
    ASSERT_EQ(drawdowns.size(), 1u);
    EXPECT_EQ(drawdowns[0].k_start, 1u);
    EXPECT_EQ(drawdowns[0].k_end, 11u);  // the ten middle returns
    // the leading +0.8% closes a drawup before the drawdown starts
    ASSERT_EQ(spans.size(), 2u);
    EXPECT_EQ(spans[0], (EventSpan{EventKind::drawup, 0, 1}));

    // multiplicative drop of the drawdown, about -40%
    double log_drop = 0;
    for (std::size_t k = 1; k < 11; ++k) log_drop += kWorkedExample[k];
    EXPECT_NEAR(std::expm1(log_drop), -0.40, 0.01);
}

TEST(DetectEvents, WorkedExampleClassicalRuns) {
    const auto spans = detect_events(kWorkedExample, 0.0);
    const std::vector<EventSpan> expected{
        {EventKind::drawup, 0, 1},
        {EventKind::drawdown, 1, 5},
        {EventKind::drawup, 5, 6},
        {EventKind::drawdown, 6, 11},
    };
    EXPECT_EQ(spans, expected);
    // the two classical drawdowns in price terms
    double first = 0, second = 0;
    for (std::size_t k = 1; k < 5; ++k) first += kWorkedExample[k];
    for (std::size_t k = 6; k < 11; ++k) second += kWorkedExample[k];
    EXPECT_NEAR(std::expm1(first), -0.1872, 5e-4);
    EXPECT_NEAR(std::expm1(second), -0.2696, 5e-4);
}

TEST(DetectEvents, StrictAlternationDropsUnterminatedTail) {
    const auto spans = detect_events(std::vector<double>{1, -1, 1, -1}, 0.0);
    const std::vector<EventSpan> expected{
        {EventKind::drawup, 0, 1},
        {EventKind::drawdown, 1, 2},
        {EventKind::drawup, 2, 3},
    };
    EXPECT_EQ(spans, expected);
}

TEST(DetectEvents, MonotoneDayNeverTerminates) {
    const std::vector<double> r(50, -0.001);
    for (double eps : {0.0, 0.001, 0.1}) EXPECT_TRUE(detect_events(r, eps).empty());
}

TEST(DetectEvents, LeadingZerosSkipped) {
    const auto spans = detect_events(std::vector<double>{0, 0, -1, 2}, 0.5);
    ASSERT_EQ(spans.size(), 1u);
    EXPECT_EQ(spans[0], (EventSpan{EventKind::drawdown, 2, 3}));
    EXPECT_TRUE(detect_events(std::vector<double>{0, 0, 0}, 0.0).empty());
}

TEST(DetectEvents, NegativeEpsilonRejected) {
    EXPECT_THROW(detect_events(std::vector<double>{1, -1}, -0.1), AnalysisError);
}

TEST(DetectEvents, StructuralPropertiesOnRandomDays) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SeededGenerator gen(seed, 99);
        const std::size_t n = 20 + gen.uniform_index(500);
        const double phi = 0.6 * gen.uniform() - 0.3;
        const auto r = sample_ar1_returns(n, phi, 0.001, gen);
        const auto classical = detect_events(r, 0.0);
        ASSERT_EQ(classical.size() + 1, sign_runs(r)) << "seed " << seed;

        std::set<std::size_t> dd_ends, du_ends;
        for (const auto& s : classical) (s.kind == EventKind::drawdown ? dd_ends : du_ends).insert(s.k_end);

        std::size_t previous_count = classical.size();
        for (double eps : {0.0005, 0.001, 0.002, 0.004, 0.008}) {
            const auto spans = detect_events(r, eps);
            ASSERT_LE(spans.size(), previous_count) << "seed " << seed << " eps " << eps;
            previous_count = spans.size();
            for (std::size_t i = 0; i < spans.size(); ++i) {
                const auto& s = spans[i];
                ASSERT_LT(s.k_start, s.k_end);
                if (i > 0) {
                    ASSERT_NE(s.kind, spans[i - 1].kind);
                    ASSERT_EQ(s.k_start, spans[i - 1].k_end);
                }
                const bool down = s.kind == EventKind::drawdown;
                // polarity
                ASSERT_TRUE(down ? r[s.k_start] < 0 : r[s.k_start] > 0);
                ASSERT_TRUE(down ? r[s.k_end - 1] < 0 : r[s.k_end - 1] > 0);
                // nesting: every boundary is a classical boundary of the same kind
                ASSERT_TRUE((down ? dd_ends : du_ends).contains(s.k_end));
                if (i > 0) {
                    ASSERT_TRUE((down ? du_ends : dd_ends).contains(s.k_start));
                }
                // dominance: no constituent return of the event's sign exceeds the amplitude
                if (i > 0) {
                    double sum = 0;
                    for (std::size_t k = s.k_start; k < s.k_end; ++k) sum += r[k];
                    for (std::size_t k = s.k_start; k < s.k_end; ++k)
                        if ((r[k] < 0) == down) {
                            ASSERT_LE(std::abs(r[k]), std::abs(sum) * (1 + 1e-12));
                        }
                }
            }
        }
    }
}

TEST(Characterize, OneBarDrop) {
    const auto day = synthetic_day({-0.004, 0.01}, 100, kDay, 30);
    const auto e = characterize({EventKind::drawdown, 0, 1}, day, 0.002);
    EXPECT_EQ(e.duration, 30);
    EXPECT_NEAR(e.ret, 0.004, 1e-15);
    EXPECT_NEAR(e.norm_ret, 2, 1e-12);
    EXPECT_NEAR(e.norm_speed, 0.0667, 5e-5);
    EXPECT_NEAR(e.size, 100 * (1 - std::exp(-0.004)), 1e-12);
    EXPECT_TRUE(e.normalizable);
    EXPECT_EQ(e.start_time, day.bar_time(0));
}

TEST(Characterize, FlashCrashScale) {
    // eight 30 s bars totalling 132.62 sigma
    const double sigma = 0.001;
    std::vector<double> r(8, -132.62 * sigma / 8);
    r.push_back(0.05);
    const auto day = synthetic_day(r, 1150, kDay, 30);
    const auto e = characterize({EventKind::drawdown, 0, 8}, day, sigma);
    EXPECT_EQ(e.duration, 240);
    EXPECT_NEAR(e.norm_ret, 132.62, 1e-9);
    EXPECT_NEAR(e.norm_speed, 0.55, 0.005);
}

TEST(Characterize, ZeroSigmaIsUnnormalizable) {
    const auto day = synthetic_day({-0.004, 0.01}, 100, kDay);
    const auto e = characterize({EventKind::drawdown, 0, 1}, day, 0.0);
    EXPECT_FALSE(e.normalizable);
    EXPECT_TRUE(std::isnan(e.norm_ret));
    EXPECT_NEAR(e.ret, 0.004, 1e-15);
}

TEST(Characterize, SpeedIdentitiesOnRandomEvents) {
    std::vector<BarSeries> days;
    const auto d0 = std::chrono::sys_days{kDay};
    for (std::uint64_t i = 0; i < 30; ++i)
        days.push_back(synthetic_day(gaussian_returns(400, 0.0015, 5, i), 1000, Date{d0 + std::chrono::days{i}}));
    const auto series = detect_series("ES", days, EpsilonConfig{});
    ASSERT_GT(series.events.size(), 100u);
    for (const auto& e : series.events) {
        EXPECT_NEAR(e.norm_speed * e.duration, e.norm_ret, 4 * std::numeric_limits<double>::epsilon() * e.norm_ret);
        EXPECT_NEAR(e.speed * e.duration, e.ret, 4 * std::numeric_limits<double>::epsilon() * e.ret);
        EXPECT_EQ(e.contract, "ES");
    }
}

TEST(DetectSeries, FirstDayOnlySeedsSigma) {
    const auto d0 = std::chrono::sys_days{kDay};
    std::vector<BarSeries> days{synthetic_day({0.02, -0.02, 0.02, -0.02}, 100, kDay),
                                synthetic_day({0.01, -0.01, 0.01, -0.01}, 100, Date{d0 + std::chrono::days{1}})};
    EpsilonConfig cfg;
    cfg.epsilon0 = 0.25;
    const auto series = detect_series("X", days, cfg);
    ASSERT_EQ(series.events.size(), 3u);
    for (const auto& e : series.events) {
        EXPECT_EQ(e.day, days[1].day);
        EXPECT_DOUBLE_EQ(e.sigma_prev, 0.02);
        EXPECT_NEAR(e.norm_ret, 0.5, 1e-12);
    }
}

TEST(DescriptiveStats, Singleton) {
    const std::vector<double> v{120};
    const auto s = descriptive_stats(v);
    EXPECT_EQ(s.count, 1u);
    EXPECT_EQ(s.median, 120);
    EXPECT_EQ(s.q90, 120);
    EXPECT_EQ(s.max, 120);
}

TEST(DescriptiveStats, LowerOrderStatisticConvention) {
    std::vector<double> v;
    for (int k = 10; k >= 1; --k) v.push_back(30.0 * k);
    const auto s = descriptive_stats(v);
    // ceil(0.5 * 10) = 5th and ceil(0.9 * 10) = 9th smallest
    EXPECT_EQ(s.median, 150);
    EXPECT_EQ(s.q90, 270);
    EXPECT_EQ(s.max, 300);
    EXPECT_THROW(descriptive_stats(std::vector<double>{}), AnalysisError);
}

namespace {

EventSeries series_of(const std::string& name, std::uint64_t stream, std::size_t n_days) {
    std::vector<BarSeries> days;
    const auto d0 = std::chrono::sys_days{kDay};
    for (std::uint64_t i = 0; i < n_days; ++i) {
        auto d = synthetic_day(gaussian_returns(300, 0.001, stream, i), 500, Date{d0 + std::chrono::days{i}});
        d.source = name;
        days.push_back(d);
    }
    return detect_series(name, days, EpsilonConfig{});
}

}  // namespace

TEST(PoolEvents, IdentityAndCounting) {
    const auto a = series_of("ES", 1, 5);
    const auto b = series_of("FDAX", 2, 7);
    const std::vector<EventSeries> one{a};
    const auto pa = pool_events(one);
    EXPECT_EQ(pa.drawdowns.size() + pa.drawups.size(), a.events.size());

    const std::vector<EventSeries> both{a, b};
    const auto pab = pool_events(both);
    EXPECT_EQ(pab.drawdowns.size() + pab.drawups.size(), a.events.size() + b.events.size());

    for (auto kind : {EventKind::drawdown, EventKind::drawup}) {
        const auto pooled = pab.values(kind, EventField::norm_ret);
        const auto va = field_values(a.events, kind, EventField::norm_ret);
        const auto vb = field_values(b.events, kind, EventField::norm_ret);
        EXPECT_EQ(*std::max_element(pooled.begin(), pooled.end()),
                  std::max(*std::max_element(va.begin(), va.end()), *std::max_element(vb.begin(), vb.end())));
    }
    // provenance survives pooling
    EXPECT_TRUE(std::any_of(pab.drawdowns.begin(), pab.drawdowns.end(),
                            [](const Event& e) { return e.contract == "FDAX"; }));
}

TEST(PoolEvents, MixedConfigsRejected) {
    auto a = series_of("ES", 1, 3);
    auto b = series_of("FDAX", 2, 3);
    b.config.epsilon0 = 2.0;
    const std::vector<EventSeries> both{a, b};
    EXPECT_THROW(pool_events(both), AnalysisError);
}

TEST(PoolEvents, UnnormalizableEventsExcluded) {
    EventSeries s;
    s.contract = "X";
    Event good, bad;
    bad.normalizable = false;
    s.events = {good, bad};
    const std::vector<EventSeries> one{s};
    EXPECT_EQ(pool_events(one).drawdowns.size(), 1u);
}

namespace {

Event event_over(std::size_t k_end, double sigma, const BarSeries& day) {
    return characterize({EventKind::drawdown, 0, k_end}, day, sigma);
}

}  // namespace

TEST(TailComposition, AllSmallReturns) {
    const std::vector<double> r{-1, -0.5, -1.5, 3};
    const auto day = synthetic_day(r, 100, kDay);
    const auto e = event_over(3, 1.0, day);
    EXPECT_EQ(count_tail_returns(e, day, 2.0), 0u);
    EXPECT_FALSE(contribution_ratio(e, day, 2.0).has_value());
}

TEST(TailComposition, ThreeInjectedLargeReturns) {
    const std::vector<double> r{-3, -1, -3, -0.5, 2.5, -3, -1, 6};
    const auto day = synthetic_day(r, 100, kDay);
    const auto spans = detect_events(r, 3.0);
    ASSERT_EQ(spans.size(), 1u);
    const auto e = characterize(spans[0], day, 1.0);
    // the +2.5 counter-move is large but has the wrong sign
    EXPECT_EQ(count_tail_returns(e, day, 2.0), 3u);
}

TEST(TailComposition, SingleReturnEventGivesOne) {
    const std::vector<double> r{-3, 5};
    const auto day = synthetic_day(r, 100, kDay);
    const auto e = event_over(1, 1.0, day);
    EXPECT_EQ(count_tail_returns(e, day, 2.0), 1u);
    EXPECT_NEAR(*contribution_ratio(e, day, 2.0), 1.0, 1e-12);
}

TEST(TailComposition, SixTenthsContribution) {
    const std::vector<double> r{-3, -1, -1, 5};
    const auto day = synthetic_day(r, 100, kDay);
    const auto e = event_over(3, 1.0, day);
    EXPECT_NEAR(e.norm_ret, 5.0, 1e-12);
    EXPECT_NEAR(*contribution_ratio(e, day, 2.0), 0.6, 1e-12);
}

TEST(TailComposition, CounterMovesPushContributionAboveOne) {
    const std::vector<double> r{-3, 0.9, -3, 2};
    const auto spans = detect_events(r, 1.0);
    ASSERT_EQ(spans.size(), 1u);
    const auto day = synthetic_day(r, 100, kDay);
    const auto e = characterize(spans[0], day, 1.0);
    EXPECT_EQ(e.k_end, 3u);
    EXPECT_GT(*contribution_ratio(e, day, 2.0), 1.0);
    EXPECT_NEAR(*contribution_ratio(e, day, 2.0), 6.0 / 5.1, 1e-12);
}
