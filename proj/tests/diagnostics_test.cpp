#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "capm/diagnostics.hpp"
#include "capm/errors.hpp"
#include "capm/rng.hpp"

using namespace capm;
using namespace capm::diagnostics;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> e(n);
    double prev = rng.normal() / std::sqrt(1 - phi * phi);
    for (auto& v : e) {
        prev = phi * prev + rng.normal();
        v = prev;
    }
    return e;
}

}  // namespace

TEST(DurbinWatson, Examples) {
    const std::vector<double> constant{0.3, 0.3, 0.3, 0.3};
    EXPECT_EQ(durbin_watson(constant), 0.0);
    const std::vector<double> alternating{1, -1, 1, -1};
    EXPECT_EQ(durbin_watson(alternating), 3.0);
}

TEST(DurbinWatson, IidNormalNearTwo) {
    Rng rng(1000);
    std::vector<double> e(1000);
    for (auto& v : e) {
        v = rng.normal();
    }
    const double dw = durbin_watson(e);
    EXPECT_GE(dw, 1.8);
    EXPECT_LE(dw, 2.2);
    EXPECT_FALSE(durbin_watson_alarm(dw));
}

TEST(DurbinWatson, Errors) {
    const std::vector<double> zeros{0, 0, 0};
    EXPECT_THROW((void)durbin_watson(zeros), UndefinedStatisticError);
    const std::vector<double> one{1.0};
    EXPECT_THROW((void)durbin_watson(one), std::invalid_argument);
}

TEST(DurbinWatson, BoundedAndTracksLagOneAcf) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> phi(-0.95, 0.95);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 50 + gen() % 400;
        const auto e = ar1(phi(gen), n, gen());
        const double dw = durbin_watson(e);
        EXPECT_GE(dw, 0.0);
        EXPECT_LE(dw, 4.0);
        const double rho1 = acf(e, 1).at(1);
        EXPECT_LE(std::fabs(dw - 2 * (1 - rho1)), 40.0 / static_cast<double>(n));
    }
    EXPECT_TRUE(durbin_watson_alarm(0.99));
    EXPECT_FALSE(durbin_watson_alarm(1.2));
}

TEST(Acf, AlternatingSeries) {
    const std::vector<double> e{1, -1, 1, -1};
    const auto r = acf(e, 1);
    ASSERT_EQ(r.correlations.size(), 1u);
    EXPECT_DOUBLE_EQ(r.correlations[0], -0.75);
    EXPECT_DOUBLE_EQ(r.at(0), 1.0);
    EXPECT_DOUBLE_EQ(r.band, 1.96 / 2.0);
    EXPECT_EQ(r.lags, (std::vector<std::size_t>{1}));
}

TEST(Acf, Ar1LagOne) {
    const auto e = ar1(0.4, 2000, 4);
    EXPECT_NEAR(acf(e, 10).at(1), 0.4, 0.05);
}

TEST(Acf, Errors) {
    const std::vector<double> constant{2, 2, 2, 2, 2};
    EXPECT_THROW((void)acf(constant, 2), UndefinedStatisticError);
    const std::vector<double> e{1, 2, 3};
    EXPECT_THROW((void)acf(e, 3), std::invalid_argument);
    EXPECT_THROW((void)acf(e, 0), std::invalid_argument);
}

TEST(Acf, ReversalAndScaleInvariance) {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 12 + gen() % 200;
        auto e = ar1(0.5, n, gen());
        const auto base = acf(e, 10);
        for (const double v : base.correlations) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
        auto reversed = e;
        std::reverse(reversed.begin(), reversed.end());
        auto scaled = e;
        for (auto& v : scaled) {
            v *= -3.7;
        }
        const auto r = acf(reversed, 10);
        const auto s = acf(scaled, 10);
        for (std::size_t k = 0; k < 10; ++k) {
            EXPECT_NEAR(r.correlations[k], base.correlations[k], 1e-12);
            EXPECT_NEAR(s.correlations[k], base.correlations[k], 1e-12);
        }
    }
}

TEST(WhiteNoise, Rules) {
    AcfResult zero{{}, {}, 0.1, 400};
    for (std::size_t k = 1; k <= 20; ++k) {
        zero.lags.push_back(k);
        zero.correlations.push_back(0.0);
    }
    auto check = white_noise_check(zero);
    EXPECT_EQ(check.exceed_count, 0u);
    EXPECT_TRUE(check.is_white);

    auto one = zero;
    one.correlations[4] = -0.3;
    check = white_noise_check(one);
    EXPECT_EQ(check.exceed_count, 1u);
    EXPECT_TRUE(check.is_white);

    auto two = one;
    two.correlations[9] = 0.2;
    EXPECT_FALSE(white_noise_check(two).is_white);

    const auto persistent = acf(ar1(0.8, 500, 12), 20);
    EXPECT_FALSE(white_noise_check(persistent).is_white);
}

TEST(TrendRegression, PerfectTrend) {
    std::vector<std::pair<double, double>> points;
    for (int t = 1; t <= 20; ++t) {
        points.emplace_back(t, 10.0 + 2.0 * t);
    }
    const auto fit = trend_regression(points);
    EXPECT_NEAR(fit.fit.slope, 2.0, 1e-12);
    EXPECT_NEAR(fit.fit.intercept, 10.0, 1e-12);
    EXPECT_NEAR(fit.adj_r_squared, 1.0, 1e-12);
}

TEST(TrendRegression, UpThenDownSplitAtPeak) {
    Rng rng(6);
    std::vector<std::pair<double, double>> up, down;
    for (int t = 1; t <= 300; ++t) {
        up.emplace_back(t, 800.0 + 3.0 * t + rng.normal(0.0, 20.0));
    }
    for (int t = 1; t <= 300; ++t) {
        down.emplace_back(t, 1700.0 - 2.5 * t + rng.normal(0.0, 20.0));
    }
    EXPECT_GT(trend_regression(up).fit.slope, 0.0);
    EXPECT_LT(trend_regression(down).fit.slope, 0.0);
}

TEST(TrendRegression, AdjustedRSquaredDefinition) {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<double, double>> points;
        const int n = 3 + trial;
        for (int t = 1; t <= n; ++t) {
            points.emplace_back(t, 0.5 * t + rng.normal(0.0, 3.0));
        }
        const auto fit = trend_regression(points);
        const double r2 = fit.fit.r_squared;
        EXPECT_NEAR(fit.adj_r_squared, 1 - (1 - r2) * (n - 1) / (n - 2.0), 1e-12);
    }
}
