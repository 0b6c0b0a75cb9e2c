#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "capm/estimator.hpp"

namespace capm::diagnostics {

/// Durbin-Watson values below this are flagged in reports.
inline constexpr double kDurbinWatsonAlarm = 1.0;

/// sum_{t>=2} (e_t - e_{t-1})^2 / sum_t e_t^2, in [0, 4].
/// Throws std::invalid_argument for n < 2 and capm::UndefinedStatisticError when
/// every residual is zero.
[[nodiscard]] double durbin_watson(std::span<const double> residuals);

[[nodiscard]] inline bool durbin_watson_alarm(double dw) { return dw < kDurbinWatsonAlarm; }

/// Sample autocorrelations at lags 1..K, biased estimator (common mean, divide by n).
struct AcfResult {
    std::vector<std::size_t> lags;
    std::vector<double> correlations;
    double band = 0.0;  ///< 1.96 / sqrt(n)
    std::size_t n = 0;

    /// rho_k; lag 0 is 1 by definition.
    [[nodiscard]] double at(std::size_t lag) const;
};

/// Requires n > max_lag >= 1. Throws capm::UndefinedStatisticError for a
/// constant series.
[[nodiscard]] AcfResult acf(std::span<const double> series, std::size_t max_lag);

struct TrendFit {
    estimator::RegressionResult fit;
    double adj_r_squared = 0.0;
};

/// OLS of level on time index. Points are (time index, level).
[[nodiscard]] TrendFit trend_regression(std::span<const std::pair<double, double>> points);

struct WhiteNoiseCheck {
    std::size_t exceed_count = 0;
    bool is_white = true;
};

/// Counts lags with |rho_k| > band; white iff at most ceil(0.05 K) exceed it.
[[nodiscard]] WhiteNoiseCheck white_noise_check(const AcfResult& acf);

}  // namespace capm::diagnostics
