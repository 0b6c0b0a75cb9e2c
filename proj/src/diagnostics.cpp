#include "capm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "capm/errors.hpp"

namespace capm::diagnostics {

double durbin_watson(std::span<const double> residuals) {
    if (residuals.size() < 2) {
        throw std::invalid_argument(
            fmt::format("Durbin-Watson needs at least 2 residuals, got {}", residuals.size()));
    }
    double numerator = 0.0;
    double denominator = residuals[0] * residuals[0];
    for (std::size_t t = 1; t < residuals.size(); ++t) {
        const double diff = residuals[t] - residuals[t - 1];
        numerator += diff * diff;
        denominator += residuals[t] * residuals[t];
    }
    if (!(denominator > 0.0)) {
        throw UndefinedStatisticError("Durbin-Watson is undefined for all-zero residuals");
    }
    return std::clamp(numerator / denominator, 0.0, 4.0);
}

double AcfResult::at(std::size_t lag) const {
    if (lag == 0) {
        return 1.0;
    }
    return correlations.at(lag - 1);
}

AcfResult acf(std::span<const double> series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (max_lag < 1 || n <= max_lag) {
        throw std::invalid_argument(
            fmt::format("acf needs n > max_lag >= 1 (n={}, max_lag={})", n, max_lag));
    }
    double mean = 0.0;
    for (const double v : series) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    std::vector<double> centered(n);
    double denominator = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        centered[t] = series[t] - mean;
        denominator += centered[t] * centered[t];
    }
    if (!(denominator > 0.0)) {
        throw UndefinedStatisticError("autocorrelation is undefined for a constant series");
    }

    AcfResult result;
    result.n = n;
    result.band = 1.96 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double numerator = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            numerator += centered[t] * centered[t + k];
        }
        result.lags.push_back(k);
        result.correlations.push_back(std::clamp(numerator / denominator, -1.0, 1.0));
    }
    return result;
}

TrendFit trend_regression(std::span<const std::pair<double, double>> points) {
    std::vector<double> time;
    std::vector<double> level;
    time.reserve(points.size());
    level.reserve(points.size());
    for (const auto& [t, y] : points) {
        time.push_back(t);
        level.push_back(y);
    }
    TrendFit trend;
    trend.fit = estimator::ols_simple(time, level);
    const auto n = static_cast<double>(trend.fit.n);
    trend.adj_r_squared = 1.0 - (1.0 - trend.fit.r_squared) * (n - 1.0) / (n - 2.0);
    return trend;
}

WhiteNoiseCheck white_noise_check(const AcfResult& acf) {
    WhiteNoiseCheck check;
    for (const double rho : acf.correlations) {
        if (std::fabs(rho) > acf.band) {
            ++check.exceed_count;
        }
    }
    // ceil(0.05 K)
    const std::size_t allowed = (acf.correlations.size() + 19) / 20;
    check.is_white = check.exceed_count <= allowed;
    return check;
}

}  // namespace capm::diagnostics
