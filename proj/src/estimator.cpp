#include "capm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "capm/errors.hpp"
#include "capm/special_functions.hpp"

namespace capm::estimator {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio_or_nan(double estimate, double se) { return se > 0.0 ? estimate / se : kNaN; }

}  // namespace

RegressionResult ols_simple(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InsufficientDataError(
            fmt::format("regression needs equal-length series, got {} and {}", x.size(), y.size()));
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw InsufficientDataError(fmt::format("regression needs n >= 3, got {}", n));
    }
    const double nd = static_cast<double>(n);

    double x_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x_mean += x[i];
        y_mean += y[i];
    }
    x_mean /= nd;
    y_mean /= nd;

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x_mean;
        const double dy = y[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
        throw DegenerateRegressorError("regressor is constant; slope is undefined");
    }

    RegressionResult r;
    r.n = n;
    r.slope = sxy / sxx;
    r.intercept = y_mean - r.slope * x_mean;

    r.residuals.resize(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.residuals[i] = y[i] - r.intercept - r.slope * x[i];
        sse += r.residuals[i] * r.residuals[i];
    }

    const double df = nd - 2.0;
    const double sigma2 = sse / df;
    r.se_slope = std::sqrt(sigma2 / sxx);
    r.se_intercept = std::sqrt(sigma2 * (1.0 / nd + x_mean * x_mean / sxx));
    r.t_slope = ratio_or_nan(r.slope, r.se_slope);
    r.t_intercept = ratio_or_nan(r.intercept, r.se_intercept);
    // n = 3 leaves one degree of freedom, the smallest the t distribution accepts.
    r.p_slope_two_sided = std::isnan(r.t_slope) ? kNaN : special::student_t_two_sided(r.t_slope, df);
    r.p_intercept_two_sided =
        std::isnan(r.t_intercept) ? kNaN : special::student_t_two_sided(r.t_intercept, df);

    // A constant y leaves nothing to explain; report 0 rather than 0/0.
    r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
    return r;
}

RegressionResult estimate_stock_capm(const returns::ExcessReturnSeries& stock,
                                     const returns::ExcessReturnSeries& market) {
    const auto joined = returns::align(market.periods, market.values, stock.periods, stock.values);
    if (joined.periods.empty()) {
        throw EmptyOverlapError(
            fmt::format("{} shares no month with {}", stock.name, market.name));
    }
    return ols_simple(joined.first, joined.second);
}

RegressionResult estimate_portfolio_capm(const returns::ExcessReturnSeries& portfolio,
                                         const returns::ExcessReturnSeries& market) {
    return estimate_stock_capm(portfolio, market);
}

std::string_view hypothesis_name(Hypothesis which) {
    switch (which) {
        case Hypothesis::ZeroBetaNonzero:
            return "zero_beta_nonzero";
        case Hypothesis::PositivePriceOfRisk:
            return "positive_price_of_risk";
    }
    return "unknown";
}

double alpha_of(SignificanceLevel level) {
    switch (level) {
        case SignificanceLevel::OnePercent:
            return 0.01;
        case SignificanceLevel::FivePercent:
            return 0.05;
        case SignificanceLevel::TenPercent:
            return 0.10;
    }
    return 0.0;
}

std::string_view label_of(SignificanceLevel level) {
    switch (level) {
        case SignificanceLevel::OnePercent:
            return "1%";
        case SignificanceLevel::FivePercent:
            return "5%";
        case SignificanceLevel::TenPercent:
            return "10%";
    }
    return "?";
}

bool HypothesisOutcome::rejected(SignificanceLevel level) const {
    return std::find(rejected_at.begin(), rejected_at.end(), level) != rejected_at.end();
}

HypothesisOutcome hypothesis_test(double t_value, std::size_t df, Hypothesis which,
                                  std::span<const SignificanceLevel> levels) {
    HypothesisOutcome outcome;
    outcome.which = which;
    outcome.t_value = t_value;
    outcome.df = df;
    if (std::isnan(t_value)) {
        outcome.p_value = kNaN;
        return outcome;
    }
    const auto dof = static_cast<double>(df);
    outcome.p_value = which == Hypothesis::ZeroBetaNonzero
                          ? special::student_t_two_sided(t_value, dof)
                          : special::student_t_sf(t_value, dof);

    std::vector<SignificanceLevel> sorted(levels.begin(), levels.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto level : sorted) {
        if (outcome.p_value < alpha_of(level)) {
            outcome.rejected_at.push_back(level);
        }
    }
    return outcome;
}

HypothesisOutcome hypothesis_test(const RegressionResult& result, Hypothesis which,
                                  std::span<const SignificanceLevel> levels) {
    const double t = which == Hypothesis::ZeroBetaNonzero ? result.t_intercept : result.t_slope;
    return hypothesis_test(t, result.df(), which, levels);
}

CapmPrediction sharpe_lintner_prediction(double r_f, double mu_m, double beta_v) {
    return {r_f + (mu_m - r_f) * beta_v, r_f, mu_m, beta_v};
}

}  // namespace capm::estimator
