#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capm/returns.hpp"

namespace capm::estimator {

/// Simple OLS fit y = intercept + slope * x with classical inference.
///
/// Standard errors use the residual variance with n - 2 degrees of freedom and
/// p-values are two-sided Student-t. A t-value is NaN when its standard error is
/// zero (a perfect fit), and so is the matching p-value.
struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double se_slope = 0.0;
    double se_intercept = 0.0;
    double t_slope = 0.0;
    double t_intercept = 0.0;
    double p_slope_two_sided = 1.0;
    double p_intercept_two_sided = 1.0;
    double r_squared = 0.0;
    std::size_t n = 0;
    std::vector<double> residuals;

    [[nodiscard]] std::size_t df() const noexcept { return n - 2; }
};

/// Throws capm::InsufficientDataError for n < 3 or mismatched lengths and
/// capm::DegenerateRegressorError when x is constant.
[[nodiscard]] RegressionResult ols_simple(std::span<const double> x, std::span<const double> y);

/// Excess stock return regressed on excess market return over the months both
/// series cover. Throws capm::EmptyOverlapError when they share no month.
[[nodiscard]] RegressionResult estimate_stock_capm(const returns::ExcessReturnSeries& stock,
                                                   const returns::ExcessReturnSeries& market);

/// Same regression with the equal-weighted portfolio as the dependent series.
[[nodiscard]] RegressionResult estimate_portfolio_capm(
    const returns::ExcessReturnSeries& portfolio, const returns::ExcessReturnSeries& market);

enum class Hypothesis {
    ZeroBetaNonzero,     ///< two-sided on the intercept
    PositivePriceOfRisk  ///< upper-tail on the slope
};

[[nodiscard]] std::string_view hypothesis_name(Hypothesis which);

enum class SignificanceLevel { OnePercent, FivePercent, TenPercent };

[[nodiscard]] double alpha_of(SignificanceLevel level);
[[nodiscard]] std::string_view label_of(SignificanceLevel level);  // "1%", "5%", "10%"

inline constexpr SignificanceLevel kAllLevels[] = {
    SignificanceLevel::OnePercent, SignificanceLevel::FivePercent, SignificanceLevel::TenPercent};

struct HypothesisOutcome {
    Hypothesis which = Hypothesis::ZeroBetaNonzero;
    double t_value = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
    /// Ascending order; rejection at a level implies rejection at every larger one.
    std::vector<SignificanceLevel> rejected_at;

    [[nodiscard]] bool rejected(SignificanceLevel level) const;
};

/// Evaluates the null at each level in `levels` (rejected iff p < alpha).
[[nodiscard]] HypothesisOutcome hypothesis_test(
    const RegressionResult& result, Hypothesis which,
    std::span<const SignificanceLevel> levels = kAllLevels);

/// Same test from a bare t-value.
[[nodiscard]] HypothesisOutcome hypothesis_test(
    double t_value, std::size_t df, Hypothesis which,
    std::span<const SignificanceLevel> levels = kAllLevels);

struct CapmPrediction {
    double mu_v = 0.0;
    double r_f = 0.0;
    double mu_m = 0.0;
    double beta_v = 0.0;
};

/// mu_v = r_f + (mu_m - r_f) * beta_v
[[nodiscard]] CapmPrediction sharpe_lintner_prediction(double r_f, double mu_m, double beta_v);

}  // namespace capm::estimator
