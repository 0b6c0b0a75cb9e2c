#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capm/date.hpp"
#include "capm/pricelist.hpp"

namespace capm::returns {

inline constexpr std::string_view kPortfolioName = "PORTFOLIO";
inline constexpr std::string_view kMarketName = "MARKET";

/// A monthly sampled close. `dividend` is added back to `price` for the return
/// into this month only; the next return starts from the bare price.
struct MonthPrice {
    Month month;
    double price = 0.0;
    double dividend = 0.0;
};

/// Monthly closes for one ticker, months strictly increasing, gaps allowed.
struct MonthlyPrices {
    std::string ticker;
    std::vector<MonthPrice> points;
};

/// Monthly log returns r_it, each labelled with the month it ends in.
struct ReturnSeries {
    std::string ticker;
    std::vector<Month> periods;
    std::vector<double> values;
};

/// Risk-free rates; monthly_rate[i] is annual_yield[i] de-annualized geometrically.
struct RiskFreeSeries {
    std::vector<Month> periods;
    std::vector<double> annual_yield;
    std::vector<double> monthly_rate;
};

/// Returns net of the risk-free rate. `name` is a ticker, "PORTFOLIO" or "MARKET".
struct ExcessReturnSeries {
    std::string name;
    std::vector<Month> periods;
    std::vector<double> values;
    /// Portfolio series only: constituents present in each month (n_t = size).
    std::vector<std::vector<std::string>> constituents;
};

struct DividendEvent {
    std::string ticker;
    Month ex_month;
    double amount = 0.0;
};

/// For each ticker and month, the close on the first date in that month on which
/// the ticker traded. Months with no price at all are omitted.
[[nodiscard]] std::vector<MonthlyPrices> monthly_sample(const pricelist::PricePanel& panel);

struct DividendAdjustment {
    std::vector<MonthlyPrices> prices;
    std::vector<std::string> warnings;
};

/// Attaches each dividend to its ex-month point. Events for unknown tickers or for
/// months outside the ticker's sample produce a warning and are ignored.
[[nodiscard]] DividendAdjustment dividend_adjust(std::vector<MonthlyPrices> prices,
                                                 std::span<const DividendEvent> dividends);

/// r_t = log(P_t + D_t) - log(P_{t-1}) for every pair of adjacent calendar months.
/// A missing month breaks the chain: no return spans a gap.
[[nodiscard]] ReturnSeries log_returns(const MonthlyPrices& prices);

/// (1 + y)^(1/12) - 1. Throws capm::DomainError for y <= -1.
[[nodiscard]] double deannualize(double annual_yield);

/// (1 + m)^12 - 1, the inverse of deannualize. Throws capm::DomainError for m <= -1.
[[nodiscard]] double annualize(double monthly_rate);

struct MonthlyYield {
    Month month;
    double annual_yield = 0.0;
};

/// Throws capm::DomainError on a yield <= -1 and std::invalid_argument if months
/// are not strictly increasing.
[[nodiscard]] RiskFreeSeries make_risk_free(std::span<const MonthlyYield> yields);

struct ExcessResult {
    ExcessReturnSeries series;
    std::vector<std::string> warnings;
};

/// Inner join on months, then value-wise r - rf.
[[nodiscard]] ExcessResult excess_returns(const ReturnSeries& returns, const RiskFreeSeries& rf);

/// Equal-weighted mean of the excess returns present in each month. The divisor is
/// the number of series present that month; months with none are omitted. The sum
/// is taken in name order, so the result does not depend on input order.
[[nodiscard]] ExcessReturnSeries portfolio_excess(std::span<const ExcessReturnSeries> series);

/// Inner join of two series on months. Returns (periods, a values, b values).
struct AlignedPair {
    std::vector<Month> periods;
    std::vector<double> first;
    std::vector<double> second;
};
[[nodiscard]] AlignedPair align(const std::vector<Month>& periods_a,
                                const std::vector<double>& values_a,
                                const std::vector<Month>& periods_b,
                                const std::vector<double>& values_b);

// CSV interfaces: `YYYY-MM,annual_yield`, `TICKER,YYYY-MM,amount`, and
// `TICKER,YYYY-MM,log_return`. Readers throw capm::ParseError on malformed
// lines and skip blank and `#` lines.
[[nodiscard]] std::vector<MonthlyYield> parse_risk_free_csv(std::string_view text);
[[nodiscard]] std::vector<DividendEvent> parse_dividends_csv(std::string_view text);
[[nodiscard]] std::string format_returns_csv(std::span<const ReturnSeries> series);

/// `%.{digits}g` formatting.
[[nodiscard]] std::string format_significant(double value, int digits = 10);

}  // namespace capm::returns
