#include "capm/returns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "capm/errors.hpp"

namespace capm::returns {

std::vector<MonthlyPrices> monthly_sample(const pricelist::PricePanel& panel) {
    std::vector<MonthlyPrices> out;
    const auto& dates = panel.dates();
    for (std::size_t t = 0; t < panel.tickers().size(); ++t) {
        MonthlyPrices series{panel.tickers()[t], {}};
        for (std::size_t d = 0; d < dates.size(); ++d) {
            const auto close = panel.at(t, d);
            if (!close) {
                continue;
            }
            const Month month = month_of(dates[d]);
            if (series.points.empty() || series.points.back().month != month) {
                series.points.push_back({month, *close, 0.0});
            }
        }
        out.push_back(std::move(series));
    }
    return out;
}

DividendAdjustment dividend_adjust(std::vector<MonthlyPrices> prices,
                                   std::span<const DividendEvent> dividends) {
    DividendAdjustment result{std::move(prices), {}};
    for (const auto& event : dividends) {
        if (event.amount < 0.0 || !std::isfinite(event.amount)) {
            result.warnings.push_back(fmt::format("ignoring invalid dividend {} for {} in {}",
                                                  event.amount, event.ticker,
                                                  format_month(event.ex_month)));
            continue;
        }
        auto series = std::find_if(result.prices.begin(), result.prices.end(),
                                   [&](const MonthlyPrices& p) { return p.ticker == event.ticker; });
        if (series == result.prices.end()) {
            result.warnings.push_back(
                fmt::format("ignoring dividend for unknown ticker {}", event.ticker));
            continue;
        }
        auto point = std::find_if(series->points.begin(), series->points.end(),
                                  [&](const MonthPrice& p) { return p.month == event.ex_month; });
        if (point == series->points.end()) {
            result.warnings.push_back(fmt::format("ignoring dividend for {}: {} is not sampled",
                                                  event.ticker, format_month(event.ex_month)));
            continue;
        }
        point->dividend += event.amount;
    }
    return result;
}

ReturnSeries log_returns(const MonthlyPrices& prices) {
    ReturnSeries series{prices.ticker, {}, {}};
    const auto& points = prices.points;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].month != next_month(points[i - 1].month)) {
            continue;
        }
        series.periods.push_back(points[i].month);
        series.values.push_back(std::log(points[i].price + points[i].dividend) -
                                std::log(points[i - 1].price));
    }
    return series;
}

double deannualize(double annual_yield) {
    if (!(annual_yield > -1.0)) {
        throw DomainError(fmt::format("annual yield must exceed -1, got {}", annual_yield));
    }
    return std::expm1(std::log1p(annual_yield) / 12.0);
}

double annualize(double monthly_rate) {
    if (!(monthly_rate > -1.0)) {
        throw DomainError(fmt::format("monthly rate must exceed -1, got {}", monthly_rate));
    }
    return std::expm1(12.0 * std::log1p(monthly_rate));
}

RiskFreeSeries make_risk_free(std::span<const MonthlyYield> yields) {
    RiskFreeSeries rf;
    for (const auto& y : yields) {
        if (!rf.periods.empty() && !(rf.periods.back() < y.month)) {
            throw std::invalid_argument(
                fmt::format("risk-free months must be strictly increasing at {}",
                            format_month(y.month)));
        }
        rf.periods.push_back(y.month);
        rf.annual_yield.push_back(y.annual_yield);
        rf.monthly_rate.push_back(deannualize(y.annual_yield));
    }
    return rf;
}

AlignedPair align(const std::vector<Month>& periods_a, const std::vector<double>& values_a,
                  const std::vector<Month>& periods_b, const std::vector<double>& values_b) {
    AlignedPair out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < periods_a.size() && j < periods_b.size()) {
        if (periods_a[i] < periods_b[j]) {
            ++i;
        } else if (periods_b[j] < periods_a[i]) {
            ++j;
        } else {
            out.periods.push_back(periods_a[i]);
            out.first.push_back(values_a[i]);
            out.second.push_back(values_b[j]);
            ++i;
            ++j;
        }
    }
    return out;
}

ExcessResult excess_returns(const ReturnSeries& returns, const RiskFreeSeries& rf) {
    const auto joined = align(returns.periods, returns.values, rf.periods, rf.monthly_rate);
    ExcessResult result;
    result.series.name = returns.ticker;
    result.series.periods = joined.periods;
    result.series.values.reserve(joined.periods.size());
    for (std::size_t i = 0; i < joined.periods.size(); ++i) {
        result.series.values.push_back(joined.first[i] - joined.second[i]);
    }
    if (result.series.periods.empty()) {
        result.warnings.push_back(
            fmt::format("{}: no month in common with the risk-free series", returns.ticker));
    }
    return result;
}

ExcessReturnSeries portfolio_excess(std::span<const ExcessReturnSeries> series) {
    std::vector<std::size_t> order(series.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return series[a].name < series[b].name; });

    std::map<Month, std::pair<double, std::vector<std::string>>> months;
    for (const std::size_t idx : order) {
        const auto& s = series[idx];
        for (std::size_t i = 0; i < s.periods.size(); ++i) {
            auto& [sum, names] = months[s.periods[i]];
            sum += s.values[i];
            names.push_back(s.name);
        }
    }

    ExcessReturnSeries portfolio;
    portfolio.name = std::string(kPortfolioName);
    for (auto& [month, entry] : months) {
        portfolio.periods.push_back(month);
        portfolio.values.push_back(entry.first / static_cast<double>(entry.second.size()));
        portfolio.constituents.push_back(std::move(entry.second));
    }
    return portfolio;
}

namespace {

struct CsvLine {
    std::size_t number;
    std::vector<std::string_view> fields;
};

std::vector<CsvLine> split_csv(std::string_view text) {
    std::vector<CsvLine> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto newline = text.find('\n', pos);
        const auto end = newline == std::string_view::npos ? text.size() : newline;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++number;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        CsvLine parsed{number, {}};
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                parsed.fields.push_back(line.substr(start));
                break;
            }
            parsed.fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        lines.push_back(std::move(parsed));
    }
    return lines;
}

double parse_number(std::string_view text, std::size_t line, std::size_t column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ParseError(line, column, fmt::format("malformed number '{}'", text));
    }
    return value;
}

std::size_t column_of(const CsvLine& line, std::size_t field) {
    std::size_t column = 1;
    for (std::size_t i = 0; i < field; ++i) {
        column += line.fields[i].size() + 1;
    }
    return column;
}

}  // namespace

std::vector<MonthlyYield> parse_risk_free_csv(std::string_view text) {
    std::vector<MonthlyYield> out;
    for (const auto& line : split_csv(text)) {
        if (line.fields.size() != 2) {
            throw ParseError(line.number, 1, "expected YYYY-MM,annual_yield");
        }
        const auto month = parse_month(line.fields[0]);
        if (!month) {
            throw ParseError(line.number, 1, fmt::format("invalid month '{}'", line.fields[0]));
        }
        out.push_back({*month, parse_number(line.fields[1], line.number, column_of(line, 1))});
    }
    return out;
}

std::vector<DividendEvent> parse_dividends_csv(std::string_view text) {
    std::vector<DividendEvent> out;
    for (const auto& line : split_csv(text)) {
        if (line.fields.size() != 3) {
            throw ParseError(line.number, 1, "expected TICKER,YYYY-MM,amount");
        }
        if (!pricelist::is_valid_ticker(line.fields[0])) {
            throw ParseError(line.number, 1, fmt::format("invalid ticker '{}'", line.fields[0]));
        }
        const auto month = parse_month(line.fields[1]);
        if (!month) {
            throw ParseError(line.number, column_of(line, 1),
                             fmt::format("invalid month '{}'", line.fields[1]));
        }
        const double amount = parse_number(line.fields[2], line.number, column_of(line, 2));
        if (amount < 0.0) {
            throw ParseError(line.number, column_of(line, 2), "negative dividend");
        }
        out.push_back({std::string(line.fields[0]), *month, amount});
    }
    return out;
}

std::string format_significant(double value, int digits) {
    return fmt::format("{:.{}g}", value, digits);
}

std::string format_returns_csv(std::span<const ReturnSeries> series) {
    std::string out = "ticker,month,log_return\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.periods.size(); ++i) {
            out += fmt::format("{},{},{}\n", s.ticker, format_month(s.periods[i]),
                               format_significant(s.values[i]));
        }
    }
    return out;
}

}  // namespace capm::returns
