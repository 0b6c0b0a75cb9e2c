#include "capm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "capm/errors.hpp"

namespace capm::pipeline {

namespace {

// An exact fit leaves rounding noise, not residuals.
constexpr double kNumericallyZeroResidual = 1e-12;

}  // namespace

PanelStage load_panel(std::string_view text, bool strict, const DateRange& range) {
    PanelStage stage;
    stage.parsed = pricelist::parse_price_list(text, strict);

    std::vector<pricelist::PriceRecord> in_range;
    for (const auto& record : stage.parsed.records) {
        if (range.contains(record.date)) {
            in_range.push_back(record);
        }
    }
    stage.panel = pricelist::build_panel(in_range);
    stage.validation = pricelist::validate_panel(stage.panel);

    std::stable_sort(in_range.begin(), in_range.end(), [](const auto& a, const auto& b) {
        return std::tie(a.date, a.ticker) < std::tie(b.date, b.ticker);
    });
    const auto last = std::unique(in_range.begin(), in_range.end(), [](const auto& a, const auto& b) {
        return a.date == b.date && a.ticker == b.ticker;
    });
    in_range.erase(last, in_range.end());
    stage.canonical = std::move(in_range);
    return stage;
}

ReturnsStage compute_returns(const ReturnsInputs& inputs) {
    ReturnsStage stage;
    stage.stocks = load_panel(inputs.pricelist, inputs.strict, inputs.range);

    auto monthly = returns::monthly_sample(stage.stocks.panel);
    if (inputs.dividends) {
        const auto events = returns::parse_dividends_csv(*inputs.dividends);
        auto adjusted = returns::dividend_adjust(std::move(monthly), events);
        monthly = std::move(adjusted.prices);
        for (auto& w : adjusted.warnings) {
            stage.warnings.push_back(std::move(w));
        }
    }
    for (const auto& prices : monthly) {
        stage.stock_returns.push_back(returns::log_returns(prices));
    }

    if (inputs.index) {
        stage.index = load_panel(*inputs.index, inputs.strict, inputs.range);
        const auto& tickers = stage.index->panel.tickers();
        if (tickers.size() != 1) {
            throw InputError(
                fmt::format("index file must hold exactly one ticker, found {}", tickers.size()));
        }
        stage.market_returns = returns::log_returns(returns::monthly_sample(stage.index->panel)[0]);
    }

    if (inputs.risk_free) {
        const auto yields = returns::parse_risk_free_csv(*inputs.risk_free);
        stage.risk_free = returns::make_risk_free(yields);

        for (const auto& series : stage.stock_returns) {
            auto excess = returns::excess_returns(series, *stage.risk_free);
            for (auto& w : excess.warnings) {
                stage.warnings.push_back(std::move(w));
            }
            stage.stock_excess.push_back(std::move(excess.series));
        }
        stage.portfolio = returns::portfolio_excess(stage.stock_excess);

        if (stage.market_returns) {
            auto excess = returns::excess_returns(*stage.market_returns, *stage.risk_free);
            for (auto& w : excess.warnings) {
                stage.warnings.push_back(std::move(w));
            }
            excess.series.name = std::string(returns::kMarketName);
            stage.market_excess = std::move(excess.series);
        }
    }
    return stage;
}

EstimationStage estimate(const ReturnsStage& returns,
                         std::span<const estimator::SignificanceLevel> levels) {
    if (!returns.market_excess || returns.market_excess->values.empty()) {
        throw EmptyOverlapError("no market excess returns: index and risk-free months do not overlap");
    }
    const auto& market = *returns.market_excess;

    EstimationStage stage;
    for (const auto& stock : returns.stock_excess) {
        try {
            stage.stocks.push_back({stock.name, estimator::estimate_stock_capm(stock, market)});
        } catch (const EmptyOverlapError& e) {
            stage.warnings.push_back(fmt::format("skipping {}: {}", stock.name, e.what()));
        } catch (const InsufficientDataError& e) {
            stage.warnings.push_back(fmt::format("skipping {}: {}", stock.name, e.what()));
        } catch (const DegenerateRegressorError& e) {
            stage.warnings.push_back(fmt::format("skipping {}: {}", stock.name, e.what()));
        }
    }

    if (!returns.portfolio || returns.portfolio->values.empty()) {
        throw EmptyOverlapError("no portfolio excess returns");
    }
    try {
        stage.portfolio = estimator::estimate_portfolio_capm(*returns.portfolio, market);
    } catch (const InsufficientDataError& e) {
        throw EmptyOverlapError(fmt::format("portfolio and market overlap too little: {}", e.what()));
    }

    const auto add_tests = [&](const std::string& name, const estimator::RegressionResult& fit) {
        for (const auto which : {estimator::Hypothesis::ZeroBetaNonzero,
                                 estimator::Hypothesis::PositivePriceOfRisk}) {
            stage.hypotheses.push_back({name, estimator::hypothesis_test(fit, which, levels)});
        }
    };
    for (const auto& [name, fit] : stage.stocks) {
        add_tests(name, fit);
    }
    add_tests(std::string(returns::kPortfolioName), stage.portfolio);
    return stage;
}

report::ResidualDiagnostics residual_diagnostics(std::string name,
                                                 std::span<const double> residuals,
                                                 std::size_t max_lag) {
    report::ResidualDiagnostics row;
    row.regression = std::move(name);
    row.n = residuals.size();
    std::vector<std::string> problems;
    const bool numerically_zero = std::all_of(residuals.begin(), residuals.end(), [](double e) {
        return std::fabs(e) <= kNumericallyZeroResidual;
    });
    if (numerically_zero) {
        row.warning = "residuals are numerically zero; Durbin-Watson and ACF are undefined";
        return row;
    }
    try {
        row.durbin_watson = diagnostics::durbin_watson(residuals);
    } catch (const UndefinedStatisticError& e) {
        problems.emplace_back(e.what());
    }
    if (residuals.size() <= max_lag) {
        problems.push_back(
            fmt::format("{} residuals are too few for an ACF to lag {}", residuals.size(), max_lag));
    } else {
        try {
            row.acf = diagnostics::acf(residuals, max_lag);
            row.white_noise = diagnostics::white_noise_check(*row.acf);
        } catch (const UndefinedStatisticError& e) {
            problems.emplace_back(e.what());
        }
    }
    for (std::size_t i = 0; i < problems.size(); ++i) {
        row.warning += (i > 0 ? "; " : "") + problems[i];
    }
    return row;
}

DiagnosticsStage diagnose(const ReturnsStage& returns, const EstimationStage& estimation,
                          std::size_t max_lag, std::optional<Date> split) {
    DiagnosticsStage stage;
    for (const auto& [name, fit] : estimation.stocks) {
        stage.residuals.push_back(residual_diagnostics(name, fit.residuals, max_lag));
    }
    stage.residuals.push_back(residual_diagnostics(std::string(returns::kPortfolioName),
                                                   estimation.portfolio.residuals, max_lag));
    for (const auto& row : stage.residuals) {
        if (!row.warning.empty()) {
            stage.warnings.push_back(fmt::format("{}: {}", row.regression, row.warning));
        }
    }

    if (!returns.index) {
        return stage;
    }
    const auto& panel = returns.index->panel;
    std::vector<std::pair<Date, double>> levels;
    for (std::size_t d = 0; d < panel.dates().size(); ++d) {
        if (const auto v = panel.at(0, d)) {
            levels.emplace_back(panel.dates()[d], *v);
        }
    }

    std::vector<std::vector<std::pair<Date, double>>> segments(1);
    for (const auto& point : levels) {
        if (split && *split < point.first && segments.size() == 1) {
            segments.emplace_back();
        }
        segments.back().push_back(point);
    }

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto& segment = segments[s];
        const std::string label = s == 0 ? "t" : fmt::format("t{}", s + 1);
        if (segment.size() < 3) {
            stage.warnings.push_back(
                fmt::format("trend segment {} has {} points; need 3", s + 1, segment.size()));
            continue;
        }
        std::vector<std::pair<double, double>> points;
        for (std::size_t i = 0; i < segment.size(); ++i) {
            points.emplace_back(static_cast<double>(i + 1), segment[i].second);
        }
        TrendSegment out{label, segment.front().first, segment.back().first,
                         diagnostics::trend_regression(points), std::nullopt};
        if (out.trend.fit.residuals.size() > max_lag) {
            try {
                out.acf = diagnostics::acf(out.trend.fit.residuals, max_lag);
            } catch (const UndefinedStatisticError& e) {
                stage.warnings.push_back(fmt::format("trend segment {}: {}", s + 1, e.what()));
            }
        }
        stage.trends.push_back(std::move(out));
    }
    return stage;
}

}  // namespace capm::pipeline
