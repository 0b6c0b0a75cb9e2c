#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capm/date.hpp"
#include "capm/diagnostics.hpp"
#include "capm/estimator.hpp"
#include "capm/pricelist.hpp"
#include "capm/report.hpp"
#include "capm/returns.hpp"

// End-to-end stages shared by the command-line subcommands.
namespace capm::pipeline {

struct DateRange {
    std::optional<Date> from;
    std::optional<Date> to;

    [[nodiscard]] bool contains(Date d) const {
        return (!from || !(d < *from)) && (!to || !(*to < d));
    }
};

struct PanelStage {
    pricelist::ParseResult parsed;
    /// Accepted records inside the range, deduplicated, ordered by date then ticker.
    std::vector<pricelist::PriceRecord> canonical;
    pricelist::PricePanel panel;
    pricelist::ValidationReport validation;
};

/// Parse, filter to the range, and assemble. Throws capm::ParseError (strict mode)
/// and capm::ConflictError.
[[nodiscard]] PanelStage load_panel(std::string_view text, bool strict, const DateRange& range);

struct ReturnsInputs {
    std::string_view pricelist;
    std::optional<std::string_view> index;
    std::optional<std::string_view> risk_free;
    std::optional<std::string_view> dividends;
    bool strict = false;
    DateRange range;
};

struct ReturnsStage {
    PanelStage stocks;
    std::optional<PanelStage> index;
    std::vector<returns::ReturnSeries> stock_returns;
    std::optional<returns::ReturnSeries> market_returns;
    std::optional<returns::RiskFreeSeries> risk_free;
    std::vector<returns::ExcessReturnSeries> stock_excess;
    std::optional<returns::ExcessReturnSeries> market_excess;
    std::optional<returns::ExcessReturnSeries> portfolio;
    std::vector<std::string> warnings;
};

/// Monthly sampling, dividend adjustment, log returns and, when a risk-free series
/// is given, excess returns and the equal-weighted portfolio. Throws
/// capm::InputError if the index file holds other than one ticker.
[[nodiscard]] ReturnsStage compute_returns(const ReturnsInputs& inputs);

struct EstimationStage {
    std::vector<report::NamedFit> stocks;
    estimator::RegressionResult portfolio;
    std::vector<report::NamedOutcome> hypotheses;
    std::vector<std::string> warnings;
};

/// Fits every stock and the portfolio against the market. Stocks that cannot be
/// fitted (no overlap, n < 3) are skipped with a warning. Throws
/// capm::EmptyOverlapError when the market has no excess returns or the
/// portfolio shares no month with it.
[[nodiscard]] EstimationStage estimate(const ReturnsStage& returns,
                                       std::span<const estimator::SignificanceLevel> levels);

struct TrendSegment {
    std::string label;  ///< slope row name: t, t2, ...
    Date from;
    Date to;
    diagnostics::TrendFit trend;
    std::optional<diagnostics::AcfResult> acf;
};

struct DiagnosticsStage {
    std::vector<report::ResidualDiagnostics> residuals;
    std::vector<TrendSegment> trends;
    std::vector<std::string> warnings;
};

/// Durbin-Watson and ACF for every regression's residuals, plus trend fits of the
/// index level over the range, split after `split` when given.
[[nodiscard]] DiagnosticsStage diagnose(const ReturnsStage& returns,
                                        const EstimationStage& estimation, std::size_t max_lag,
                                        std::optional<Date> split);

/// Residual diagnostics for one series. Degenerate statistics become warnings.
[[nodiscard]] report::ResidualDiagnostics residual_diagnostics(std::string name,
                                                               std::span<const double> residuals,
                                                               std::size_t max_lag);

}  // namespace capm::pipeline
