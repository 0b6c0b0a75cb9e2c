#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "capm/diagnostics.hpp"
#include "capm/estimator.hpp"
#include "capm/pricelist.hpp"
#include "capm/returns.hpp"
#include "capm/simulation.hpp"

namespace capm::report {

enum class Format { Csv, Json };

[[nodiscard]] std::string_view extension(Format format);

/// How doubles in a table are written. Both CSV and JSON carry the same rounded value.
enum class NumberStyle {
    Fixed4,        ///< 4 decimal places, the presentation of the published tables
    Significant10  ///< 10 significant digits, for return series
};

using Cell = std::variant<std::string, double, std::int64_t, bool, std::vector<std::string>>;

/// A named table. `headers` are the CSV column titles, `keys` the JSON field names.
/// NaN cells are written as `NA` in CSV and `null` in JSON. String lists are
/// `;`-joined in CSV and arrays in JSON.
struct Table {
    std::vector<std::string> headers;
    std::vector<std::string> keys;
    std::vector<std::vector<Cell>> rows;
    NumberStyle style = NumberStyle::Fixed4;
};

[[nodiscard]] std::string format_number(double value, NumberStyle style);
[[nodiscard]] std::string to_csv(const Table& table);
[[nodiscard]] std::string to_json(const Table& table);
[[nodiscard]] std::string render(const Table& table, Format format);

struct NamedFit {
    std::string name;
    estimator::RegressionResult fit;
};

// Estimation tables, one row per regression.
[[nodiscard]] Table stock_beta_table(std::span<const NamedFit> fits);
[[nodiscard]] Table stock_zero_beta_table(std::span<const NamedFit> fits);
[[nodiscard]] Table portfolio_beta_table(const estimator::RegressionResult& fit);
[[nodiscard]] Table portfolio_zero_beta_table(const estimator::RegressionResult& fit);

struct NamedOutcome {
    std::string regression;
    estimator::HypothesisOutcome outcome;
};
[[nodiscard]] Table hypothesis_table(std::span<const NamedOutcome> outcomes);

// Diagnostics.
struct ResidualDiagnostics {
    std::string regression;
    std::size_t n = 0;
    std::optional<double> durbin_watson;
    std::optional<diagnostics::AcfResult> acf;
    std::optional<diagnostics::WhiteNoiseCheck> white_noise;
    std::string warning;
};
[[nodiscard]] Table durbin_watson_table(std::span<const ResidualDiagnostics> rows);
[[nodiscard]] Table acf_table(const diagnostics::AcfResult& acf);

/// Coefficient table of a trend fit; `time_label` names the slope row.
[[nodiscard]] Table trend_table(const diagnostics::TrendFit& trend, std::string_view time_label);

// Parser and returns outputs.
[[nodiscard]] Table parse_summary_table(const pricelist::ParseReport& report);
[[nodiscard]] Table rejections_table(const pricelist::ParseReport& report);
[[nodiscard]] Table duplicates_table(const pricelist::ParseReport& report);
[[nodiscard]] Table coverage_table(const pricelist::ValidationReport& report);
[[nodiscard]] Table gaps_table(const pricelist::ValidationReport& report);
[[nodiscard]] Table returns_table(std::span<const returns::ReturnSeries> series);
[[nodiscard]] Table excess_table(std::span<const returns::ExcessReturnSeries> series);
[[nodiscard]] Table portfolio_table(const returns::ExcessReturnSeries& portfolio);

[[nodiscard]] Table recovery_table(const simulation::RecoveryReport& report);

}  // namespace capm::report
