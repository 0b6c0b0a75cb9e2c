#include "capm/report.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace capm::report {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (const char c : text) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

std::string cell_text(const Cell& cell, NumberStyle style) {
    return std::visit(
        [&](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, double>) {
                return format_number(v, style);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return join(v, ";");
            }
        },
        cell);
}

nlohmann::ordered_json cell_json(const Cell& cell, NumberStyle style) {
    return std::visit(
        [&](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) {
                    return nullptr;
                }
                // Round through the CSV text so both formats hold the same value.
                const auto text = format_number(v, style);
                double rounded = 0.0;
                std::from_chars(text.data(), text.data() + text.size(), rounded);
                return rounded;
            } else {
                return v;
            }
        },
        cell);
}

Cell optional_number(const std::optional<double>& value) { return value ? *value : kNaN; }

std::vector<std::string> level_labels(const std::vector<estimator::SignificanceLevel>& levels) {
    std::vector<std::string> labels;
    for (const auto level : levels) {
        labels.emplace_back(estimator::label_of(level));
    }
    return labels;
}

}  // namespace

std::string_view extension(Format format) { return format == Format::Csv ? "csv" : "json"; }

std::string format_number(double value, NumberStyle style) {
    if (std::isnan(value)) {
        return "NA";
    }
    if (std::isinf(value)) {
        return value > 0 ? "Inf" : "-Inf";
    }
    std::string text =
        style == NumberStyle::Fixed4 ? fmt::format("{:.4f}", value) : fmt::format("{:.10g}", value);
    if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
        text.erase(0, 1);
    }
    return text;
}

std::string to_csv(const Table& table) {
    std::vector<std::string> header;
    for (const auto& h : table.headers) {
        header.push_back(csv_escape(h));
    }
    std::string out = join(header, ",") + "\n";
    for (const auto& row : table.rows) {
        std::vector<std::string> fields;
        for (const auto& cell : row) {
            fields.push_back(csv_escape(cell_text(cell, table.style)));
        }
        out += join(fields, ",") + "\n";
    }
    return out;
}

std::string to_json(const Table& table) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json object = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            object[table.keys.at(i)] = cell_json(row[i], table.style);
        }
        rows.push_back(std::move(object));
    }
    return rows.dump(2) + "\n";
}

std::string render(const Table& table, Format format) {
    return format == Format::Csv ? to_csv(table) : to_json(table);
}

Table stock_beta_table(std::span<const NamedFit> fits) {
    Table table{{"Stock Name", "Estimated Beta", "t-value", "Std. Error", "R-squared"},
                {"name", "beta", "t_beta", "se_beta", "r2"},
                {},
                NumberStyle::Fixed4};
    for (const auto& [name, fit] : fits) {
        table.rows.push_back({name, fit.slope, fit.t_slope, fit.se_slope, fit.r_squared});
    }
    return table;
}

Table stock_zero_beta_table(std::span<const NamedFit> fits) {
    Table table{{"Stock Name", "Estimated zero beta", "t-value", "Std. Error", "p-value"},
                {"name", "alpha", "t_alpha", "se_alpha", "p_alpha"},
                {},
                NumberStyle::Fixed4};
    for (const auto& [name, fit] : fits) {
        table.rows.push_back(
            {name, fit.intercept, fit.t_intercept, fit.se_intercept, fit.p_intercept_two_sided});
    }
    return table;
}

Table portfolio_beta_table(const estimator::RegressionResult& fit) {
    return {{"Estimated Beta", "t-value", "Std. Error", "R-squared"},
            {"beta", "t_beta", "se_beta", "r2"},
            {{fit.slope, fit.t_slope, fit.se_slope, fit.r_squared}},
            NumberStyle::Fixed4};
}

Table portfolio_zero_beta_table(const estimator::RegressionResult& fit) {
    return {{"Est.zero beta rate", "t-value", "Std. Error"},
            {"alpha", "t_alpha", "se_alpha"},
            {{fit.intercept, fit.t_intercept, fit.se_intercept}},
            NumberStyle::Fixed4};
}

Table hypothesis_table(std::span<const NamedOutcome> outcomes) {
    Table table{{"Regression", "Hypothesis", "t-value", "df", "p-value", "Rejected at"},
                {"regression", "hypothesis", "t_value", "df", "p_value", "rejected_at"},
                {},
                NumberStyle::Fixed4};
    for (const auto& [regression, outcome] : outcomes) {
        table.rows.push_back({regression, std::string(estimator::hypothesis_name(outcome.which)),
                              outcome.t_value, static_cast<std::int64_t>(outcome.df),
                              outcome.p_value, level_labels(outcome.rejected_at)});
    }
    return table;
}

Table durbin_watson_table(std::span<const ResidualDiagnostics> rows) {
    Table table{{"Regression", "n", "Durbin-Watson", "Lag-1 ACF", "DW alarm", "ACF exceedances",
                 "White noise", "Warning"},
                {"regression", "n", "durbin_watson", "acf_lag1", "dw_alarm", "acf_exceedances",
                 "white_noise", "warning"},
                {},
                NumberStyle::Fixed4};
    for (const auto& row : rows) {
        const Cell lag1 = row.acf ? Cell{row.acf->at(1)} : Cell{kNaN};
        const Cell alarm = row.durbin_watson
                               ? Cell{diagnostics::durbin_watson_alarm(*row.durbin_watson)}
                               : Cell{std::string("NA")};
        const Cell exceed = row.white_noise
                                ? Cell{static_cast<std::int64_t>(row.white_noise->exceed_count)}
                                : Cell{std::string("NA")};
        const Cell white =
            row.white_noise ? Cell{row.white_noise->is_white} : Cell{std::string("NA")};
        table.rows.push_back({row.regression, static_cast<std::int64_t>(row.n),
                              optional_number(row.durbin_watson), lag1, alarm, exceed, white,
                              row.warning});
    }
    return table;
}

Table acf_table(const diagnostics::AcfResult& acf) {
    Table table{{"lag", "correlation", "band"}, {"lag", "correlation", "band"}, {},
                NumberStyle::Fixed4};
    for (std::size_t i = 0; i < acf.lags.size(); ++i) {
        table.rows.push_back(
            {static_cast<std::int64_t>(acf.lags[i]), acf.correlations[i], acf.band});
    }
    return table;
}

Table trend_table(const diagnostics::TrendFit& trend, std::string_view time_label) {
    const auto& fit = trend.fit;
    return {{"Term", "Estimate", "Std. Error", "t value", "Pr(>|t|)"},
            {"term", "estimate", "std_error", "t_value", "p_value"},
            {{std::string("(Intercept)"), fit.intercept, fit.se_intercept, fit.t_intercept,
              fit.p_intercept_two_sided},
             {std::string(time_label), fit.slope, fit.se_slope, fit.t_slope,
              fit.p_slope_two_sided}},
            NumberStyle::Fixed4};
}

Table parse_summary_table(const pricelist::ParseReport& report) {
    return {{"accepted", "rejected", "duplicates"},
            {"accepted", "rejected", "duplicates"},
            {{static_cast<std::int64_t>(report.accepted),
              static_cast<std::int64_t>(report.rejected.size()),
              static_cast<std::int64_t>(report.duplicates.size())}},
            NumberStyle::Fixed4};
}

Table rejections_table(const pricelist::ParseReport& report) {
    Table table{{"line", "reason"}, {"line", "reason"}, {}, NumberStyle::Fixed4};
    for (const auto& r : report.rejected) {
        table.rows.push_back({static_cast<std::int64_t>(r.line), r.reason});
    }
    return table;
}

Table duplicates_table(const pricelist::ParseReport& report) {
    Table table{{"ticker", "date"}, {"ticker", "date"}, {}, NumberStyle::Fixed4};
    for (const auto& d : report.duplicates) {
        table.rows.push_back({d.ticker, format_date(d.date)});
    }
    return table;
}

Table coverage_table(const pricelist::ValidationReport& report) {
    Table table{{"month", "coverage"}, {"month", "coverage"}, {}, NumberStyle::Fixed4};
    for (const auto& m : report.monthly) {
        table.rows.push_back({format_month(m.month), m.coverage});
    }
    table.rows.push_back({std::string("ALL"), report.coverage});
    return table;
}

Table gaps_table(const pricelist::ValidationReport& report) {
    Table table{{"ticker", "month"}, {"ticker", "month"}, {}, NumberStyle::Fixed4};
    for (const auto& g : report.gaps) {
        for (const auto& m : g.months) {
            table.rows.push_back({g.ticker, format_month(m)});
        }
    }
    return table;
}

Table returns_table(std::span<const returns::ReturnSeries> series) {
    Table table{{"ticker", "month", "log_return"}, {"ticker", "month", "log_return"}, {},
                NumberStyle::Significant10};
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.periods.size(); ++i) {
            table.rows.push_back({s.ticker, format_month(s.periods[i]), s.values[i]});
        }
    }
    return table;
}

Table excess_table(std::span<const returns::ExcessReturnSeries> series) {
    Table table{{"name", "month", "excess_return"}, {"name", "month", "excess_return"}, {},
                NumberStyle::Significant10};
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.periods.size(); ++i) {
            table.rows.push_back({s.name, format_month(s.periods[i]), s.values[i]});
        }
    }
    return table;
}

Table portfolio_table(const returns::ExcessReturnSeries& portfolio) {
    Table table{{"month", "excess_return", "n_stocks", "constituents"},
                {"month", "excess_return", "n_stocks", "constituents"},
                {},
                NumberStyle::Significant10};
    for (std::size_t i = 0; i < portfolio.periods.size(); ++i) {
        const auto& names = i < portfolio.constituents.size() ? portfolio.constituents[i]
                                                              : std::vector<std::string>{};
        table.rows.push_back({format_month(portfolio.periods[i]), portfolio.values[i],
                              static_cast<std::int64_t>(names.size()), names});
    }
    return table;
}

Table recovery_table(const simulation::RecoveryReport& report) {
    Table table{{"Series", "Parameter", "Truth", "Coverage", "Mean Bias", "Mean SE", "SD Estimate",
                 "Trials", "n", "Degenerate"},
                {"series", "parameter", "truth", "coverage", "mean_bias", "mean_se",
                 "sd_estimate", "trials", "n", "degenerate"},
                {},
                NumberStyle::Significant10};
    for (const auto& p : report.parameters) {
        table.rows.push_back({p.series, p.parameter, p.truth, p.coverage, p.mean_bias, p.mean_se,
                              p.sd_estimate, static_cast<std::int64_t>(report.trials),
                              static_cast<std::int64_t>(report.n), report.degenerate});
    }
    return table;
}

}  // namespace capm::report
