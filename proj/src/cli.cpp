#include "capm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "capm/errors.hpp"
#include "capm/pipeline.hpp"
#include "capm/simulation.hpp"

namespace capm::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot read '{}'", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class OutputDir {
public:
    OutputDir(fs::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw IoError(fmt::format("cannot create '{}': {}", dir_.string(), ec.message()));
        }
    }

    void write(const std::string& name, const std::string& content) {
        const auto path = dir_ / name;
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file || !(file << content) || !file.flush()) {
            throw IoError(fmt::format("cannot write '{}'", path.string()));
        }
        log_ << "wrote " << path.string() << '\n';
    }

    void write(const std::string& stem, const report::Table& table, report::Format format) {
        write(fmt::format("{}.{}", stem, report::extension(format)), report::render(table, format));
    }

private:
    fs::path dir_;
    std::ostream& log_;
};

std::string require_input(const fs::path& path, std::string_view flag) {
    if (path.empty()) {
        throw InvalidSpecError(fmt::format("{} is required", flag));
    }
    if (!fs::exists(path)) {
        throw IoError(fmt::format("input file '{}' does not exist", path.string()));
    }
    return read_file(path);
}

std::optional<std::string> optional_input(const fs::path& path) {
    if (path.empty()) {
        return std::nullopt;
    }
    if (!fs::exists(path)) {
        throw IoError(fmt::format("input file '{}' does not exist", path.string()));
    }
    return read_file(path);
}

void warn_all(std::ostream& err, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        err << "warning: " << w << '\n';
    }
}

// Fixed-width text rendering for the bundled report.
std::string render_text(const std::string& title, const report::Table& table) {
    const auto csv = report::to_csv(table);
    std::vector<std::vector<std::string>> cells;
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> row;
        std::string field;
        bool quoted = false;
        for (const char c : line) {
            if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                row.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        row.push_back(field);
        cells.push_back(std::move(row));
    }
    std::vector<std::size_t> widths;
    for (const auto& row : cells) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::string out = title + "\n";
    for (const auto& row : cells) {
        std::string text;
        for (std::size_t i = 0; i < row.size(); ++i) {
            text += fmt::format("{:<{}}", row[i], widths[i] + 2);
        }
        while (!text.empty() && text.back() == ' ') {
            text.pop_back();
        }
        out += text + "\n";
    }
    return out + "\n";
}

pipeline::DateRange range_of(const RunConfig& config) { return {config.from, config.to}; }

struct LoadedInputs {
    std::string pricelist;
    std::optional<std::string> index;
    std::optional<std::string> riskfree;
    std::optional<std::string> dividends;

    [[nodiscard]] pipeline::ReturnsInputs view(const RunConfig& config) const {
        pipeline::ReturnsInputs in;
        in.pricelist = pricelist;
        if (index) {
            in.index = *index;
        }
        if (riskfree) {
            in.risk_free = *riskfree;
        }
        if (dividends) {
            in.dividends = *dividends;
        }
        in.strict = config.strict;
        in.range = range_of(config);
        return in;
    }
};

LoadedInputs load_inputs(const RunConfig& config, bool need_market) {
    LoadedInputs in;
    in.pricelist = require_input(config.input, "--input");
    if (need_market) {
        in.index = require_input(config.index, "--index");
        in.riskfree = require_input(config.riskfree, "--riskfree");
    } else {
        in.index = optional_input(config.index);
        in.riskfree = optional_input(config.riskfree);
    }
    in.dividends = optional_input(config.dividends);
    return in;
}

void write_parse_outputs(const pipeline::PanelStage& stage, const RunConfig& config,
                         OutputDir& dir, std::ostream& out) {
    dir.write("panel.csv", pricelist::serialize(stage.canonical));
    dir.write("parse_summary", report::parse_summary_table(stage.parsed.report), config.format);
    dir.write("parse_rejections", report::rejections_table(stage.parsed.report), config.format);
    dir.write("parse_duplicates", report::duplicates_table(stage.parsed.report), config.format);
    dir.write("coverage", report::coverage_table(stage.validation), config.format);
    dir.write("gaps", report::gaps_table(stage.validation), config.format);
    out << fmt::format("accepted {} lines, rejected {}, duplicates {}; panel {} tickers x {} dates, "
                       "coverage {}\n",
                       stage.parsed.report.accepted, stage.parsed.report.rejected.size(),
                       stage.parsed.report.duplicates.size(), stage.panel.tickers().size(),
                       stage.panel.dates().size(),
                       report::format_number(stage.validation.coverage, report::NumberStyle::Fixed4));
}

void write_returns_outputs(const pipeline::ReturnsStage& stage, const RunConfig& config,
                           OutputDir& dir) {
    auto all_returns = stage.stock_returns;
    if (stage.market_returns) {
        all_returns.push_back(*stage.market_returns);
    }
    dir.write("returns", report::returns_table(all_returns), config.format);
    if (stage.risk_free) {
        auto all_excess = stage.stock_excess;
        if (stage.market_excess) {
            all_excess.push_back(*stage.market_excess);
        }
        dir.write("excess_returns", report::excess_table(all_excess), config.format);
        if (stage.portfolio) {
            dir.write("portfolio", report::portfolio_table(*stage.portfolio), config.format);
        }
    }
}

void write_estimate_outputs(const pipeline::EstimationStage& stage, const RunConfig& config,
                            OutputDir& dir) {
    dir.write("stock_betas", report::stock_beta_table(stage.stocks), config.format);
    dir.write("stock_zero_beta", report::stock_zero_beta_table(stage.stocks), config.format);
    dir.write("portfolio_beta", report::portfolio_beta_table(stage.portfolio), config.format);
    dir.write("portfolio_zero_beta", report::portfolio_zero_beta_table(stage.portfolio),
              config.format);
    dir.write("hypotheses", report::hypothesis_table(stage.hypotheses), config.format);
}

void write_diagnose_outputs(const pipeline::DiagnosticsStage& stage, const RunConfig& config,
                            OutputDir& dir) {
    dir.write("durbin_watson", report::durbin_watson_table(stage.residuals), config.format);
    for (const auto& row : stage.residuals) {
        if (row.acf) {
            dir.write("acf_" + row.regression, report::acf_table(*row.acf), config.format);
        }
    }
    report::Table summary{{"Segment", "From", "To", "n", "R-squared", "Adj. R-squared"},
                          {"segment", "from", "to", "n", "r2", "adj_r2"},
                          {},
                          report::NumberStyle::Fixed4};
    for (const auto& segment : stage.trends) {
        dir.write("trend_" + segment.label, report::trend_table(segment.trend, segment.label),
                  config.format);
        if (segment.acf) {
            dir.write("acf_trend_" + segment.label, report::acf_table(*segment.acf),
                      config.format);
        }
        summary.rows.push_back({segment.label, format_date(segment.from), format_date(segment.to),
                                static_cast<std::int64_t>(segment.trend.fit.n),
                                segment.trend.fit.r_squared, segment.trend.adj_r_squared});
    }
    if (!stage.trends.empty()) {
        dir.write("trend_summary", summary, config.format);
    }
}

int cmd_parse(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto text = require_input(config.input, "--input");
    const auto stage = pipeline::load_panel(text, config.strict, range_of(config));
    for (const auto& r : stage.parsed.report.rejected) {
        err << fmt::format("warning: line {}: {}\n", r.line, r.reason);
    }
    OutputDir dir(config.out, out);
    write_parse_outputs(stage, config, dir, out);
    return kOk;
}

int cmd_returns(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto inputs = load_inputs(config, false);
    const auto stage = pipeline::compute_returns(inputs.view(config));
    warn_all(err, stage.warnings);
    OutputDir dir(config.out, out);
    write_returns_outputs(stage, config, dir);
    return kOk;
}

int cmd_estimate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto inputs = load_inputs(config, true);
    const auto returns = pipeline::compute_returns(inputs.view(config));
    warn_all(err, returns.warnings);
    const auto estimation = pipeline::estimate(returns, config.levels);
    warn_all(err, estimation.warnings);
    OutputDir dir(config.out, out);
    write_estimate_outputs(estimation, config, dir);
    return kOk;
}

int cmd_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto inputs = load_inputs(config, true);
    const auto returns = pipeline::compute_returns(inputs.view(config));
    warn_all(err, returns.warnings);
    const auto estimation = pipeline::estimate(returns, config.levels);
    warn_all(err, estimation.warnings);
    const auto diagnostics = pipeline::diagnose(returns, estimation, config.max_lag, config.split);
    warn_all(err, diagnostics.warnings);
    OutputDir dir(config.out, out);
    write_diagnose_outputs(diagnostics, config, dir);
    return kOk;
}

int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto inputs = load_inputs(config, true);
    const auto returns = pipeline::compute_returns(inputs.view(config));
    warn_all(err, returns.warnings);
    const auto estimation = pipeline::estimate(returns, config.levels);
    warn_all(err, estimation.warnings);
    const auto diagnostics = pipeline::diagnose(returns, estimation, config.max_lag, config.split);
    warn_all(err, diagnostics.warnings);

    OutputDir dir(config.out, out);
    write_parse_outputs(returns.stocks, config, dir, out);
    write_returns_outputs(returns, config, dir);
    write_estimate_outputs(estimation, config, dir);
    write_diagnose_outputs(diagnostics, config, dir);

    std::string text;
    text += render_text("Stock beta estimates", report::stock_beta_table(estimation.stocks));
    text += render_text("Stock zero beta rate estimates",
                        report::stock_zero_beta_table(estimation.stocks));
    text += render_text(fmt::format("Portfolio beta estimate (n = {})", estimation.portfolio.n),
                        report::portfolio_beta_table(estimation.portfolio));
    text += render_text("Estimated zero beta rate",
                        report::portfolio_zero_beta_table(estimation.portfolio));
    text += render_text("Hypothesis tests", report::hypothesis_table(estimation.hypotheses));
    text += render_text("Residual diagnostics",
                        report::durbin_watson_table(diagnostics.residuals));
    for (const auto& segment : diagnostics.trends) {
        text += render_text(fmt::format("Trend {} to {} (adj. R-squared {})",
                                        format_date(segment.from), format_date(segment.to),
                                        report::format_number(segment.trend.adj_r_squared,
                                                              report::NumberStyle::Fixed4)),
                            report::trend_table(segment.trend, segment.label));
    }
    dir.write("report.txt", text);
    return kOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& /*err*/) {
    simulation::SimulationSpec spec;
    if (!config.spec.empty()) {
        const auto text = require_input(config.spec, "--spec");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidSpecError(fmt::format("'{}' is not valid JSON: {}", config.spec.string(),
                                               e.what()));
        }
        spec = simulation::spec_from_json(doc);
    } else {
        spec = simulation::spec_from_json(nlohmann::json::object());
    }
    if (config.seed) {
        spec.seed = *config.seed;
    }
    simulation::validate(spec);
    if (config.trials != 0 && config.trials < 100) {
        throw InvalidSpecError(fmt::format("--trials must be 0 or at least 100, got {}",
                                           config.trials));
    }

    std::vector<double> base_prices;
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        base_prices.push_back(100.0 + 50.0 * static_cast<double>(i));
    }

    OutputDir dir(config.out, out);
    dir.write("spec.json", simulation::spec_to_json(spec).dump(2) + "\n");
    dir.write("pricelist.txt", simulation::generate_pricelist(spec, base_prices));
    dir.write("index.txt", simulation::generate_index_list(spec, 800.0));
    dir.write("riskfree.csv", simulation::generate_risk_free_csv(spec));
    if (config.trials > 0) {
        const auto recovery = simulation::recovery_experiment(spec, config.trials, config.threads);
        dir.write("recovery", report::recovery_table(recovery), config.format);
    }
    return kOk;
}

std::optional<Date> date_flag(const std::string& text, std::string_view flag) {
    if (text.empty()) {
        return std::nullopt;
    }
    const auto date = parse_date(text);
    if (!date) {
        throw InvalidSpecError(fmt::format("{} expects YYYY-MM-DD, got '{}'", flag, text));
    }
    return date;
}

}  // namespace

std::vector<estimator::SignificanceLevel> parse_levels(const std::string& text) {
    std::vector<estimator::SignificanceLevel> levels;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item == "1") {
            levels.push_back(estimator::SignificanceLevel::OnePercent);
        } else if (item == "5") {
            levels.push_back(estimator::SignificanceLevel::FivePercent);
        } else if (item == "10") {
            levels.push_back(estimator::SignificanceLevel::TenPercent);
        } else {
            throw InvalidSpecError(
                fmt::format("--levels accepts a subset of 1,5,10; got '{}'", item));
        }
    }
    if (levels.empty()) {
        throw InvalidSpecError("--levels must name at least one level");
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"CAPM estimation toolkit: price-list parsing, returns, beta estimation, "
                 "residual diagnostics and simulation"};
    app.require_subcommand(1);

    RunConfig config;
    std::string from_text;
    std::string to_text;
    std::string split_text;
    std::string levels_text = "1,5,10";
    std::string format_text = "csv";
    std::uint64_t seed = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", config.input, "Daily price list (TICKER,YYYY-MM-DD,CLOSE[,VOLUME])");
        cmd->add_option("--out", config.out, "Output directory");
        cmd->add_option("--format", format_text, "Table format: csv or json");
        cmd->add_option("--from", from_text, "First date to use (YYYY-MM-DD)");
        cmd->add_option("--to", to_text, "Last date to use (YYYY-MM-DD)");
        cmd->add_flag("--strict", config.strict, "Fail on the first malformed line");
    };
    const auto add_market = [&](CLI::App* cmd) {
        cmd->add_option("--index", config.index, "Market index level list, one ticker");
        cmd->add_option("--riskfree", config.riskfree, "Risk-free CSV (YYYY-MM,annual_yield)");
        cmd->add_option("--dividends", config.dividends, "Dividend CSV (TICKER,YYYY-MM,amount)");
        cmd->add_option("--levels", levels_text, "Significance levels in percent, e.g. 1,5,10");
    };
    const auto add_diagnose = [&](CLI::App* cmd) {
        cmd->add_option("--max-lag", config.max_lag, "Largest ACF lag");
        cmd->add_option("--split", split_text,
                        "Last date of the first index trend segment (YYYY-MM-DD)");
    };

    auto* parse = app.add_subcommand("parse", "Parse a price list into a canonical panel");
    add_common(parse);
    auto* returns = app.add_subcommand("returns", "Monthly log and excess returns");
    add_common(returns);
    add_market(returns);
    auto* estimate = app.add_subcommand("estimate", "Per-stock and portfolio CAPM regressions");
    add_common(estimate);
    add_market(estimate);
    auto* diagnose = app.add_subcommand("diagnose", "Durbin-Watson, ACF and trend fits");
    add_common(diagnose);
    add_market(diagnose);
    add_diagnose(diagnose);
    auto* report_cmd = app.add_subcommand("report", "Run every stage and bundle the outputs");
    add_common(report_cmd);
    add_market(report_cmd);
    add_diagnose(report_cmd);
    auto* simulate = app.add_subcommand("simulate", "Synthetic fixtures and estimator recovery");
    simulate->add_option("--spec", config.spec, "Simulation spec (JSON)");
    simulate->add_option("--out", config.out, "Output directory");
    simulate->add_option("--format", format_text, "Table format: csv or json");
    auto* seed_option = simulate->add_option("--seed", seed, "Override the spec's seed");
    simulate->add_option("--trials", config.trials, "Recovery trials (0 skips, otherwise >= 100)");
    simulate->add_option("--threads", config.threads, "Worker threads (0 = hardware)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (format_text == "csv") {
            config.format = report::Format::Csv;
        } else if (format_text == "json") {
            config.format = report::Format::Json;
        } else {
            throw InvalidSpecError(fmt::format("--format must be csv or json, got '{}'", format_text));
        }
        config.from = date_flag(from_text, "--from");
        config.to = date_flag(to_text, "--to");
        config.split = date_flag(split_text, "--split");
        if (config.from && config.to && !(*config.from < *config.to)) {
            throw InvalidSpecError("--from must be earlier than --to");
        }
        config.levels = parse_levels(levels_text);
        if (config.max_lag < 1) {
            throw InvalidSpecError("--max-lag must be at least 1");
        }
        if (seed_option->count() > 0) {
            config.seed = seed;
        }

        if (parse->parsed()) {
            return cmd_parse(config, out, err);
        }
        if (returns->parsed()) {
            return cmd_returns(config, out, err);
        }
        if (estimate->parsed()) {
            return cmd_estimate(config, out, err);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(config, out, err);
        }
        if (report_cmd->parsed()) {
            return cmd_report(config, out, err);
        }
        if (simulate->parsed()) {
            return cmd_simulate(config, out, err);
        }
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ParseError& e) {
        err << "error: parse failed at " << e.what() << '\n';
        return kInputError;
    } catch (const ConflictError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const EmptyOverlapError& e) {
        err << "error: " << e.what() << '\n';
        return kEmptyOverlap;
    } catch (const InvalidSpecError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidSpec;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace capm::cli
