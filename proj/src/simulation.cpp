#include "capm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "capm/errors.hpp"
#include "capm/estimator.hpp"
#include "capm/pricelist.hpp"
#include "capm/rng.hpp"
#include "capm/special_functions.hpp"

namespace capm::simulation {

namespace {

constexpr std::string_view kIndexTicker = "ALSI";
constexpr std::uint64_t kVolumeStream = 0x9E3779B97F4A7C15ULL;

std::string default_ticker(std::size_t index) {
    const auto hi = static_cast<char>('A' + index / 26);
    const auto lo = static_cast<char>('A' + index % 26);
    return std::string("ST") + hi + lo;
}

std::vector<double> per_stock(const nlohmann::json& value, std::size_t n_stocks,
                              std::string_view field) {
    if (value.is_number()) {
        return std::vector<double>(n_stocks, value.get<double>());
    }
    if (!value.is_array()) {
        throw InvalidSpecError(fmt::format("{} must be a number or an array of numbers", field));
    }
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number()) {
            throw InvalidSpecError(fmt::format("{} must contain only numbers", field));
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::size_t count_field(const nlohmann::json& doc, const char* field, std::size_t fallback) {
    if (!doc.contains(field)) {
        return fallback;
    }
    const auto& value = doc.at(field);
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        throw InvalidSpecError(fmt::format("{} must be a non-negative integer", field));
    }
    return value.get<std::size_t>();
}

// Weekdays of a calendar month.
std::vector<Date> trading_days(Month month) {
    std::vector<Date> days;
    const auto last = static_cast<unsigned>(
        std::chrono::year_month_day_last{month.year(), std::chrono::month_day_last{month.month()}}
            .day());
    for (unsigned d = 1; d <= last; ++d) {
        const Date date{month.year(), month.month(), std::chrono::day{d}};
        if (is_weekday(date)) {
            days.push_back(date);
        }
    }
    return days;
}

// Monthly first-trading-day closes for a raw return path; closes[0] is the base.
std::vector<double> compound(double base, std::span<const double> raw_returns) {
    std::vector<double> closes{base};
    for (const double r : raw_returns) {
        closes.push_back(closes.back() * std::exp(r));
    }
    return closes;
}

struct DailyLine {
    Date date;
    std::size_t ticker;
    double close;
};

// Daily closes for one monthly path, interpolated inside each month.
void append_daily(const SimulationSpec& spec, std::span<const double> closes,
                  std::size_t ticker_index, std::vector<DailyLine>& out) {
    Month month = spec.start_month;
    for (std::size_t m = 0; m < closes.size(); ++m, month = next_month(month)) {
        const auto days = trading_days(month);
        const double next = m + 1 < closes.size() ? closes[m + 1] : closes[m];
        const double step = std::log(next / closes[m]) / static_cast<double>(days.size());
        for (std::size_t k = 0; k < days.size(); ++k) {
            const double close =
                k == 0 ? closes[m] : closes[m] * std::exp(step * static_cast<double>(k));
            out.push_back({days[k], ticker_index, close});
        }
    }
}

std::vector<double> raw_returns(const returns::ExcessReturnSeries& excess, double rf_monthly) {
    std::vector<double> raw;
    raw.reserve(excess.values.size());
    for (const double v : excess.values) {
        raw.push_back(v + rf_monthly);
    }
    return raw;
}

}  // namespace

SimulationSpec SimulationSpec::uniform(std::size_t n_stocks, std::size_t n_months, double beta,
                                       double alpha, double idio_sd, std::uint64_t seed) {
    SimulationSpec spec;
    spec.n_stocks = n_stocks;
    spec.n_months = n_months;
    spec.true_betas.assign(n_stocks, beta);
    spec.true_alphas.assign(n_stocks, alpha);
    spec.idio_sd.assign(n_stocks, idio_sd);
    spec.seed = seed;
    return spec;
}

std::vector<std::string> SimulationSpec::resolved_tickers() const {
    if (!tickers.empty()) {
        return tickers;
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n_stocks; ++i) {
        names.push_back(default_ticker(i));
    }
    return names;
}

void validate(const SimulationSpec& spec) {
    if (spec.n_stocks < 1) {
        throw InvalidSpecError("n_stocks must be at least 1");
    }
    if (spec.n_months < 3) {
        throw InvalidSpecError(fmt::format("n_months must be at least 3, got {}", spec.n_months));
    }
    if (!(spec.market_sd > 0.0) || !std::isfinite(spec.market_sd)) {
        throw InvalidSpecError("market_sd must be positive");
    }
    if (!std::isfinite(spec.market_mean)) {
        throw InvalidSpecError("market_mean must be finite");
    }
    if (!(spec.rf_annual > -1.0) || !std::isfinite(spec.rf_annual)) {
        throw InvalidSpecError("rf_annual must exceed -1");
    }
    const auto check_size = [&](const std::vector<double>& v, std::string_view field) {
        if (v.size() != spec.n_stocks) {
            throw InvalidSpecError(fmt::format("{} has {} entries for {} stocks", field, v.size(),
                                               spec.n_stocks));
        }
        if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
            throw InvalidSpecError(fmt::format("{} must be finite", field));
        }
    };
    check_size(spec.true_betas, "true_betas");
    check_size(spec.true_alphas, "true_alphas");
    check_size(spec.idio_sd, "idio_sd");
    if (std::any_of(spec.idio_sd.begin(), spec.idio_sd.end(), [](double s) { return s < 0.0; })) {
        throw InvalidSpecError("idio_sd must be non-negative");
    }
    if (spec.tickers.empty()) {
        if (spec.n_stocks > 26 * 26) {
            throw InvalidSpecError("more than 676 stocks need explicit tickers");
        }
    } else {
        if (spec.tickers.size() != spec.n_stocks) {
            throw InvalidSpecError("tickers must list one symbol per stock");
        }
        auto sorted = spec.tickers;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw InvalidSpecError("tickers must be unique");
        }
        for (const auto& t : spec.tickers) {
            if (!pricelist::is_valid_ticker(t) || t == kIndexTicker) {
                throw InvalidSpecError(fmt::format("invalid ticker '{}'", t));
            }
        }
    }
    if (!spec.start_month.ok()) {
        throw InvalidSpecError("start_month is not a valid month");
    }
}

SimulationSpec spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw InvalidSpecError("simulation spec must be a JSON object");
    }
    SimulationSpec spec;
    try {
        spec.n_stocks = count_field(doc, "n_stocks", spec.n_stocks);
        spec.n_months = count_field(doc, "n_months", spec.n_months);
        spec.market_mean = doc.value("market_mean", spec.market_mean);
        spec.market_sd = doc.value("market_sd", spec.market_sd);
        spec.rf_annual = doc.value("rf_annual", spec.rf_annual);
        spec.seed = doc.value("seed", spec.seed);
        if (doc.contains("start_month")) {
            const auto text = doc.at("start_month").get<std::string>();
            const auto month = parse_month(text);
            if (!month) {
                throw InvalidSpecError(fmt::format("start_month '{}' is not YYYY-MM", text));
            }
            spec.start_month = *month;
        }
        if (doc.contains("tickers")) {
            spec.tickers = doc.at("tickers").get<std::vector<std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSpecError(fmt::format("simulation spec: {}", e.what()));
    }
    spec.true_betas = doc.contains("true_betas")
                          ? per_stock(doc.at("true_betas"), spec.n_stocks, "true_betas")
                          : std::vector<double>(spec.n_stocks, 1.0);
    spec.true_alphas = doc.contains("true_alphas")
                           ? per_stock(doc.at("true_alphas"), spec.n_stocks, "true_alphas")
                           : std::vector<double>(spec.n_stocks, 0.0);
    spec.idio_sd = doc.contains("idio_sd") ? per_stock(doc.at("idio_sd"), spec.n_stocks, "idio_sd")
                                           : std::vector<double>(spec.n_stocks, 0.04);
    return spec;
}

nlohmann::json spec_to_json(const SimulationSpec& spec) {
    return nlohmann::json{{"n_stocks", spec.n_stocks},
                          {"n_months", spec.n_months},
                          {"true_betas", spec.true_betas},
                          {"true_alphas", spec.true_alphas},
                          {"market_mean", spec.market_mean},
                          {"market_sd", spec.market_sd},
                          {"idio_sd", spec.idio_sd},
                          {"rf_annual", spec.rf_annual},
                          {"seed", spec.seed},
                          {"start_month", format_month(spec.start_month)},
                          {"tickers", spec.resolved_tickers()}};
}

SimulatedMarket generate_market(const SimulationSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    const auto tickers = spec.resolved_tickers();

    SimulatedMarket out;
    out.rf_monthly = returns::deannualize(spec.rf_annual);
    out.market.name = std::string(returns::kMarketName);
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        out.stocks.push_back({tickers[i], {}, {}, {}});
    }

    Month month = spec.start_month;
    for (std::size_t t = 0; t < spec.n_months; ++t) {
        month = next_month(month);
        const double market = rng.normal(spec.market_mean, spec.market_sd);
        out.market.periods.push_back(month);
        out.market.values.push_back(market);
        for (std::size_t i = 0; i < spec.n_stocks; ++i) {
            const double noise = spec.idio_sd[i] * rng.normal();
            out.stocks[i].periods.push_back(month);
            out.stocks[i].values.push_back(spec.true_alphas[i] + spec.true_betas[i] * market +
                                           noise);
        }
    }
    return out;
}

std::string generate_pricelist(const SimulationSpec& spec, std::span<const double> base_prices) {
    const auto market = generate_market(spec);
    if (base_prices.size() != spec.n_stocks) {
        throw InvalidSpecError(fmt::format("need {} base prices, got {}", spec.n_stocks,
                                           base_prices.size()));
    }
    std::vector<DailyLine> lines;
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        if (!(base_prices[i] > 0.0)) {
            throw InvalidSpecError("base prices must be positive");
        }
        const auto closes = compound(base_prices[i], raw_returns(market.stocks[i], market.rf_monthly));
        append_daily(spec, closes, i, lines);
    }
    std::stable_sort(lines.begin(), lines.end(), [](const DailyLine& a, const DailyLine& b) {
        return a.date < b.date;
    });

    Rng volumes(spec.seed ^ kVolumeStream);
    std::string text = fmt::format("# synthetic daily price list, seed {}\n", spec.seed);
    for (const auto& line : lines) {
        const pricelist::PriceRecord record{market.stocks[line.ticker].name, line.date, line.close,
                                            static_cast<std::int64_t>(100 + volumes.next_u64() % 9901)};
        text += pricelist::format_record(record);
        text += '\n';
    }
    return text;
}

std::string generate_index_list(const SimulationSpec& spec, double base_level) {
    if (!(base_level > 0.0)) {
        throw InvalidSpecError("index base level must be positive");
    }
    const auto market = generate_market(spec);
    const auto closes = compound(base_level, raw_returns(market.market, market.rf_monthly));
    std::vector<DailyLine> lines;
    append_daily(spec, closes, 0, lines);

    std::string text = fmt::format("# synthetic market index, seed {}\n", spec.seed);
    for (const auto& line : lines) {
        text += pricelist::format_record({std::string(kIndexTicker), line.date, line.close, {}});
        text += '\n';
    }
    return text;
}

std::string generate_risk_free_csv(const SimulationSpec& spec) {
    validate(spec);
    std::string text = "# month,annual_yield\n";
    Month month = spec.start_month;
    for (std::size_t m = 0; m <= spec.n_months; ++m, month = next_month(month)) {
        text += fmt::format("{},{}\n", format_month(month), spec.rf_annual);
    }
    return text;
}

RecoveryReport recovery_experiment(const SimulationSpec& spec, std::size_t trials,
                                   std::size_t threads) {
    validate(spec);
    if (trials < 100) {
        throw InvalidSpecError(fmt::format("recovery needs at least 100 trials, got {}", trials));
    }
    const std::size_t n_series = spec.n_stocks + 1;  // stocks, then the portfolio

    struct Fit {
        double beta, se_beta, alpha, se_alpha;
    };
    std::vector<Fit> fits(trials * n_series);

    const auto run_trial = [&](std::size_t trial) {
        SimulationSpec trial_spec = spec;
        trial_spec.seed = spec.seed + trial;
        const auto market = generate_market(trial_spec);
        for (std::size_t i = 0; i < spec.n_stocks; ++i) {
            const auto fit = estimator::estimate_stock_capm(market.stocks[i], market.market);
            fits[trial * n_series + i] = {fit.slope, fit.se_slope, fit.intercept, fit.se_intercept};
        }
        const auto portfolio = returns::portfolio_excess(market.stocks);
        const auto fit = estimator::estimate_portfolio_capm(portfolio, market.market);
        fits[trial * n_series + spec.n_stocks] = {fit.slope, fit.se_slope, fit.intercept,
                                                  fit.se_intercept};
    };

    std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = std::min(workers, trials);
    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t trial = w; trial < trials; trial += workers) {
                        run_trial(trial);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    const auto df = static_cast<double>(spec.n_months - 2);
    const double t_crit = special::student_t_quantile(0.975, df);
    const auto tickers = spec.resolved_tickers();

    RecoveryReport report;
    report.trials = trials;
    report.n = spec.n_months;
    report.degenerate = std::all_of(spec.idio_sd.begin(), spec.idio_sd.end(),
                                    [](double s) { return s == 0.0; });

    const auto summarize = [&](std::size_t series, const std::string& name, bool beta,
                               double truth) {
        ParameterRecovery p{name, beta ? "beta" : "alpha", truth, 0.0, 0.0, 0.0, 0.0};
        double sum = 0.0;
        std::size_t covered = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const auto& f = fits[trial * n_series + series];
            const double estimate = beta ? f.beta : f.alpha;
            const double se = beta ? f.se_beta : f.se_alpha;
            if (std::fabs(estimate - truth) <= t_crit * se) {
                ++covered;
            }
            sum += estimate;
            p.mean_se += se;
        }
        const auto count = static_cast<double>(trials);
        const double mean = sum / count;
        double ss = 0.0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const auto& f = fits[trial * n_series + series];
            const double d = (beta ? f.beta : f.alpha) - mean;
            ss += d * d;
        }
        p.coverage = static_cast<double>(covered) / count;
        p.mean_bias = mean - truth;
        p.mean_se /= count;
        p.sd_estimate = std::sqrt(ss / (count - 1.0));
        return p;
    };

    double mean_beta = 0.0;
    double mean_alpha = 0.0;
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        report.parameters.push_back(summarize(i, tickers[i], true, spec.true_betas[i]));
        report.parameters.push_back(summarize(i, tickers[i], false, spec.true_alphas[i]));
        mean_beta += spec.true_betas[i];
        mean_alpha += spec.true_alphas[i];
    }
    mean_beta /= static_cast<double>(spec.n_stocks);
    mean_alpha /= static_cast<double>(spec.n_stocks);
    const std::string portfolio(returns::kPortfolioName);
    report.parameters.push_back(summarize(spec.n_stocks, portfolio, true, mean_beta));
    report.parameters.push_back(summarize(spec.n_stocks, portfolio, false, mean_alpha));
    return report;
}

}  // namespace capm::simulation
