#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "capm/date.hpp"
#include "capm/returns.hpp"

namespace capm::simulation {

/// Ground truth for a synthetic market where
///   R_mt ~ N(market_mean, market_sd)
///   R_it = alpha_i + beta_i * R_mt + e_it,  e_it ~ N(0, idio_sd_i).
///
/// `n_months` counts monthly return observations; the generated price lists
/// span n_months + 1 months starting at `start_month`.
struct SimulationSpec {
    std::size_t n_stocks = 10;
    std::size_t n_months = 32;
    std::vector<double> true_betas;   ///< one per stock
    std::vector<double> true_alphas;  ///< one per stock
    double market_mean = 0.005;
    double market_sd = 0.06;
    std::vector<double> idio_sd;      ///< one per stock
    double rf_annual = 0.0;
    std::uint64_t seed = 42;
    Month start_month{std::chrono::year{2007}, std::chrono::March};
    std::vector<std::string> tickers;  ///< empty: STAA, STAB, ...

    /// Spec with every stock sharing the same beta, alpha and idiosyncratic sd.
    [[nodiscard]] static SimulationSpec uniform(std::size_t n_stocks, std::size_t n_months,
                                                double beta, double alpha, double idio_sd,
                                                std::uint64_t seed);

    [[nodiscard]] std::vector<std::string> resolved_tickers() const;
};

/// Throws capm::InvalidSpecError describing the first violated invariant.
void validate(const SimulationSpec& spec);

/// Accepts scalars for true_betas, true_alphas and idio_sd (broadcast to every
/// stock). Missing fields keep their defaults; betas default to 1, alphas to 0,
/// idio_sd to 0.04. Throws capm::InvalidSpecError on type errors.
[[nodiscard]] SimulationSpec spec_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json spec_to_json(const SimulationSpec& spec);

struct SimulatedMarket {
    returns::ExcessReturnSeries market;
    std::vector<returns::ExcessReturnSeries> stocks;
    double rf_monthly = 0.0;
};

/// Deterministic in the spec (including the seed).
[[nodiscard]] SimulatedMarket generate_market(const SimulationSpec& spec);

/// Daily price list in the parser grammar. Month m's first weekday closes at
/// P_m = P_{m-1} exp(r_m) with r_m = R_m + r_f; other weekdays interpolate
/// geometrically toward the next month's close. Prices are written at full
/// round-trip precision.
[[nodiscard]] std::string generate_pricelist(const SimulationSpec& spec,
                                             std::span<const double> base_prices);

/// The market index as a single-ticker price list (ticker ALSI).
[[nodiscard]] std::string generate_index_list(const SimulationSpec& spec, double base_level);

/// `YYYY-MM,annual_yield` for every month the price lists span.
[[nodiscard]] std::string generate_risk_free_csv(const SimulationSpec& spec);

struct ParameterRecovery {
    std::string series;     ///< ticker or PORTFOLIO
    std::string parameter;  ///< "beta" or "alpha"
    double truth = 0.0;
    double coverage = 0.0;  ///< fraction of 95% CIs containing the truth
    double mean_bias = 0.0;
    double mean_se = 0.0;
    double sd_estimate = 0.0;  ///< sampling sd of the estimate across trials
};

struct RecoveryReport {
    std::size_t trials = 0;
    std::size_t n = 0;  ///< regression sample size per trial
    /// Every fit was exact (idio_sd = 0), so coverage carries no information.
    bool degenerate = false;
    std::vector<ParameterRecovery> parameters;
};

/// Runs `trials` independent markets (trial k uses seed + k) and fits every stock
/// and the equal-weighted portfolio. `threads` = 0 picks the hardware concurrency;
/// the report is identical for any thread count. Requires trials >= 100.
[[nodiscard]] RecoveryReport recovery_experiment(const SimulationSpec& spec, std::size_t trials,
                                                 std::size_t threads = 0);

}  // namespace capm::simulation
