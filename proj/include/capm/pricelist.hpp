#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capm/date.hpp"

namespace capm::pricelist {

/// One daily close for one ticker.
///
/// Invariants: close > 0, ticker matches `[A-Z]{2,6}`, date is a valid calendar date.
struct PriceRecord {
    std::string ticker;
    Date date;
    double close = 0.0;
    std::optional<std::int64_t> volume;

    friend bool operator==(const PriceRecord&, const PriceRecord&) = default;
};

struct RejectedLine {
    std::size_t line = 0;
    std::string reason;
};

struct DuplicateKey {
    std::string ticker;
    Date date;
};

/// Outcome of a lenient parse. `accepted + rejected.size()` equals the number of
/// data lines (input lines that are neither blank nor `#` comments).
struct ParseReport {
    std::size_t accepted = 0;
    std::vector<RejectedLine> rejected;
    std::vector<DuplicateKey> duplicates;
};

struct ParseResult {
    std::vector<PriceRecord> records;
    ParseReport report;
};

/// Parses newline-delimited `TICKER,YYYY-MM-DD,CLOSE[,VOLUME]` lines.
///
/// Blank lines and lines starting with `#` are skipped. CLOSE is a plain decimal
/// (no thousands separators, no exponent). In strict mode the first malformed line
/// throws capm::ParseError; otherwise it is recorded in the report and skipped.
[[nodiscard]] ParseResult parse_price_list(std::string_view text, bool strict);

/// Canonical line for a record, without trailing newline.
[[nodiscard]] std::string format_record(const PriceRecord& record);

/// Canonical text, one line per record in the given order.
[[nodiscard]] std::string serialize(std::span<const PriceRecord> records);

[[nodiscard]] bool is_valid_ticker(std::string_view ticker);

/// Date-by-ticker grid of closes. Missing trades are empty cells, never zero.
class PricePanel {
public:
    PricePanel() = default;
    PricePanel(std::vector<std::string> tickers, std::vector<Date> dates,
               std::vector<std::vector<std::optional<double>>> values);

    [[nodiscard]] const std::vector<std::string>& tickers() const noexcept { return tickers_; }
    [[nodiscard]] const std::vector<Date>& dates() const noexcept { return dates_; }

    /// values()[ticker_index][date_index]
    [[nodiscard]] const std::vector<std::vector<std::optional<double>>>& values() const noexcept {
        return values_;
    }

    [[nodiscard]] std::optional<double> at(std::size_t ticker_index,
                                           std::size_t date_index) const {
        return values_.at(ticker_index).at(date_index);
    }

    [[nodiscard]] std::optional<std::size_t> find_ticker(std::string_view ticker) const;
    [[nodiscard]] std::size_t present_count() const;

    /// Present cells as records ordered by date, then ticker.
    [[nodiscard]] std::vector<PriceRecord> to_records() const;

    friend bool operator==(const PricePanel&, const PricePanel&) = default;

private:
    std::vector<std::string> tickers_;
    std::vector<Date> dates_;
    std::vector<std::vector<std::optional<double>>> values_;
};

/// Assembles records (any order, possibly duplicated) into a panel with sorted
/// tickers and strictly increasing dates. Identical duplicates collapse; a
/// duplicate with a different close throws capm::ConflictError.
[[nodiscard]] PricePanel build_panel(std::span<const PriceRecord> records);

struct TickerGaps {
    std::string ticker;
    std::vector<Month> months;
};

struct MonthCoverage {
    Month month;
    double coverage = 0.0;
};

struct ValidationReport {
    /// present cells / (tickers x dates); 1.0 for an empty panel.
    double coverage = 1.0;
    /// Every calendar month from the first to the last panel date.
    std::vector<MonthCoverage> monthly;
    /// Only tickers with at least one gap month are listed.
    std::vector<TickerGaps> gaps;
};

[[nodiscard]] ValidationReport validate_panel(const PricePanel& panel);

}  // namespace capm::pricelist
