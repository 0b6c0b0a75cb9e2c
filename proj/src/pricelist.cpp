#include "capm/pricelist.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <variant>

#include <fmt/format.h>

#include "capm/errors.hpp"

namespace capm::pricelist {

namespace {

struct Field {
    std::string_view text;
    std::size_t column;  // 1-based, relative to the raw line
};

struct LineError {
    std::size_t column;
    std::string reason;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// -?[0-9]+(\.[0-9]+)?
bool is_plain_decimal(std::string_view s) {
    if (!s.empty() && s.front() == '-') {
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) {
        return all_digits(s);
    }
    return all_digits(s.substr(0, dot)) && all_digits(s.substr(dot + 1));
}

std::variant<PriceRecord, LineError> parse_line(std::string_view line, std::size_t offset) {
    std::vector<Field> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string_view::npos ? line.size() : comma;
        fields.push_back({line.substr(start, end - start), offset + start + 1});
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (fields.size() < 3 || fields.size() > 4) {
        return LineError{offset + 1, fmt::format("expected 3 or 4 comma-separated fields, found {}",
                                                 fields.size())};
    }

    PriceRecord record;
    if (!is_valid_ticker(fields[0].text)) {
        return LineError{fields[0].column, fmt::format("invalid ticker '{}'", fields[0].text)};
    }
    record.ticker = std::string(fields[0].text);

    const auto date = parse_date(fields[1].text);
    if (!date) {
        return LineError{fields[1].column, fmt::format("invalid date '{}'", fields[1].text)};
    }
    record.date = *date;

    const auto price_text = fields[2].text;
    if (!is_plain_decimal(price_text)) {
        return LineError{fields[2].column, fmt::format("malformed price '{}'", price_text)};
    }
    const auto [ptr, ec] =
        std::from_chars(price_text.data(), price_text.data() + price_text.size(), record.close);
    if (ec != std::errc{} || ptr != price_text.data() + price_text.size()) {
        return LineError{fields[2].column, fmt::format("malformed price '{}'", price_text)};
    }
    if (!(record.close > 0.0)) {
        return LineError{fields[2].column, "non-positive price"};
    }

    if (fields.size() == 4) {
        const auto volume_text = fields[3].text;
        if (!volume_text.empty() && volume_text.front() == '-' &&
            all_digits(volume_text.substr(1))) {
            return LineError{fields[3].column, "negative volume"};
        }
        std::int64_t volume = 0;
        const auto [vptr, vec] = std::from_chars(
            volume_text.data(), volume_text.data() + volume_text.size(), volume);
        if (!all_digits(volume_text) || vec != std::errc{} ||
            vptr != volume_text.data() + volume_text.size()) {
            return LineError{fields[3].column, fmt::format("malformed volume '{}'", volume_text)};
        }
        record.volume = volume;
    }
    return record;
}

}  // namespace

bool is_valid_ticker(std::string_view ticker) {
    return ticker.size() >= 2 && ticker.size() <= 6 &&
           std::all_of(ticker.begin(), ticker.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

ParseResult parse_price_list(std::string_view text, bool strict) {
    ParseResult result;
    std::set<std::pair<std::string, Date>> seen;

    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto newline = text.find('\n', pos);
        const auto end = newline == std::string_view::npos ? text.size() : newline;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_number;

        std::size_t offset = 0;
        while (!line.empty() && is_space(line.front())) {
            line.remove_prefix(1);
            ++offset;
        }
        while (!line.empty() && is_space(line.back())) {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }

        auto parsed = parse_line(line, offset);
        if (auto* error = std::get_if<LineError>(&parsed)) {
            if (strict) {
                throw ParseError(line_number, error->column, error->reason);
            }
            result.report.rejected.push_back({line_number, std::move(error->reason)});
            continue;
        }
        auto& record = std::get<PriceRecord>(parsed);
        if (!seen.emplace(record.ticker, record.date).second) {
            result.report.duplicates.push_back({record.ticker, record.date});
        }
        result.records.push_back(std::move(record));
        ++result.report.accepted;
    }
    return result;
}

std::string format_record(const PriceRecord& record) {
    char buffer[64];
    const auto res = std::to_chars(buffer, buffer + sizeof buffer, record.close,
                                   std::chars_format::fixed);
    std::string line = fmt::format("{},{},{}", record.ticker, format_date(record.date),
                                   std::string_view(buffer, res.ptr - buffer));
    if (record.volume) {
        line += fmt::format(",{}", *record.volume);
    }
    return line;
}

std::string serialize(std::span<const PriceRecord> records) {
    std::string out;
    for (const auto& record : records) {
        out += format_record(record);
        out += '\n';
    }
    return out;
}

PricePanel::PricePanel(std::vector<std::string> tickers, std::vector<Date> dates,
                       std::vector<std::vector<std::optional<double>>> values)
    : tickers_(std::move(tickers)), dates_(std::move(dates)), values_(std::move(values)) {
    if (values_.size() != tickers_.size()) {
        throw std::invalid_argument("PricePanel: one value row per ticker required");
    }
    for (const auto& row : values_) {
        if (row.size() != dates_.size()) {
            throw std::invalid_argument("PricePanel: one cell per date required");
        }
        for (const auto& cell : row) {
            if (cell && !(*cell > 0.0)) {
                throw std::invalid_argument("PricePanel: present values must be positive");
            }
        }
    }
    if (std::adjacent_find(dates_.begin(), dates_.end(),
                           [](Date a, Date b) { return !(a < b); }) != dates_.end()) {
        throw std::invalid_argument("PricePanel: dates must be strictly increasing");
    }
}

std::optional<std::size_t> PricePanel::find_ticker(std::string_view ticker) const {
    const auto it = std::find(tickers_.begin(), tickers_.end(), ticker);
    if (it == tickers_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - tickers_.begin());
}

std::size_t PricePanel::present_count() const {
    std::size_t count = 0;
    for (const auto& row : values_) {
        count += static_cast<std::size_t>(
            std::count_if(row.begin(), row.end(), [](const auto& v) { return v.has_value(); }));
    }
    return count;
}

std::vector<PriceRecord> PricePanel::to_records() const {
    std::vector<PriceRecord> records;
    for (std::size_t d = 0; d < dates_.size(); ++d) {
        for (std::size_t t = 0; t < tickers_.size(); ++t) {
            if (values_[t][d]) {
                records.push_back({tickers_[t], dates_[d], *values_[t][d], std::nullopt});
            }
        }
    }
    return records;
}

PricePanel build_panel(std::span<const PriceRecord> records) {
    std::map<std::pair<std::string, Date>, double> cells;
    std::set<std::string> tickers;
    std::set<Date> dates;
    for (const auto& record : records) {
        auto [it, inserted] = cells.emplace(std::pair{record.ticker, record.date}, record.close);
        if (!inserted && it->second != record.close) {
            throw ConflictError(fmt::format("conflicting closes for {} on {}: {} vs {}",
                                            record.ticker, format_date(record.date), it->second,
                                            record.close));
        }
        tickers.insert(record.ticker);
        dates.insert(record.date);
    }

    std::vector<std::string> ticker_list(tickers.begin(), tickers.end());
    std::vector<Date> date_list(dates.begin(), dates.end());
    std::vector<std::vector<std::optional<double>>> values(
        ticker_list.size(), std::vector<std::optional<double>>(date_list.size()));
    for (const auto& [key, close] : cells) {
        const auto t = static_cast<std::size_t>(
            std::lower_bound(ticker_list.begin(), ticker_list.end(), key.first) -
            ticker_list.begin());
        const auto d = static_cast<std::size_t>(
            std::lower_bound(date_list.begin(), date_list.end(), key.second) -
            date_list.begin());
        values[t][d] = close;
    }
    return PricePanel(std::move(ticker_list), std::move(date_list), std::move(values));
}

ValidationReport validate_panel(const PricePanel& panel) {
    ValidationReport report;
    const auto& dates = panel.dates();
    const auto& tickers = panel.tickers();
    if (dates.empty() || tickers.empty()) {
        return report;
    }
    report.coverage = static_cast<double>(panel.present_count()) /
                      static_cast<double>(tickers.size() * dates.size());

    std::vector<Month> months;
    for (Month m = month_of(dates.front()); m <= month_of(dates.back()); m = next_month(m)) {
        months.push_back(m);
    }

    // present[ticker][month], cells[month]
    std::vector<std::vector<std::size_t>> present(tickers.size(),
                                                  std::vector<std::size_t>(months.size(), 0));
    std::vector<std::size_t> cells(months.size(), 0);
    std::size_t m = 0;
    for (std::size_t d = 0; d < dates.size(); ++d) {
        while (months[m] != month_of(dates[d])) {
            ++m;
        }
        cells[m] += tickers.size();
        for (std::size_t t = 0; t < tickers.size(); ++t) {
            if (panel.at(t, d)) {
                ++present[t][m];
            }
        }
    }

    for (std::size_t i = 0; i < months.size(); ++i) {
        std::size_t month_present = 0;
        for (std::size_t t = 0; t < tickers.size(); ++t) {
            month_present += present[t][i];
        }
        const double coverage =
            cells[i] == 0 ? 0.0 : static_cast<double>(month_present) / static_cast<double>(cells[i]);
        report.monthly.push_back({months[i], coverage});
    }
    for (std::size_t t = 0; t < tickers.size(); ++t) {
        TickerGaps gaps{tickers[t], {}};
        for (std::size_t i = 0; i < months.size(); ++i) {
            if (present[t][i] == 0) {
                gaps.months.push_back(months[i]);
            }
        }
        if (!gaps.months.empty()) {
            report.gaps.push_back(std::move(gaps));
        }
    }
    return report;
}

}  // namespace capm::pricelist
