#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace capm {

using Date = std::chrono::year_month_day;
using Month = std::chrono::year_month;

/// Parses `YYYY-MM-DD`. Returns nullopt for malformed text or an invalid calendar date.
[[nodiscard]] std::optional<Date> parse_date(std::string_view text);

/// Parses `YYYY-MM`.
[[nodiscard]] std::optional<Month> parse_month(std::string_view text);

[[nodiscard]] std::string format_date(Date date);
[[nodiscard]] std::string format_month(Month month);

[[nodiscard]] inline Month month_of(Date date) { return Month{date.year(), date.month()}; }

[[nodiscard]] inline Month next_month(Month month) { return month + std::chrono::months{1}; }

/// Monday to Friday.
[[nodiscard]] bool is_weekday(Date date);

}  // namespace capm
