#include "capm/date.hpp"

#include <charconv>

#include <fmt/format.h>

namespace capm {

namespace {

std::optional<int> parse_fixed_digits(std::string_view text) {
    int value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    const auto y = parse_fixed_digits(text.substr(0, 4));
    const auto m = parse_fixed_digits(text.substr(5, 2));
    const auto d = parse_fixed_digits(text.substr(8, 2));
    if (!y || !m || !d) {
        return std::nullopt;
    }
    const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::optional<Month> parse_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') {
        return std::nullopt;
    }
    const auto y = parse_fixed_digits(text.substr(0, 4));
    const auto m = parse_fixed_digits(text.substr(5, 2));
    if (!y || !m) {
        return std::nullopt;
    }
    const Month month{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)}};
    if (!month.ok()) {
        return std::nullopt;
    }
    return month;
}

std::string format_date(Date date) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                       static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

std::string format_month(Month month) {
    return fmt::format("{:04d}-{:02d}", static_cast<int>(month.year()),
                       static_cast<unsigned>(month.month()));
}

bool is_weekday(Date date) {
    const std::chrono::weekday wd{std::chrono::sys_days{date}};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

}  // namespace capm
