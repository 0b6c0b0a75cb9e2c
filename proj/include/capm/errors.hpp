#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace capm {

/// Malformed input line in strict parsing mode. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& reason);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

/// Two records for the same (ticker, date) disagree on the close.
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Regression with fewer than three observations.
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Regression against a constant regressor; the slope is undefined.
class DegenerateRegressorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A statistic whose denominator vanishes (all-zero residuals, constant series).
class UndefinedStatisticError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input file content that parses but cannot be used (e.g. an index file with
/// several tickers).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two series share no period.
class EmptyOverlapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulation or run configuration that violates its invariants.
class InvalidSpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace capm
