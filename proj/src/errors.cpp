#include "capm/errors.hpp"

#include <fmt/format.h>

namespace capm {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& reason)
    : std::runtime_error(fmt::format("line {}, column {}: {}", line, column, reason)),
      line_(line),
      column_(column),
      reason_(reason) {}

}  // namespace capm
