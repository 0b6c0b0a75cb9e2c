#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "capm/date.hpp"
#include "capm/estimator.hpp"
#include "capm/report.hpp"

namespace capm::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,          ///< bad flags or an unexpected failure
    kIoError = 2,        ///< missing or unreadable input, unwritable output
    kInputError = 3,     ///< strict-parse failure or unusable input content
    kEmptyOverlap = 4,   ///< inputs share too few months to estimate
    kInvalidSpec = 5     ///< invalid run configuration or simulation spec
};

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path index;
    std::filesystem::path riskfree;
    std::filesystem::path dividends;
    std::optional<Date> from;
    std::optional<Date> to;
    std::optional<Date> split;
    std::filesystem::path out = "out";
    report::Format format = report::Format::Csv;
    bool strict = false;
    std::vector<estimator::SignificanceLevel> levels{std::begin(estimator::kAllLevels),
                                                     std::end(estimator::kAllLevels)};
    std::size_t max_lag = 10;
    std::optional<std::uint64_t> seed;
    std::filesystem::path spec;
    std::size_t trials = 1000;
    std::size_t threads = 0;
};

/// Parses `1,5,10` style percentages. Throws capm::InvalidSpecError.
[[nodiscard]] std::vector<estimator::SignificanceLevel> parse_levels(const std::string& text);

/// Runs one subcommand; args[0] is the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace capm::cli
