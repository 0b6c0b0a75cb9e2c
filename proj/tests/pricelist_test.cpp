#include <algorithm>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "capm/errors.hpp"
#include "capm/pricelist.hpp"
#include "test_util.hpp"

using namespace capm;
using namespace capm::pricelist;
using namespace std::chrono;

namespace {

Date d(int y, unsigned m, unsigned day) { return Date{year{y}, month{m}, std::chrono::day{day}}; }

PriceRecord rec(std::string ticker, Date date, double close) {
    return PriceRecord{std::move(ticker), date, close, std::nullopt};
}

}  // namespace

TEST(ParsePriceList, SingleRecordWithVolume) {
    const auto result = parse_price_list("BATU,2007-03-01,1150,200\n", false);
    ASSERT_EQ(result.records.size(), 1u);
    EXPECT_EQ(result.records[0], (PriceRecord{"BATU", d(2007, 3, 1), 1150.0, 200}));
    EXPECT_EQ(result.report.accepted, 1u);
    EXPECT_TRUE(result.report.rejected.empty());
}

TEST(ParsePriceList, NonPositivePriceIsRejected) {
    const auto result = parse_price_list("BATU,2007-03-01,-5,0\n", false);
    EXPECT_TRUE(result.records.empty());
    ASSERT_EQ(result.report.rejected.size(), 1u);
    EXPECT_EQ(result.report.rejected[0].line, 1u);
    EXPECT_EQ(result.report.rejected[0].reason, "non-positive price");

    EXPECT_EQ(parse_price_list("BATU,2007-03-01,0\n", false).report.rejected[0].reason,
              "non-positive price");
}

TEST(ParsePriceList, EmptyInputIsEmptyResult) {
    for (const bool strict : {false, true}) {
        const auto result = parse_price_list("", strict);
        EXPECT_TRUE(result.records.empty());
        EXPECT_EQ(result.report.accepted, 0u);
        EXPECT_TRUE(result.report.rejected.empty());
    }
}

TEST(ParsePriceList, SkipsCommentsBlankLinesAndCarriageReturns) {
    const auto result =
        parse_price_list("# header\r\n\r\n  \nKA,2008-01-02,12.5\r\n# trailing\n", true);
    ASSERT_EQ(result.records.size(), 1u);
    EXPECT_EQ(result.records[0], rec("KA", d(2008, 1, 2), 12.5));
}

TEST(ParsePriceList, RejectsMalformedFields) {
    const char* bad[] = {
        "batu,2007-03-01,10",        // lowercase ticker
        "B,2007-03-01,10",           // too short
        "ABCDEFG,2007-03-01,10",     // too long
        "BATU,2007-02-30,10",        // no such day
        "BATU,07-03-01,10",          // short year
        "BATU,2007-03-01,1,150",     // unquoted separator: close 1, volume 150
        "BATU,2007-03-01,\"1,150\"", // quoted separator
        "BATU,2007-03-01,1e3",       // exponent
        "BATU,2007-03-01,12.",       // dangling point
        "BATU,2007-03-01,10,-1",     // negative volume
        "BATU,2007-03-01,10,1.5",    // fractional volume
        "BATU,2007-03-01",           // too few fields
        "BATU,2007-03-01,10,1,2",    // too many fields
        "BATU,2007-03-01,nan",
        "BATU,2007-03-01,inf",
    };
    std::size_t expected_rejections = 0;
    for (const char* line : bad) {
        const auto result = parse_price_list(line, false);
        if (std::string(line) == "BATU,2007-03-01,1,150") {
            EXPECT_EQ(result.records.size(), 1u);
            continue;
        }
        ++expected_rejections;
        EXPECT_TRUE(result.records.empty()) << line;
        EXPECT_EQ(result.report.rejected.size(), 1u) << line;
    }
    EXPECT_EQ(expected_rejections, std::size(bad) - 1);
}

TEST(ParsePriceList, StrictModeReportsLineAndColumn) {
    const std::string text = "BATU,2007-03-01,10\n\n# c\nBATU,2007-03-02,abc\n";
    try {
        (void)parse_price_list(text, true);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.column(), 17u);
        EXPECT_NE(e.reason().find("malformed price"), std::string::npos);
    }
}

TEST(ParsePriceList, LenientModeAccountsForEveryDataLine) {
    std::mt19937_64 gen(7);
    const std::string pieces[] = {"BATU", "KA", "x", "2007-03-01", "2007-13-01", "10", "-1", "0.5",
                                  "",     ",",  "#", "12",         "abc"};
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        std::size_t data_lines = 0;
        const int lines = static_cast<int>(gen() % 12);
        for (int l = 0; l < lines; ++l) {
            std::string line;
            const int parts = static_cast<int>(gen() % 6);
            for (int p = 0; p < parts; ++p) {
                if (p > 0) {
                    line += ',';
                }
                line += pieces[gen() % std::size(pieces)];
            }
            const auto first = line.find_first_not_of(" \t");
            if (first != std::string::npos && line[first] != '#') {
                ++data_lines;
            }
            text += line + "\n";
        }
        ParseResult result;
        ASSERT_NO_THROW(result = parse_price_list(text, false)) << text;
        EXPECT_EQ(result.report.accepted + result.report.rejected.size(), data_lines) << text;
        EXPECT_EQ(result.report.accepted, result.records.size());
        for (const auto& r : result.records) {
            EXPECT_GT(r.close, 0.0);
            EXPECT_TRUE(is_valid_ticker(r.ticker));
        }
    }
}

TEST(ParsePriceList, SerializeRoundTrip) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> price(0.01, 5000.0);
    std::vector<PriceRecord> records;
    for (int i = 0; i < 500; ++i) {
        std::optional<std::int64_t> volume;
        if (gen() % 2 == 0) {
            volume = static_cast<std::int64_t>(gen() % 100000);
        }
        const auto day = sys_days{d(2007, 1, 1)} + days{static_cast<int>(gen() % 1000)};
        records.push_back({i % 2 ? "EABL" : "UCL", Date{day}, price(gen), volume});
    }
    const auto text = serialize(records);
    const auto reparsed = parse_price_list(text, true);
    EXPECT_EQ(reparsed.records, records);
    EXPECT_EQ(serialize(reparsed.records), text);
}

TEST(ParsePriceList, GoldenFixtureHasNoRejections) {
    const auto text = capm::testing::slurp(capm::testing::fixture("pricelist_10x33.txt"));
    const auto result = parse_price_list(text, true);
    // 718 weekdays from 2007-03-01 to 2009-11-30, counted independently.
    constexpr std::size_t kDaysPerTicker = 718;
    EXPECT_EQ(result.records.size(), 10 * kDaysPerTicker);
    EXPECT_TRUE(result.report.rejected.empty());
    EXPECT_TRUE(result.report.duplicates.empty());
}

TEST(BuildPanel, SortsDates) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 2), 2.0),
                                              rec("KA", d(2007, 3, 1), 1.0)};
    const auto panel = build_panel(records);
    ASSERT_EQ(panel.dates().size(), 2u);
    EXPECT_EQ(panel.dates()[0], d(2007, 3, 1));
    EXPECT_EQ(panel.dates()[1], d(2007, 3, 2));
    EXPECT_EQ(panel.at(0, 0), 1.0);
}

TEST(BuildPanel, MergesIdenticalDuplicates) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 1), 100.0),
                                              rec("KA", d(2007, 3, 1), 100.0)};
    const auto panel = build_panel(records);
    EXPECT_EQ(panel.present_count(), 1u);
}

TEST(BuildPanel, ConflictingDuplicateNamesBothValues) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 1), 100.0),
                                              rec("KA", d(2007, 3, 1), 101.0)};
    try {
        (void)build_panel(records);
        FAIL() << "expected ConflictError";
    } catch (const ConflictError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("100"), std::string::npos);
        EXPECT_NE(what.find("101"), std::string::npos);
    }
}

TEST(BuildPanel, MissingTradesStayAbsent) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 1), 1.0),
                                              rec("UCL", d(2007, 3, 2), 2.0)};
    const auto panel = build_panel(records);
    EXPECT_FALSE(panel.at(0, 1).has_value());
    EXPECT_FALSE(panel.at(1, 0).has_value());
}

TEST(BuildPanel, PermutationInvariant) {
    const auto text = capm::testing::slurp(capm::testing::fixture("pricelist_10x33.txt"));
    auto records = parse_price_list(text, true).records;
    records.resize(600);
    records.push_back(records[17]);
    const auto reference = build_panel(records);
    std::mt19937_64 gen(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(records.begin(), records.end(), gen);
        EXPECT_EQ(build_panel(records), reference);
    }
}

TEST(BuildPanel, RecordsRoundTrip) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 1), 1.0),
                                              rec("UCL", d(2007, 3, 1), 2.0),
                                              rec("KA", d(2007, 3, 5), 3.0)};
    EXPECT_EQ(build_panel(records).to_records(), records);
}

TEST(ValidatePanel, FullGrid) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 1), 1.0),
                                              rec("UCL", d(2007, 3, 1), 2.0)};
    const auto report = validate_panel(build_panel(records));
    EXPECT_DOUBLE_EQ(report.coverage, 1.0);
    EXPECT_TRUE(report.gaps.empty());
}

TEST(ValidatePanel, OneMissingCellOfFour) {
    const std::vector<PriceRecord> records = {rec("KA", d(2007, 3, 1), 1.0),
                                              rec("UCL", d(2007, 3, 1), 2.0),
                                              rec("KA", d(2007, 3, 2), 1.0)};
    EXPECT_DOUBLE_EQ(validate_panel(build_panel(records)).coverage, 0.75);
}

TEST(ValidatePanel, FlagsMonthWithoutTrades) {
    // KA trades in March and May only; April must be reported as a gap.
    const std::vector<PriceRecord> records = {
        rec("KA", d(2007, 3, 1), 1.0), rec("KA", d(2007, 5, 1), 1.0),
        rec("UCL", d(2007, 3, 1), 2.0), rec("UCL", d(2007, 4, 2), 2.0),
        rec("UCL", d(2007, 5, 1), 2.0)};
    const auto report = validate_panel(build_panel(records));
    ASSERT_EQ(report.gaps.size(), 1u);
    EXPECT_EQ(report.gaps[0].ticker, "KA");
    ASSERT_EQ(report.gaps[0].months.size(), 1u);
    EXPECT_EQ(report.gaps[0].months[0], (Month{year{2007}, April}));
    ASSERT_EQ(report.monthly.size(), 3u);
    EXPECT_DOUBLE_EQ(report.monthly[1].coverage, 0.5);
}

TEST(ValidatePanel, EmptyPanel) {
    const auto report = validate_panel(PricePanel{});
    EXPECT_DOUBLE_EQ(report.coverage, 1.0);
    EXPECT_TRUE(report.monthly.empty());
}
