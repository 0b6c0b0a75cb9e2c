#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "capm/cli.hpp"
#include "capm/date.hpp"
#include "capm/rng.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using capm::testing::fixture;
using capm::testing::slurp;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "capm");
    std::ostringstream out, err;
    const int code = capm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / fmt::format("capm_cli_{}_{}", info->name(), ::getpid());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }

    std::vector<std::string> golden_inputs() const {
        return {"--input",    fixture("pricelist_10x33.txt").string(),
                "--index",    fixture("index_10x33.txt").string(),
                "--riskfree", fixture("riskfree_10x33.csv").string()};
    }

    fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            row.push_back(field);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_F(CliTest, ParseFixture) {
    const auto r = run({"parse", "--input", fixture("pricelist_10x33.txt").string(), "--out",
                        path("out")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.err, "");
    const auto panel = slurp(path("out/panel.csv"));
    EXPECT_EQ(std::count(panel.begin(), panel.end(), '\n'), 7180);
    EXPECT_EQ(slurp(path("out/parse_rejections.csv")), "line,reason\n");
}

TEST_F(CliTest, MissingFileExitsTwo) {
    const auto missing = path("nope.txt");
    const auto r = run({"parse", "--input", missing, "--out", path("out")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, StrictMalformedLineExitsThree) {
    write("bad.txt", "KA,2007-03-01,10\nKA,2007-03-02,ten\n");
    const auto r = run({"parse", "--strict", "--input", path("bad.txt"), "--out", path("out")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;

    const auto lenient = run({"parse", "--input", path("bad.txt"), "--out", path("out")});
    EXPECT_EQ(lenient.code, 0);
    EXPECT_NE(lenient.err.find("warning: line 2"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"parse", "--bogus"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, InvalidConfigurationExitsFive) {
    const auto inputs = golden_inputs();
    EXPECT_EQ(run(concat({"estimate", "--out", path("o"), "--levels", "2"}, inputs)).code, 5);
    EXPECT_EQ(run(concat({"estimate", "--out", path("o"), "--format", "xml"}, inputs)).code, 5);
    EXPECT_EQ(run(concat({"estimate", "--out", path("o"), "--from", "2009-01-01", "--to",
                          "2008-01-01"},
                         inputs))
                  .code,
              5);
    EXPECT_EQ(run({"estimate", "--out", path("o")}).code, 5);
}

TEST_F(CliTest, GoldenEstimateMatchesByteForByte) {
    const auto r = run(concat({"estimate", "--out", path("est")}, golden_inputs()));
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* name : {"stock_betas.csv", "stock_zero_beta.csv", "portfolio_beta.csv",
                             "portfolio_zero_beta.csv", "hypotheses.csv"}) {
        EXPECT_EQ(slurp(path(std::string("est/") + name)),
                  slurp(fixture(std::string("golden_estimate/") + name)))
            << name;
    }
}

TEST_F(CliTest, CsvAndJsonCarrySameValues) {
    ASSERT_EQ(run(concat({"estimate", "--out", path("csv")}, golden_inputs())).code, 0);
    ASSERT_EQ(run(concat({"estimate", "--out", path("json"), "--format", "json"}, golden_inputs()))
                  .code,
              0);
    const auto rows = csv_rows(slurp(path("csv/stock_betas.csv")));
    const auto json = nlohmann::json::parse(slurp(path("json/stock_betas.json")));
    ASSERT_EQ(json.size() + 1, rows.size());
    const char* keys[] = {"name", "beta", "t_beta", "se_beta", "r2"};
    for (std::size_t r = 0; r < json.size(); ++r) {
        EXPECT_EQ(json[r]["name"], rows[r + 1][0]);
        for (std::size_t c = 1; c < 5; ++c) {
            EXPECT_EQ(std::stod(rows[r + 1][c]), json[r][keys[c]].get<double>());
        }
    }
}

TEST_F(CliTest, NoiselessFixture) {
    write("spec.json", R"({"n_stocks": 4, "n_months": 12, "true_betas": 1, "idio_sd": 0,
                           "rf_annual": 0.1})");
    ASSERT_EQ(run({"simulate", "--spec", path("spec.json"), "--trials", "0", "--out", path("sim")})
                  .code,
              0);
    const std::vector<std::string> inputs = {"--input", path("sim/pricelist.txt"), "--index",
                                             path("sim/index.txt"), "--riskfree",
                                             path("sim/riskfree.csv")};
    const auto est = run(concat({"estimate", "--out", path("est")}, inputs));
    ASSERT_EQ(est.code, 0) << est.err;
    const auto rows = csv_rows(slurp(path("est/stock_betas.csv")));
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][1], "1.0000");
        EXPECT_EQ(rows[i][4], "1.0000");
    }

    const auto diag = run(concat({"diagnose", "--out", path("diag")}, inputs));
    ASSERT_EQ(diag.code, 0) << diag.err;
    EXPECT_NE(diag.err.find("numerically zero"), std::string::npos);
    const auto dw = slurp(path("diag/durbin_watson.csv"));
    EXPECT_NE(dw.find("STAA,12,NA,NA,NA,NA,NA,residuals are numerically zero"), std::string::npos)
        << dw;
}

TEST_F(CliTest, DiagnoseReportsInjectedAr1Correlation) {
    // Monthly prices over 2000 months. Stock excess = 0.8 market + AR(1) noise, phi = 0.4.
    capm::Rng rng(404);
    constexpr int kMonths = 2000;
    std::string stock = "# injected AR(1) residuals\n";
    std::string index;
    std::string rf = "# month,annual_yield\n";
    double p_stock = 100.0, p_index = 1000.0, noise = 0.0;
    auto month = capm::Month{std::chrono::year{1900}, std::chrono::January};
    for (int t = 0; t <= kMonths; ++t) {
        const auto date = capm::format_date(capm::Date{month.year(), month.month(),
                                                       std::chrono::day{1}});
        stock += fmt::format("KA,{},{:.12f}\n", date, p_stock);
        index += fmt::format("IDX,{},{:.12f}\n", date, p_index);
        rf += fmt::format("{},0\n", capm::format_month(month));
        const double market = rng.normal(0.005, 0.05);
        noise = 0.4 * noise + rng.normal(0.0, 0.02);
        p_index *= std::exp(market);
        p_stock *= std::exp(0.8 * market + noise);
        month = capm::next_month(month);
    }
    write("stock.txt", stock);
    write("index.txt", index);
    write("rf.csv", rf);
    const auto r = run({"diagnose", "--input", path("stock.txt"), "--index", path("index.txt"),
                        "--riskfree", path("rf.csv"), "--out", path("diag"), "--max-lag", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(slurp(path("diag/acf_KA.csv")));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[1][0], "1");
    EXPECT_NEAR(std::stod(rows[1][1]), 0.4, 0.05);
    const auto dw = csv_rows(slurp(path("diag/durbin_watson.csv")));
    EXPECT_NEAR(std::stod(dw[1][3]), 0.4, 0.05);
}

TEST_F(CliTest, AcfFilesHaveMaxLagRows) {
    const auto r = run(concat({"diagnose", "--out", path("diag"), "--max-lag", "7", "--split",
                               "2008-06-10"},
                              golden_inputs()));
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& entry : fs::directory_iterator(path("diag"))) {
        const auto name = entry.path().filename().string();
        if (name.rfind("acf_", 0) == 0) {
            EXPECT_EQ(csv_rows(slurp(entry.path())).size(), 8u) << name;
        }
    }
    EXPECT_TRUE(fs::exists(path("diag/trend_t.csv")));
    EXPECT_TRUE(fs::exists(path("diag/trend_t2.csv")));
    EXPECT_EQ(csv_rows(slurp(path("diag/trend_t.csv")))[0],
              (std::vector<std::string>{"Term", "Estimate", "Std. Error", "t value", "Pr(>|t|)"}));
}

TEST_F(CliTest, EmptyOverlapExitsFour) {
    write("rf.csv", "1990-01,0.1\n1990-02,0.1\n");
    const auto r = run({"estimate", "--input", fixture("pricelist_10x33.txt").string(), "--index",
                        fixture("index_10x33.txt").string(), "--riskfree", path("rf.csv"),
                        "--out", path("est")});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, SimulateValidationAndDeterminism) {
    write("bad.json", R"({"n_months": 1})");
    EXPECT_EQ(run({"simulate", "--spec", path("bad.json"), "--out", path("x")}).code, 5);
    EXPECT_EQ(run({"simulate", "--trials", "50", "--out", path("x")}).code, 5);
    write("broken.json", "{");
    EXPECT_EQ(run({"simulate", "--spec", path("broken.json"), "--out", path("x")}).code, 5);

    for (const char* out : {"a", "b"}) {
        ASSERT_EQ(run({"simulate", "--seed", "7", "--trials", "100", "--out", path(out)}).code, 0);
    }
    for (const char* name : {"recovery.csv", "pricelist.txt", "index.txt", "riskfree.csv",
                             "spec.json"}) {
        EXPECT_EQ(slurp(path(std::string("a/") + name)), slurp(path(std::string("b/") + name)));
    }
    const auto parsed = run({"parse", "--strict", "--input", path("a/pricelist.txt"), "--out",
                             path("p")});
    EXPECT_EQ(parsed.code, 0);
    EXPECT_EQ(slurp(path("p/parse_rejections.csv")), "line,reason\n");
}

TEST_F(CliTest, GoldenFixtureRegenerates) {
    ASSERT_EQ(run({"simulate", "--spec", fixture("spec_golden.json").string(), "--trials", "0",
                   "--out", path("sim")})
                  .code,
              0);
    EXPECT_EQ(slurp(path("sim/pricelist.txt")), slurp(fixture("pricelist_10x33.txt")));
    EXPECT_EQ(slurp(path("sim/index.txt")), slurp(fixture("index_10x33.txt")));
    EXPECT_EQ(slurp(path("sim/riskfree.csv")), slurp(fixture("riskfree_10x33.csv")));
}

TEST_F(CliTest, ReportIsDeterministic) {
    for (const char* out : {"r1", "r2"}) {
        const auto r = run(concat({"report", "--out", path(out), "--split", "2008-06-10"},
                                  golden_inputs()));
        ASSERT_EQ(r.code, 0) << r.err;
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(path("r1"))) {
        const auto other = fs::path(path("r2")) / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++files;
    }
    EXPECT_EQ(files, static_cast<std::size_t>(std::distance(fs::directory_iterator(path("r2")),
                                                            fs::directory_iterator{})));
    EXPECT_TRUE(fs::exists(path("r1/report.txt")));
}

TEST_F(CliTest, ReturnsWithDividends) {
    write("div.csv", "STAA,2008-01,2.5\nZZZ,2008-01,1.0\n");
    const auto r = run({"returns", "--input", fixture("pricelist_10x33.txt").string(),
                        "--dividends", path("div.csv"), "--riskfree",
                        fixture("riskfree_10x33.csv").string(), "--out", path("ret")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("ZZZ"), std::string::npos);
    const auto rows = csv_rows(slurp(path("ret/returns.csv")));
    EXPECT_EQ(rows[0], (std::vector<std::string>{"ticker", "month", "log_return"}));
    EXPECT_EQ(rows.size(), 1u + 10 * 32);
    EXPECT_TRUE(fs::exists(path("ret/excess_returns.csv")));
    EXPECT_TRUE(fs::exists(path("ret/portfolio.csv")));
}
