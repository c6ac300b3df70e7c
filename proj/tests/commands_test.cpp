#include "fwci/commands.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "fwci/errors.hpp"

namespace fwci {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Workspace {
    fs::path dir;
    RunConfig config;
};

Workspace workspace(const std::string& name, int n_awards = 40, int max_papers = 60) {
    Workspace w;
    w.dir = fixture::temp_dir(name);
    std::string budgets;
    fixture::write_text(w.dir / "export.csv",
                        fixture::synthetic_export(n_awards, max_papers, -0.0761, 0.933, 17, &budgets));
    fixture::write_text(w.dir / "budgets.csv", budgets);
    w.config.input_path = w.dir / "export.csv";
    w.config.budget_path = w.dir / "budgets.csv";
    w.config.output_dir = w.dir / "out";
    w.config.n_fits = 200;
    w.config.reps = 2000;
    return w;
}

TEST(GroupThousands, Examples) {
    EXPECT_EQ(group_thousands(0), "0");
    EXPECT_EQ(group_thousands(999), "999");
    EXPECT_EQ(group_thousands(3243), "3,243");
    EXPECT_EQ(group_thousands(64780), "64,780");
    EXPECT_EQ(group_thousands(210081688), "210,081,688");
    EXPECT_EQ(group_thousands(1000000), "1,000,000");
}

TEST(RunConfig, Validation) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    c.fit_lo = 8;
    EXPECT_THROW(c.validate(), UsageError);
    c = {};
    c.bins_lo = 0;
    EXPECT_THROW(c.validate(), UsageError);
    c = {};
    c.sigma_sq_list = {1.0, -1.0};
    EXPECT_THROW(c.validate(), UsageError);
    c = {};
    c.reps = 0;
    EXPECT_THROW(c.validate(), UsageError);
    c = {};
    c.fwci_low_cut = -0.1;
    EXPECT_THROW(c.validate(), UsageError);
}

TEST(CmdIngest, WritesArtifacts) {
    auto w = workspace("ingest");
    std::ostringstream log;
    cmd_ingest(w.config, log);
    for (const char* f : {"eligible.jsonl", "rejections.jsonl", "awards.csv", "ingest_report.json"}) {
        EXPECT_TRUE(fs::exists(w.config.output_dir / f)) << f;
    }
    const auto report = json::parse(fixture::read_file(w.config.output_dir / "ingest_report.json"));
    EXPECT_EQ(report["awards"], 40);
    EXPECT_EQ(report["config"]["seed"], 1);
    EXPECT_EQ(report["rows"]["rejected"], 0);
    const std::size_t low = report["low_fwci"]["low"], main = report["low_fwci"]["main"];
    EXPECT_EQ(low + main, report["publications"].get<std::size_t>());
    EXPECT_GT(low, 0u);
    EXPECT_NE(log.str().find("40 awards"), std::string::npos);
    EXPECT_NE(log.str().find("cost per paper: EUR "), std::string::npos);

    // eligible.jsonl feeds back in as input with the same result.
    RunConfig again = w.config;
    again.input_path = w.config.output_dir / "eligible.jsonl";
    again.output_dir = w.dir / "out2";
    std::ostringstream log2;
    cmd_ingest(again, log2);
    EXPECT_EQ(fixture::read_file(w.config.output_dir / "awards.csv"), fixture::read_file(again.output_dir / "awards.csv"));
    EXPECT_EQ(fixture::read_file(w.config.output_dir / "eligible.jsonl"),
              fixture::read_file(again.output_dir / "eligible.jsonl"));
}

TEST(CmdIngest, ReportsRejectedRows) {
    const auto dir = fixture::temp_dir("ingest_rej");
    fixture::write_text(dir / "in.csv",
                        "award_code,year,pub_type,fwci\n12/IA/1570,2014,article,1.0\n"
                        "14/IA/28884,2014,article,1.0\n12/IA/1570,2014,article,-1\n");
    RunConfig c;
    c.input_path = dir / "in.csv";
    c.output_dir = dir / "out";
    std::ostringstream log;
    cmd_ingest(c, log);
    const auto rejections = fixture::read_file(c.output_dir / "rejections.jsonl");
    EXPECT_EQ(std::count(rejections.begin(), rejections.end(), '\n'), 2);
    EXPECT_NE(log.str().find("rejected rows: 2"), std::string::npos);
}

TEST(CmdIngest, Errors) {
    const auto dir = fixture::temp_dir("ingest_err");
    RunConfig c;
    c.output_dir = dir / "out";
    std::ostringstream log;
    EXPECT_THROW(cmd_ingest(c, log), UsageError);
    c.input_path = dir / "missing.csv";
    EXPECT_THROW(cmd_ingest(c, log), UsageError);
    fixture::write_text(dir / "bad.csv", "award,year\n1,2\n");
    c.input_path = dir / "bad.csv";
    EXPECT_THROW(cmd_ingest(c, log), DataError);
}

TEST(CmdFit, ReportAndSeries) {
    auto w = workspace("fit", 60, 90);
    std::ostringstream log;
    cmd_fit(w.config, log);
    for (const char* f : {"fit_report.json", "hist_linear.csv", "curve_linear.csv", "hist_log.csv", "curve_log.csv"}) {
        EXPECT_TRUE(fs::exists(w.config.output_dir / f)) << f;
    }
    const auto r = json::parse(fixture::read_file(w.config.output_dir / "fit_report.json"));
    EXPECT_TRUE(r.contains("naive_mean_main"));
    EXPECT_TRUE(r.contains("naive_mean_all"));
    EXPECT_TRUE(r.contains("fitted_mean"));
    EXPECT_LT(r["empirical_interval"]["lo"].get<double>(), r["derived"]["interval_lo"].get<double>());
    EXPECT_LT(r["empirical_interval"]["lo"].get<double>(), r["empirical_interval"]["hi"].get<double>());
    EXPECT_EQ(r["config"]["n_fits"], 200);
    const double mu = r["ensemble"]["mu"]["p50"];
    const double sigma = r["ensemble"]["sigma"]["p50"];
    EXPECT_NEAR(mu, -0.0761, 0.15);
    EXPECT_NEAR(sigma, 0.933, 0.15);
    EXPECT_LE(r["ensemble"]["mu"]["p2_5"].get<double>(), mu);
    EXPECT_GE(r["ensemble"]["mu"]["p97_5"].get<double>(), mu);
    ASSERT_FALSE(r["log_view"]["normal_fit"].is_null());
    EXPECT_LT(std::abs(r["log_view"]["normal_fit"]["delta_mu"].get<double>()), 0.15);
    const auto curve = fixture::read_file(w.config.output_dir / "curve_linear.csv");
    EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 513);
    const auto hist = fixture::read_file(w.config.output_dir / "hist_linear.csv");
    EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 81);
}

TEST(CmdFit, Deterministic) {
    auto w = workspace("fit_det", 30, 60);
    std::ostringstream log;
    cmd_fit(w.config, log);
    const auto first = fixture::read_file(w.config.output_dir / "fit_report.json");
    const auto first_curve = fixture::read_file(w.config.output_dir / "curve_log.csv");
    cmd_fit(w.config, log);
    EXPECT_EQ(first, fixture::read_file(w.config.output_dir / "fit_report.json"));
    EXPECT_EQ(first_curve, fixture::read_file(w.config.output_dir / "curve_log.csv"));
    w.config.seed = 2;
    cmd_fit(w.config, log);
    EXPECT_NE(first, fixture::read_file(w.config.output_dir / "fit_report.json"));
}

TEST(CmdFit, TinySampleIsNumericalFailure) {
    const auto dir = fixture::temp_dir("fit_tiny");
    fixture::write_text(dir / "in.csv", "award_code,year,pub_type,fwci\n12/IA/1570,2014,article,1.0\n"
                                        "12/IA/1570,2014,article,1.1\n");
    RunConfig c;
    c.input_path = dir / "in.csv";
    c.output_dir = dir / "out";
    c.n_fits = 10;
    std::ostringstream log;
    EXPECT_THROW(cmd_fit(c, log), NumericalError);
    fixture::write_text(dir / "empty.csv", "award_code,year,pub_type,fwci\n");
    c.input_path = dir / "empty.csv";
    EXPECT_THROW(cmd_fit(c, log), NumericalError);
}

TEST(CmdBenchmark, TableAndDeterminism) {
    auto w = workspace("bench");
    std::ostringstream log;
    cmd_benchmark(w.config, log);
    const auto table = fixture::read_file(w.config.output_dir / "benchmark.csv");
    const auto report = fixture::read_file(w.config.output_dir / "benchmark_report.json");
    EXPECT_EQ(table.substr(0, table.find('\n')),
              "award_code,n_papers,observed_mean,threshold_s2_1,verdict_s2_1,threshold_s2_1.3,verdict_s2_1.3,"
              "threshold_s2_1.8,verdict_s2_1.8");
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 41);
    const auto j = json::parse(report);
    EXPECT_EQ(j["aggregate"]["n_awards"], 40);
    EXPECT_EQ(j["aggregate"]["per_sigma_sq"].size(), 3u);

    cmd_benchmark(w.config, log);
    EXPECT_EQ(table, fixture::read_file(w.config.output_dir / "benchmark.csv"));
    EXPECT_EQ(report, fixture::read_file(w.config.output_dir / "benchmark_report.json"));
}

TEST(CmdBenchmark, NoAwardsWarns) {
    const auto dir = fixture::temp_dir("bench_empty");
    fixture::write_text(dir / "in.csv", "award_code,year,pub_type,fwci\n12/IA/1570,2014,review,1.0\n");
    RunConfig c;
    c.input_path = dir / "in.csv";
    c.output_dir = dir / "out";
    std::ostringstream log;
    EXPECT_NO_THROW(cmd_benchmark(c, log));
    EXPECT_NE(log.str().find("warning: no awards"), std::string::npos);
    const auto j = json::parse(fixture::read_file(c.output_dir / "benchmark_report.json"));
    EXPECT_EQ(j["aggregate"]["n_awards"], 0);
}

TEST(CmdCurve, DeduplicatesAndWrites) {
    const auto dir = fixture::temp_dir("curve");
    RunConfig c;
    c.output_dir = dir;
    c.reps = 20000;
    std::ostringstream log;
    cmd_curve(c, {46, 1, 46}, log);
    EXPECT_NE(log.str().find("warning: dropped 1 repeated"), std::string::npos);
    const auto j = json::parse(fixture::read_file(dir / "curve_report.json"));
    EXPECT_EQ(j["n_values"], json::parse("[1,46]"));
    ASSERT_EQ(j["points"].size(), 6u);
    EXPECT_NEAR(j["points"][0]["median_mean"].get<double>(), 0.607, 0.02);
    EXPECT_THROW(cmd_curve(c, {}, log), UsageError);
    EXPECT_THROW(cmd_curve(c, {0}, log), UsageError);
}

}  // namespace
}  // namespace fwci
