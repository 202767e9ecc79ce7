#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "secpol/harness/report.hpp"

namespace secpol {
namespace {

namespace fs = std::filesystem;

const fs::path kGolden = fs::path(SECPOL_SOURCE_DIR) / "tests" / "golden";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Report, ReferenceTableRendersVerbatim) {
    const auto rows = load_rows(kGolden / "reference_table.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].mitigation, "72%");
    EXPECT_EQ(rows[1].response, "5–15 min");
    EXPECT_EQ(rows[2].mitigation, "93.70%");
    EXPECT_EQ(rows[3].response, "2–5 sec");
    EXPECT_EQ(render_markdown(rows), slurp(kGolden / "reference_table.md"));
    EXPECT_EQ(render_csv(rows), slurp(kGolden / "reference_table.csv"));
}

TEST(Report, MetricsFileRendersToGolden) {
    const auto rows = load_rows(kGolden / "metrics_sample.csv");
    EXPECT_EQ(render_markdown(rows), slurp(kGolden / "metrics_sample.md"));
}

TEST(Report, RowFormatting) {
    MetricsReport m;
    m.name = "x";
    m.mitigation_rate = 0.937;
    m.tpr = 1.0;
    m.response_median_s = 5.0;
    m.response_p90_s = 12.5;
    m.policy_updates_per_day = 4.25;
    m.outstanding_compliance = 1.5;
    const auto r = row_from_report(m);
    EXPECT_EQ(r.mitigation, "93.70%");
    EXPECT_EQ(r.tpr, "100.00%");
    EXPECT_EQ(r.fpr, "n/a");
    EXPECT_EQ(r.response, "5–12 sec");
    EXPECT_EQ(r.updates, "4.2");
    EXPECT_EQ(r.compliance, "1.50 outstanding");
    m.outstanding_compliance = 0.0;
    m.response_median_s.reset();
    EXPECT_EQ(row_from_report(m).compliance, "0");
    EXPECT_EQ(row_from_report(m).response, "n/a");
}

TEST(Report, MetricsCsvRoundTrip) {
    MetricsReport m;
    m.name = "RL Agent (PPO), run 3";
    m.episodes = 200;
    m.seeds = 200;
    m.mitigation_rate = 0.123456789;
    m.fpr = 0.0;
    m.response_median_s = 10;
    m.neutralized = 7;
    m.breached = 1;
    std::istringstream in(metrics_csv(m));
    const auto back = parse_metrics_csv(in);
    EXPECT_EQ(back.name, m.name);
    EXPECT_EQ(back.episodes, 200);
    EXPECT_NEAR(*back.mitigation_rate, *m.mitigation_rate, 1e-10);
    EXPECT_EQ(back.fpr, 0.0);
    EXPECT_FALSE(back.tpr);
    EXPECT_EQ(back.neutralized, 7);
    EXPECT_EQ(back.breached, 1);
}

TEST(Report, ParseCsvQuoting) {
    std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\n1,2,3\n");
    const auto rows = parse_csv(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "2", "3"}));
    std::istringstream bad("a,\"open\n");
    EXPECT_THROW(parse_csv(bad), ReportError);
}

TEST(Report, LoadRowsErrors) {
    const auto dir = fs::temp_directory_path() / "secpol_report_test";
    fs::create_directories(dir);
    EXPECT_THROW(load_rows(dir / "missing.csv"), ReportError);
    std::ofstream(dir / "empty.csv").close();
    EXPECT_THROW(load_rows(dir / "empty.csv"), ReportError);
    std::ofstream(dir / "other.csv") << "foo,bar\n1,2\n";
    EXPECT_THROW(load_rows(dir / "other.csv"), ReportError);
    std::ofstream(dir / "short.csv") << slurp(kGolden / "reference_table.csv") << "only,three,cells\n";
    EXPECT_THROW(load_rows(dir / "short.csv"), ReportError);
    std::ofstream(dir / "nan.csv") << "name,episodes,seeds,mitigation_rate,tpr,fpr,response_median_s,response_p90_s,"
                                      "policy_updates_per_hour,policy_updates_per_day,outstanding_compliance,"
                                      "overhead_index,neutralized,breached\nx,1,1,abc,,,,,,,,,0,0\n";
    EXPECT_THROW(load_rows(dir / "nan.csv"), ReportError);
}

}  // namespace
}  // namespace secpol
