#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "bevcharge/cli.hpp"
#include "support/temp_dir.hpp"

namespace bevcharge {
namespace {

const std::filesystem::path kFixtures = BEVCHARGE_FIXTURE_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the built binary through the shell. `env` is prepended verbatim.
Run run_binary(const std::string& args, const std::string& env = "") {
  testing::TempDir dir;
  const auto out = dir.path() / "out";
  const auto err = dir.path() / "err";
  const std::string cmd = env + " '" + std::string(BEVCHARGE_CLI_PATH) + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testing::read_text(out),
          testing::read_text(err)};
}

std::string fixture(const char* name) { return "'" + (kFixtures / name).string() + "'"; }

TEST(ParseYears, Forms) {
  EXPECT_EQ(cli::parse_years("2022"), (std::vector<int>{2022}));
  EXPECT_EQ(cli::parse_years("2020..2022"), (std::vector<int>{2020, 2021, 2022}));
  EXPECT_EQ(cli::parse_years("2022,2020"), (std::vector<int>{2020, 2022}));
  EXPECT_TRUE(cli::parse_years("").empty());
  for (const char* bad : {"20x", "2022..2020", "..2022", "2020,,2021"}) {
    EXPECT_THROW(cli::parse_years(bad), Error) << bad;
  }
}

TEST(RunValidate, CleanFixture) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_validate(kFixtures / "clean", out, err), cli::kExitOk);
  EXPECT_EQ(out.str(), "0 errors, 0 warnings\n");
}

TEST(RunValidate, ShareSumListsFileAndRow) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_validate(kFixtures / "share_sum", out, err), cli::kExitValidation);
  EXPECT_NE(out.str().find("error: versions.csv:5: SHARE_SUM:"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("1 errors, 0 warnings"), std::string::npos);
}

TEST(RunValidate, WarningsOnlyExitZero) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_validate(kFixtures / "degradation_range", out, err), cli::kExitOk);
  EXPECT_NE(out.str().find("warning: versions.csv:7: DEGRADATION_RANGE:"), std::string::npos);
}

TEST(RunValidate, IoFailures) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_validate(kFixtures / "does_not_exist", out, err), cli::kExitIo);
  EXPECT_EQ(cli::run_validate(kFixtures / "missing_file", out, err), cli::kExitIo);
}

TEST(RunCompute, NoDataYear) {
  cli::ComputeRequest req;
  req.data = kFixtures / "clean";
  req.years = "2030";
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_compute(req, out, err), cli::kExitValidation);
  EXPECT_NE(err.str().find("NO_DATA_YEAR"), std::string::npos);
  EXPECT_TRUE(out.str().empty());
}

TEST(RunCompute, CalibratedNationalRows) {
  cli::ComputeRequest req;
  req.data = kFixtures / "calibrated";
  req.years = "2020..2022";
  req.format = Format::csv;
  std::ostringstream out, err;
  ASSERT_EQ(cli::run_compute(req, out, err), cli::kExitOk) << err.str();
  const auto table = csv::parse(out.str(), "compute.csv");
  std::map<int, double> energy;
  for (const auto& r : table.rows) {
    if (r.fields[0] == "national" && r.fields[3] == "energy") {
      energy[*csv::to_integer<int>(r.fields[2])] = *csv::to_double(r.fields[4]) / 1e6;
    }
  }
  ASSERT_EQ(energy.size(), 3u);
  EXPECT_NEAR(energy[2020], 601.7, 0.05);
  EXPECT_NEAR(energy[2021], 1806.5, 0.05);
  EXPECT_NEAR(energy[2022], 3053.6, 0.05);
}

TEST(RunCompute, MarkdownIsUsageError) {
  cli::ComputeRequest req;
  req.data = kFixtures / "clean";
  req.format = Format::md;
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_compute(req, out, err), cli::kExitValidation);
}

TEST(RunCompute, UnwritableOutput) {
  cli::ComputeRequest req;
  req.data = kFixtures / "clean";
  req.out = kFixtures / "no_such_dir" / "out.json";
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_compute(req, out, err), cli::kExitIo);
}

TEST(RunReport, UsageCheckedBeforeLoading) {
  cli::ReportRequest req;
  req.data = kFixtures / "does_not_exist";
  req.level = Level::version;
  req.intensity = true;
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_report(req, out, err), cli::kExitValidation);
  EXPECT_NE(err.str().find("USAGE"), std::string::npos);
}

TEST(RunReport, ZoneGrowthMarkdown) {
  cli::ReportRequest req;
  req.data = kFixtures / "calibrated";
  req.level = Level::zone;
  req.growth = true;
  std::ostringstream out, err;
  ASSERT_EQ(cli::run_report(req, out, err), cli::kExitOk) << err.str();
  EXPECT_NE(out.str().find("| South | 2021 | 228.8 |"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("- options: command=report level=zone"), std::string::npos);
}

TEST(Binary, ValidateExitCodes) {
  auto r = run_binary("validate --data " + fixture("clean"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0 errors, 0 warnings\n");
  r = run_binary("validate --data " + fixture("share_sum"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("versions.csv:5"), std::string::npos);
  EXPECT_EQ(run_binary("validate --data " + fixture("nowhere")).code, 3);
}

TEST(Binary, UsageErrors) {
  EXPECT_EQ(run_binary("").code, 2);
  EXPECT_EQ(run_binary("frobnicate").code, 2);
  EXPECT_EQ(run_binary("report --data " + fixture("clean") + " --level galaxy").code, 2);
  EXPECT_EQ(run_binary("report --data " + fixture("clean") + " --level model --scale stock").code, 2);
  EXPECT_EQ(run_binary("compute", "env -u BEV_DATA_DIR").code, 2);
  EXPECT_EQ(run_binary("--help").code, 0);
  const auto v = run_binary("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(kVersion), std::string::npos);
}

TEST(Binary, DataDirFromEnvironment) {
  const auto r = run_binary("validate", "BEV_DATA_DIR=" + fixture("clean"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0 errors, 0 warnings\n");
}

TEST(Binary, ComputeTwiceIsByteIdentical) {
  testing::TempDir dir;
  const auto a = dir.path() / "a.json";
  const auto b = dir.path() / "b.json";
  const std::string args = "compute --data " + fixture("calibrated") + " --years 2020..2022 --out ";
  ASSERT_EQ(run_binary(args + "'" + a.string() + "'").code, 0);
  ASSERT_EQ(run_binary(args + "'" + b.string() + "' --threads 4").code, 0);
  const auto text = testing::read_text(a);
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(text, testing::read_text(b));
}

TEST(Binary, ComputeNoOverlapYears) {
  const auto r = run_binary("compute --data " + fixture("clean") + " --years 1995..1996");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NO_DATA_YEAR"), std::string::npos);
}

TEST(Binary, ConfigSetsDefaultsAndFlagsWin) {
  testing::TempDir dir;
  dir.write("bev.ini", "[report]\nlevel=zone\nformat=csv\n");
  const std::string config = "'" + (dir.path() / "bev.ini").string() + "'";
  auto r = run_binary("--config " + config + " report --data " + fixture("clean"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# option.level=zone"), std::string::npos);
  EXPECT_NE(r.out.find("contribution,North,2022"), std::string::npos);
  r = run_binary("--config " + config + " report --data " + fixture("clean") + " --level national");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# option.level=national"), std::string::npos);

  dir.write("dotted.ini", "report.level=model\nreport.format=csv\n");
  r = run_binary("--config '" + (dir.path() / "dotted.ini").string() + "' report --data " +
                 fixture("clean"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# option.level=model"), std::string::npos);
}

TEST(Binary, ReportScaleCsv) {
  const auto r = run_binary("report --data " + fixture("calibrated") +
                            " --format csv --scale all-sales --intensity --intensity-denominator single-year");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("scaled,national,2022,ratio,1.60,x"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("# option.intensity_denominator=single-year"), std::string::npos);
}

}  // namespace
}  // namespace bevcharge
