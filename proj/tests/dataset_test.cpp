#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "bevcharge/dataset.hpp"
#include "support/temp_dir.hpp"

namespace bevcharge {
namespace {

const std::filesystem::path kFixtures = BEVCHARGE_FIXTURE_DIR;

::testing::AssertionResult has_diag(const std::vector<Diagnostic>& list, std::string_view code,
                                    std::string_view file, std::size_t row) {
  for (const auto& d : list) {
    if (d.code == code && d.file == file && d.row == row) return ::testing::AssertionSuccess();
  }
  auto failure = ::testing::AssertionFailure() << "no " << code << " at " << file << ":" << row
                                               << "; got:";
  for (const auto& d : list) failure << " [" << d.file << ":" << d.row << " " << d.code << "]";
  return failure;
}

TEST(LoadDataset, CleanFixtureLoadsWithChecksums) {
  const auto r = load_dataset(kFixtures / "clean");
  ASSERT_TRUE(r.report.ok());
  EXPECT_TRUE(r.report.warnings.empty());
  ASSERT_TRUE(r.dataset);
  const auto& d = *r.dataset;
  EXPECT_EQ(d.versions().size(), 6u);
  EXPECT_EQ(d.sales().size(), 12u);
  EXPECT_EQ(d.zones().size(), 6u);
  EXPECT_EQ(d.ratios().size(), 2u);
  EXPECT_EQ(d.years(), (std::vector<int>{2021, 2022}));
  ASSERT_EQ(d.provenance().files.size(), 4u);
  EXPECT_EQ(d.provenance().files[0].file, "ratios.csv");
  for (const auto& f : d.provenance().files) EXPECT_EQ(f.sha256.size(), 64u);
  EXPECT_EQ(d.provenance().checksum.size(), 64u);
  EXPECT_EQ(d.versions_of("A", 2022).size(), 2u);
  EXPECT_EQ(d.versions_of("A", 2022)[0].version_id, "long");  // canonical order
  EXPECT_TRUE(d.versions_of("Z", 2022).empty());
  ASSERT_NE(d.zone("South", 2021), nullptr);
  EXPECT_EQ(d.zone("South", 2021)->mild_season_fraction, 0.55);
  EXPECT_EQ(d.ratios_for(2022)->stock_to_top20, 4.0);
}

TEST(LoadDataset, IdempotentChecksums) {
  const auto a = load_dataset(kFixtures / "clean");
  const auto b = load_dataset(kFixtures / "clean");
  EXPECT_EQ(a.dataset->provenance().checksum, b.dataset->provenance().checksum);
  EXPECT_EQ(a.dataset->sales(), b.dataset->sales());
}

TEST(LoadDataset, DanglingZone) {
  const auto r = load_dataset(kFixtures / "dangling_zone");
  EXPECT_FALSE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.errors, "DANGLING_ZONE", "sales.csv", 14));
  EXPECT_NE(r.report.first_error("DANGLING_ZONE")->message.find("Z9"), std::string::npos);
}

TEST(LoadDataset, ShareSumReportsObservedSum) {
  const auto r = load_dataset(kFixtures / "share_sum");
  EXPECT_FALSE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.errors, "SHARE_SUM", "versions.csv", 5));
  EXPECT_NE(r.report.first_error("SHARE_SUM")->message.find("0.97"), std::string::npos);
}

TEST(LoadDataset, DuplicateSalesKey) {
  const auto r = load_dataset(kFixtures / "duplicate_key");
  EXPECT_FALSE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.errors, "DUPLICATE_KEY", "sales.csv", 14));
}

TEST(LoadDataset, DegradationWarningDoesNotBlock) {
  const auto r = load_dataset(kFixtures / "degradation_range");
  EXPECT_TRUE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.warnings, "DEGRADATION_RANGE", "versions.csv", 7));
}

TEST(LoadDataset, MissingRatioYearWarns) {
  const auto r = load_dataset(kFixtures / "no_ratio");
  EXPECT_TRUE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.warnings, "NO_RATIO", "sales.csv", 8));
}

TEST(LoadDataset, ZeroFleetWarns) {
  const auto r = load_dataset(kFixtures / "zero_fleet");
  EXPECT_TRUE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.warnings, "ZERO_FLEET", "sales.csv", 12));
  EXPECT_TRUE(has_diag(r.report.warnings, "ZERO_SALES", "sales.csv", 13));
}

TEST(LoadDataset, MissingFileIsIoClass) {
  const auto r = load_dataset(kFixtures / "missing_file");
  EXPECT_FALSE(r.dataset);
  EXPECT_TRUE(r.report.has_io_error());
  EXPECT_TRUE(has_diag(r.report.errors, "MISSING_FILE", "zones.csv", 0));
}

TEST(LoadDataset, MissingDirectoryThrowsIo) {
  try {
    load_dataset(kFixtures / "does_not_exist");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  EXPECT_THROW(validate_only(kFixtures / "does_not_exist"), Error);
}

TEST(LoadDataset, RatiosFileIsOptional) {
  testing::TempDir dir;
  dir.copy_from(kFixtures / "clean");
  std::filesystem::remove(dir.path() / "ratios.csv");
  const auto r = load_dataset(dir.path());
  ASSERT_TRUE(r.dataset);
  EXPECT_TRUE(r.dataset->ratios().empty());
  EXPECT_TRUE(r.report.warnings.empty());
  EXPECT_EQ(r.dataset->provenance().files.size(), 3u);
}

TEST(LoadDataset, BlankMildFractionDefaultsToHalf) {
  testing::TempDir dir;
  dir.copy_from(kFixtures / "clean");
  dir.write("zones.csv",
            "zone_id,year,annual_mileage_km,mild_season_fraction,emission_factor_kgco2_per_kwh\n"
            "North,2021,12000,,0.71\nMLRYR,2021,11000,0.5,0.53\nSouth,2021,11500,0.55,0.53\n"
            "North,2022,12500,0.4,0.70\nMLRYR,2022,11500,0.5,0.49\nSouth,2022,12000,x,0.54\n");
  auto r = load_dataset(dir.path());
  EXPECT_TRUE(r.report.first_error("BAD_NUMBER"));
  EXPECT_EQ(r.report.first_error("BAD_NUMBER")->row, 7u);
  EXPECT_FALSE(r.report.first_error("MISSING_VALUE"));

  dir.write("zones.csv",
            "zone_id,year,annual_mileage_km,mild_season_fraction,emission_factor_kgco2_per_kwh\n"
            "North,2021,12000,,0.71\nMLRYR,2021,11000,0.5,0.53\nSouth,2021,11500,0.55,0.53\n"
            "North,2022,12500,0.4,0.70\nMLRYR,2022,11500,0.5,0.49\nSouth,2022,12000,0.55,0.54\n");
  r = load_dataset(dir.path());
  ASSERT_TRUE(r.dataset);
  EXPECT_EQ(r.dataset->zone("North", 2021)->mild_season_fraction, 0.5);
}

TEST(ValidateOnly, CleanFixtureIsEmpty) {
  const auto report = validate_only(kFixtures / "clean");
  EXPECT_TRUE(report.errors.empty());
  EXPECT_TRUE(report.warnings.empty());
}

TEST(ValidateOnly, ReportsWarningsAndErrorsTogether) {
  const auto report = validate_only(kFixtures / "degradation_range");
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(report.has_warning("DEGRADATION_RANGE"));
  EXPECT_TRUE(validate_only(kFixtures / "duplicate_key").has_error("DUPLICATE_KEY"));
}

// Row-level rules, each checked on a small edited copy of the clean fixture.
struct RowCase {
  const char* name;
  const char* file;
  const char* appended_row;
  const char* code;
  bool is_error;
};

class RowRules : public ::testing::TestWithParam<RowCase> {};

TEST_P(RowRules, AppendedRowIsFlagged) {
  const auto& c = GetParam();
  testing::TempDir dir;
  dir.copy_from(kFixtures / "clean");
  auto text = testing::read_text(dir.path() / c.file);
  const auto line = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
  dir.write(c.file, text + c.appended_row + "\n");
  const auto report = validate_only(dir.path());
  const auto& list = c.is_error ? report.errors : report.warnings;
  EXPECT_TRUE(has_diag(list, c.code, c.file, line)) << c.name;
}

INSTANTIATE_TEST_SUITE_P(
    Dataset, RowRules,
    ::testing::Values(
        RowCase{"field count", "sales.csv", "A,North,2023", "MALFORMED_ROW", true},
        RowCase{"bad number", "versions.csv", "C,x,2022,sixty,450,1,0.8,0.6", "BAD_NUMBER", true},
        RowCase{"negative battery", "versions.csv", "C,x,2022,-60,450,1,0.8,0.6", "UNIT_VIOLATION", true},
        RowCase{"zero nedc", "versions.csv", "C,x,2022,60,0,1,0.8,0.6", "UNIT_VIOLATION", true},
        RowCase{"share above one", "versions.csv", "C,x,2022,60,450,1.2,0.8,0.6", "UNIT_VIOLATION", true},
        RowCase{"lambda zero", "versions.csv", "C,x,2022,60,450,1,0,0.6", "UNIT_VIOLATION", true},
        RowCase{"rho too large", "versions.csv", "C,x,2022,60,450,1,0.8,1.6", "UNIT_VIOLATION", true},
        RowCase{"low rho warns", "versions.csv", "C,x,2022,60,450,1,0.8,0.4", "DEGRADATION_RANGE", false},
        RowCase{"year range", "zones.csv", "East,1980,12000,0.5,0.6", "YEAR_RANGE", true},
        RowCase{"mileage", "zones.csv", "East,2022,0,0.5,0.6", "UNIT_VIOLATION", true},
        RowCase{"season fraction", "zones.csv", "East,2022,12000,1.5,0.6", "UNIT_VIOLATION", true},
        RowCase{"emission factor", "zones.csv", "East,2022,12000,0.5,-0.6", "UNIT_VIOLATION", true},
        RowCase{"zone duplicate", "zones.csv", "North,2022,12000,0.5,0.6", "DUPLICATE_KEY", true},
        RowCase{"negative units", "sales.csv", "A,East,2022,-5", "UNIT_VIOLATION", true},
        RowCase{"fractional units", "sales.csv", "A,North,2023,1.5", "BAD_NUMBER", true},
        RowCase{"unknown model", "sales.csv", "C,North,2022,5", "DANGLING_MODEL", true},
        RowCase{"zone year missing", "sales.csv", "A,North,2023,5", "DANGLING_ZONE", true},
        RowCase{"empty id", "sales.csv", ",North,2022,5", "MISSING_VALUE", true},
        RowCase{"unknown model with zero units", "sales.csv", "C,North,2021,0", "DANGLING_MODEL", true},
        RowCase{"ratio order", "ratios.csv", "2023,1.5,1.8", "RATIO_ORDER", true},
        RowCase{"ratio duplicate", "ratios.csv", "2022,4,1.6", "DUPLICATE_KEY", true},
        RowCase{"version duplicate", "versions.csv", "B,base,2022,13.9,170,1,0.9,0.7", "DUPLICATE_KEY", true}));

TEST(LoadDataset, HeaderProblems) {
  testing::TempDir dir;
  dir.copy_from(kFixtures / "clean");
  dir.write("zones.csv", "zone_id,year,annual_mileage_km,mild_season_fraction\nNorth,2022,1,0.5\n");
  dir.write("ratios.csv", "year,stock_to_top20,all_sales_to_top20,note\n2021,4.2,1.8,x\n2022,4,1.6,y\n");
  const auto report = validate_only(dir.path());
  EXPECT_TRUE(has_diag(report.errors, "MISSING_COLUMN", "zones.csv", 1));
  EXPECT_TRUE(has_diag(report.warnings, "UNKNOWN_COLUMN", "ratios.csv", 1));
}

TEST(LoadDataset, EveryDiagnosticIsLocated) {
  for (const char* name : {"dangling_zone", "share_sum", "duplicate_key", "degradation_range",
                           "no_ratio", "zero_fleet"}) {
    const auto report = validate_only(kFixtures / name);
    for (const auto* list : {&report.errors, &report.warnings}) {
      for (const auto& d : *list) {
        EXPECT_FALSE(d.file.empty()) << name;
        EXPECT_GE(d.row, 1u) << name << " " << d.code;
        EXPECT_FALSE(d.code.empty());
      }
    }
  }
}

TEST(MakeDataset, RowOrderDoesNotChangeTheDataset) {
  const auto loaded = load_dataset(kFixtures / "clean");
  auto versions = loaded.dataset->versions();
  auto sales = loaded.dataset->sales();
  auto zones = loaded.dataset->zones();
  auto ratios = loaded.dataset->ratios();
  const auto a = make_dataset(versions, sales, zones, ratios);
  std::mt19937 rng(11);
  std::shuffle(versions.begin(), versions.end(), rng);
  std::shuffle(sales.begin(), sales.end(), rng);
  std::shuffle(zones.begin(), zones.end(), rng);
  const auto b = make_dataset(versions, sales, zones, ratios);
  ASSERT_TRUE(a.dataset && b.dataset);
  EXPECT_EQ(a.dataset->sales(), b.dataset->sales());
  EXPECT_EQ(a.dataset->versions(), b.dataset->versions());
  EXPECT_EQ(a.dataset->provenance().checksum, b.dataset->provenance().checksum);
  EXPECT_EQ(a.dataset->provenance().source, "<memory>");
}

TEST(MakeDataset, InMemoryRowsAreOffsetLikeFiles) {
  std::vector<VehicleVersion> versions = {{"A", "v", 2022, 60, 450, 0.5, 0.8, 0.6}};
  std::vector<SalesRecord> sales = {{"A", "North", 2022, 10}};
  std::vector<ZoneParameters> zones = {{"North", 2022, 12000, 0.5, 0.6}};
  const auto r = make_dataset(versions, sales, zones);
  EXPECT_FALSE(r.dataset);
  EXPECT_TRUE(has_diag(r.report.errors, "SHARE_SUM", "versions.csv", 2));
}

}  // namespace
}  // namespace bevcharge
