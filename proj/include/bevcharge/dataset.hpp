#pragma once

// Loading and validation of a fleet dataset from a directory of CSV files:
//
//   versions.csv  model_id,version_id,year,battery_kwh,nedc_km,share,lambda,rho
//   sales.csv     model_id,zone_id,year,units
//   zones.csv     zone_id,year,annual_mileage_km,mild_season_fraction,
//                 emission_factor_kgco2_per_kwh
//   ratios.csv    year,stock_to_top20,all_sales_to_top20        (optional)
//
// Every diagnostic names a file, the 1-based line of the offending record
// (the header is line 1) and a stable code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "bevcharge/checksum.hpp"
#include "bevcharge/csv.hpp"
#include "bevcharge/error.hpp"
#include "bevcharge/model.hpp"
#include "bevcharge/types.hpp"

namespace bevcharge {

inline constexpr int kMinYear = 1990;
inline constexpr int kMaxYear = 2100;
inline constexpr double kMaxDegradation = 1.5;
// Coefficients outside (kTypicalDegradationLow, kTypicalDegradationHigh] warn.
inline constexpr double kTypicalDegradationLow = 0.5;
inline constexpr double kTypicalDegradationHigh = 1.0;

inline constexpr std::string_view kVersionsFile = "versions.csv";
inline constexpr std::string_view kSalesFile = "sales.csv";
inline constexpr std::string_view kZonesFile = "zones.csv";
inline constexpr std::string_view kRatiosFile = "ratios.csv";

inline constexpr std::array<std::string_view, 8> kVersionsColumns = {
    "model_id", "version_id", "year", "battery_kwh", "nedc_km", "share", "lambda", "rho"};
inline constexpr std::array<std::string_view, 4> kSalesColumns = {"model_id", "zone_id",
                                                                  "year", "units"};
inline constexpr std::array<std::string_view, 5> kZonesColumns = {
    "zone_id", "year", "annual_mileage_km", "mild_season_fraction",
    "emission_factor_kgco2_per_kwh"};
inline constexpr std::array<std::string_view, 3> kRatiosColumns = {"year", "stock_to_top20",
                                                                   "all_sales_to_top20"};

struct Diagnostic {
  std::string file;
  std::size_t row = 0;
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const noexcept { return errors.empty(); }

  bool has_error(std::string_view code) const { return find(errors, code) != nullptr; }
  bool has_warning(std::string_view code) const { return find(warnings, code) != nullptr; }

  const Diagnostic* first_error(std::string_view code) const { return find(errors, code); }
  const Diagnostic* first_warning(std::string_view code) const {
    return find(warnings, code);
  }

  /// True when a required file is missing or unreadable (exit code 3 class).
  bool has_io_error() const {
    return has_error("MISSING_FILE") || has_error("IO_ERROR");
  }

 private:
  static const Diagnostic* find(const std::vector<Diagnostic>& list, std::string_view code) {
    for (const auto& d : list) {
      if (d.code == code) return &d;
    }
    return nullptr;
  }
};

struct FileChecksum {
  std::string file;
  std::string sha256;
};

struct Provenance {
  std::string source;
  std::vector<FileChecksum> files;  // sorted by file name
  std::string checksum;             // SHA-256 over the per-file lines
};

template <typename T>
struct Located {
  T record;
  std::size_t row = 0;
};

// Parsed but unvalidated input.
struct DatasetTables {
  std::vector<Located<VehicleVersion>> versions;
  std::vector<Located<SalesRecord>> sales;
  std::vector<Located<ZoneParameters>> zones;
  std::vector<Located<ScalingRatios>> ratios;
  bool has_ratios = false;
};

class FleetDataset;

namespace detail {
struct DatasetBuilder;
}

/// Validated, immutable dataset. Records are held in canonical order:
/// versions by (model, year, version), sales by (year, zone, model),
/// zones by (zone, year), ratios by year.
class FleetDataset {
 public:
  const std::vector<VehicleVersion>& versions() const noexcept { return versions_; }
  const std::vector<SalesRecord>& sales() const noexcept { return sales_; }
  const std::vector<ZoneParameters>& zones() const noexcept { return zones_; }
  const std::vector<ScalingRatios>& ratios() const noexcept { return ratios_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  std::span<const VehicleVersion> versions_of(std::string_view model_id, int year) const {
    using Key = std::pair<std::string_view, int>;
    const Key key{model_id, year};
    const auto lo = std::lower_bound(
        versions_.begin(), versions_.end(), key,
        [](const VehicleVersion& v, const Key& k) { return Key{v.model_id, v.year} < k; });
    const auto hi = std::upper_bound(
        lo, versions_.end(), key,
        [](const Key& k, const VehicleVersion& v) { return k < Key{v.model_id, v.year}; });
    return {lo, hi};
  }

  const ZoneParameters* zone(std::string_view zone_id, int year) const {
    for (const auto& z : zones_) {
      if (z.zone_id == zone_id && z.year == year) return &z;
    }
    return nullptr;
  }

  const ScalingRatios* ratios_for(int year) const {
    for (const auto& r : ratios_) {
      if (r.year == year) return &r;
    }
    return nullptr;
  }

  /// Years with at least one sales record, ascending.
  std::vector<int> years() const {
    std::set<int> years;
    for (const auto& s : sales_) years.insert(s.year);
    return {years.begin(), years.end()};
  }

 private:
  friend struct detail::DatasetBuilder;
  FleetDataset() = default;

  std::vector<VehicleVersion> versions_;
  std::vector<SalesRecord> sales_;
  std::vector<ZoneParameters> zones_;
  std::vector<ScalingRatios> ratios_;
  Provenance provenance_;
};

struct LoadResult {
  std::optional<FleetDataset> dataset;  // engaged iff report.ok()
  ValidationReport report;
};

namespace detail {

struct FileParse {
  std::string name;
  bool present = false;
  std::string sha256;
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
};

// Typed field access for one CSV row; failures become diagnostics.
class RowReader {
 public:
  RowReader(const csv::Table& table, const csv::Row& row, FileParse& out)
      : table_(table), row_(row), out_(out) {}

  bool ok() const noexcept { return ok_; }

  std::string id(std::string_view column) {
    auto text = std::string(csv::trim(field(column)));
    if (text.empty()) fail("MISSING_VALUE", std::string(column) + " is empty");
    return text;
  }

  int year(std::string_view column) {
    const auto text = field(column);
    const auto value = csv::to_integer<int>(text);
    if (!value) {
      fail("BAD_NUMBER", std::string(column) + " '" + std::string(text) + "' is not an integer");
      return 0;
    }
    if (*value < kMinYear || *value > kMaxYear) {
      fail("YEAR_RANGE", std::string(column) + " " + std::to_string(*value) +
                             " outside " + std::to_string(kMinYear) + "-" +
                             std::to_string(kMaxYear));
    }
    return *value;
  }

  double number(std::string_view column) {
    const auto text = field(column);
    const auto value = csv::to_double(text);
    if (!value) {
      fail("BAD_NUMBER", std::string(column) + " '" + std::string(text) + "' is not a finite number");
      return 0.0;
    }
    return *value;
  }

  // Blank field gives `fallback`.
  double number_or(std::string_view column, double fallback) {
    if (csv::trim(field(column)).empty()) return fallback;
    return number(column);
  }

  std::uint64_t count(std::string_view column) {
    const auto text = field(column);
    const auto trimmed = csv::trim(text);
    if (!trimmed.empty() && trimmed.front() == '-' && csv::to_double(trimmed)) {
      fail("UNIT_VIOLATION", std::string(column) + " " + std::string(trimmed) + " is negative");
      return 0;
    }
    const auto value = csv::to_integer<std::uint64_t>(text);
    if (!value) {
      fail("BAD_NUMBER", std::string(column) + " '" + std::string(text) +
                             "' is not a non-negative integer");
      return 0;
    }
    return *value;
  }

  void require(bool condition, std::string message) {
    if (!condition) fail("UNIT_VIOLATION", std::move(message));
  }

  void warn(std::string code, std::string message) {
    out_.warnings.push_back({out_.name, row_.line, std::move(code), std::move(message)});
  }

 private:
  std::string_view field(std::string_view column) const {
    return row_.fields[*table_.column(column)];
  }

  void fail(std::string code, std::string message) {
    ok_ = false;
    out_.errors.push_back({out_.name, row_.line, std::move(code), std::move(message)});
  }

  const csv::Table& table_;
  const csv::Row& row_;
  FileParse& out_;
  bool ok_ = true;
};

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return std::move(buffer).str();
}

// Reads, hashes and parses one file, then hands each well-shaped row to
// `on_row`. Header problems stop row processing for that file.
template <std::size_t N, typename OnRow>
FileParse parse_file(const std::filesystem::path& dir, std::string_view name,
                     const std::array<std::string_view, N>& columns, bool required,
                     OnRow&& on_row) {
  FileParse out;
  out.name = std::string(name);
  const auto path = dir / name;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    if (required) {
      out.errors.push_back({out.name, 0, "MISSING_FILE",
                            "required file " + out.name + " not found in " + dir.string()});
    }
    return out;
  }
  out.present = true;
  const auto text = read_file(path);
  if (!text) {
    out.errors.push_back({out.name, 0, "IO_ERROR", "cannot read " + path.string()});
    return out;
  }
  out.sha256 = sha256_hex(*text);

  csv::Table table;
  try {
    table = csv::parse(*text, out.name);
  } catch (const Error& e) {
    out.errors.push_back({out.name, e.row(), e.code(), e.what()});
    return out;
  }
  if (table.header.empty()) {
    out.errors.push_back({out.name, 1, "MISSING_COLUMN", out.name + " has no header row"});
    return out;
  }
  bool header_ok = true;
  for (const auto column : columns) {
    if (!table.column(column)) {
      header_ok = false;
      out.errors.push_back({out.name, table.header_line, "MISSING_COLUMN",
                            "missing column '" + std::string(column) + "'"});
    }
  }
  std::set<std::string> seen;
  for (const auto& h : table.header) {
    if (!seen.insert(h).second) {
      header_ok = false;
      out.errors.push_back(
          {out.name, table.header_line, "DUPLICATE_COLUMN", "column '" + h + "' repeated"});
    }
    if (std::find(columns.begin(), columns.end(), h) == columns.end()) {
      out.warnings.push_back({out.name, table.header_line, "UNKNOWN_COLUMN",
                              "column '" + h + "' is not used"});
    }
  }
  if (!header_ok) return out;

  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      out.errors.push_back({out.name, row.line, "MALFORMED_ROW",
                            "expected " + std::to_string(table.header.size()) +
                                " fields, found " + std::to_string(row.fields.size())});
      continue;
    }
    RowReader reader(table, row, out);
    on_row(reader, row.line);
  }
  return out;
}

inline Located<VehicleVersion> read_version(RowReader& r, std::size_t line) {
  Located<VehicleVersion> out{{}, line};
  auto& v = out.record;
  v.model_id = r.id("model_id");
  v.version_id = r.id("version_id");
  v.year = r.year("year");
  v.battery_kwh = r.number("battery_kwh");
  v.nedc_km = r.number("nedc_km");
  v.sales_share = r.number("share");
  v.mild_degradation = r.number("lambda");
  v.harsh_degradation = r.number("rho");
  return out;
}

inline Located<SalesRecord> read_sales(RowReader& r, std::size_t line) {
  Located<SalesRecord> out{{}, line};
  out.record.model_id = r.id("model_id");
  out.record.zone_id = r.id("zone_id");
  out.record.year = r.year("year");
  out.record.units = r.count("units");
  return out;
}

inline Located<ZoneParameters> read_zone(RowReader& r, std::size_t line) {
  Located<ZoneParameters> out{{}, line};
  auto& z = out.record;
  z.zone_id = r.id("zone_id");
  z.year = r.year("year");
  z.annual_mileage_km = r.number("annual_mileage_km");
  z.mild_season_fraction = r.number_or("mild_season_fraction", ZoneParameters{}.mild_season_fraction);
  z.emission_factor = r.number("emission_factor_kgco2_per_kwh");
  return out;
}

inline Located<ScalingRatios> read_ratios(RowReader& r, std::size_t line) {
  Located<ScalingRatios> out{{}, line};
  out.record.year = r.year("year");
  out.record.stock_to_top20 = r.number("stock_to_top20");
  out.record.all_sales_to_top20 = r.number("all_sales_to_top20");
  return out;
}

struct Checker {
  ValidationReport& report;

  void error(std::string_view file, std::size_t row, std::string code, std::string message) {
    report.errors.push_back({std::string(file), row, std::move(code), std::move(message)});
  }
  void warning(std::string_view file, std::size_t row, std::string code, std::string message) {
    report.warnings.push_back({std::string(file), row, std::move(code), std::move(message)});
  }
};

inline std::string fmt_number(double value) { return csv::format_double(value); }

// Per-record unit and range rules. Returns false when the record must not
// take part in cross-reference checks.
inline bool check_version(Checker& c, const Located<VehicleVersion>& lv) {
  const auto& v = lv.record;
  bool ok = true;
  auto require = [&](bool cond, const std::string& message) {
    if (!cond) {
      c.error(kVersionsFile, lv.row, "UNIT_VIOLATION", message);
      ok = false;
    }
  };
  require(v.battery_kwh > 0.0, "battery_kwh must be > 0, got " + fmt_number(v.battery_kwh));
  require(v.nedc_km > 0.0, "nedc_km must be > 0, got " + fmt_number(v.nedc_km));
  require(v.sales_share >= 0.0 && v.sales_share <= 1.0,
          "share must lie in [0, 1], got " + fmt_number(v.sales_share));
  for (const auto& [name, value] : {std::pair{"lambda", v.mild_degradation},
                                    std::pair{"rho", v.harsh_degradation}}) {
    if (!(value > 0.0 && value <= kMaxDegradation)) {
      require(false, std::string(name) + " must lie in (0, 1.5], got " + fmt_number(value));
    } else if (!(value > kTypicalDegradationLow && value <= kTypicalDegradationHigh)) {
      c.warning(kVersionsFile, lv.row, "DEGRADATION_RANGE",
                std::string(name) + " " + fmt_number(value) + " outside (0.5, 1.0]");
    }
  }
  return ok;
}

inline bool check_zone(Checker& c, const Located<ZoneParameters>& lz) {
  const auto& z = lz.record;
  bool ok = true;
  auto require = [&](bool cond, const std::string& message) {
    if (!cond) {
      c.error(kZonesFile, lz.row, "UNIT_VIOLATION", message);
      ok = false;
    }
  };
  require(z.annual_mileage_km > 0.0,
          "annual_mileage_km must be > 0, got " + fmt_number(z.annual_mileage_km));
  require(z.mild_season_fraction >= 0.0 && z.mild_season_fraction <= 1.0,
          "mild_season_fraction must lie in [0, 1], got " + fmt_number(z.mild_season_fraction));
  require(z.emission_factor >= 0.0,
          "emission_factor_kgco2_per_kwh must be >= 0, got " + fmt_number(z.emission_factor));
  return ok;
}

inline bool check_ratios(Checker& c, const Located<ScalingRatios>& lr) {
  const auto& r = lr.record;
  if (r.all_sales_to_top20 >= 1.0 && r.stock_to_top20 >= r.all_sales_to_top20) return true;
  c.error(kRatiosFile, lr.row, "RATIO_ORDER",
          "expected stock_to_top20 >= all_sales_to_top20 >= 1, got " +
              fmt_number(r.stock_to_top20) + " and " + fmt_number(r.all_sales_to_top20));
  return false;
}

struct DatasetBuilder {
  static FleetDataset build(const DatasetTables& tables, Provenance provenance) {
    FleetDataset d;
    for (const auto& v : tables.versions) d.versions_.push_back(v.record);
    for (const auto& s : tables.sales) d.sales_.push_back(s.record);
    for (const auto& z : tables.zones) d.zones_.push_back(z.record);
    for (const auto& r : tables.ratios) d.ratios_.push_back(r.record);
    std::sort(d.versions_.begin(), d.versions_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.model_id, a.year, a.version_id) <
             std::tie(b.model_id, b.year, b.version_id);
    });
    std::sort(d.sales_.begin(), d.sales_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.year, a.zone_id, a.model_id) < std::tie(b.year, b.zone_id, b.model_id);
    });
    std::sort(d.zones_.begin(), d.zones_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.zone_id, a.year) < std::tie(b.zone_id, b.year);
    });
    std::sort(d.ratios_.begin(), d.ratios_.end(),
              [](const auto& a, const auto& b) { return a.year < b.year; });
    d.provenance_ = std::move(provenance);
    return d;
  }
};

// Cross-file and per-record validation shared by the file and in-memory routes.
inline void check_tables(const DatasetTables& tables, ValidationReport& report) {
  Checker c{report};

  // versions: units, duplicates, share sums
  std::map<std::tuple<std::string, std::string, int>, std::size_t> version_keys;
  std::map<std::pair<std::string, int>, std::vector<const Located<VehicleVersion>*>> groups;
  std::set<std::pair<std::string, int>> model_years;
  for (const auto& lv : tables.versions) {
    const auto& v = lv.record;
    const bool ok = check_version(c, lv);
    model_years.emplace(v.model_id, v.year);
    const auto [it, inserted] =
        version_keys.emplace(std::make_tuple(v.model_id, v.version_id, v.year), lv.row);
    if (!inserted) {
      c.error(kVersionsFile, lv.row, "DUPLICATE_KEY",
              "version (" + v.model_id + ", " + v.version_id + ", " + std::to_string(v.year) +
                  ") already defined at row " + std::to_string(it->second));
      continue;
    }
    if (ok) groups[{v.model_id, v.year}].push_back(&lv);
  }
  for (const auto& [key, members] : groups) {
    std::vector<VehicleVersion> versions;
    for (const auto* m : members) versions.push_back(m->record);
    const double sum = share_sum(versions);
    if (std::abs(sum - 1.0) > kShareSumTolerance) {
      std::size_t row = members.front()->row;
      for (const auto* m : members) row = std::min(row, m->row);
      std::ostringstream msg;
      msg << "shares of model '" << key.first << "' in " << key.second << " sum to "
          << std::setprecision(6) << sum << ", expected 1";
      c.error(kVersionsFile, row, "SHARE_SUM", msg.str());
    }
  }

  // zones
  std::map<std::pair<std::string, int>, std::size_t> zone_keys;
  std::set<std::string> zone_ids;
  for (const auto& lz : tables.zones) {
    const auto& z = lz.record;
    check_zone(c, lz);
    const auto [it, inserted] = zone_keys.emplace(std::make_pair(z.zone_id, z.year), lz.row);
    if (!inserted) {
      c.error(kZonesFile, lz.row, "DUPLICATE_KEY",
              "zone (" + z.zone_id + ", " + std::to_string(z.year) +
                  ") already defined at row " + std::to_string(it->second));
    }
    zone_ids.insert(z.zone_id);
  }

  // ratios
  std::map<int, std::size_t> ratio_years;
  for (const auto& lr : tables.ratios) {
    check_ratios(c, lr);
    const auto [it, inserted] = ratio_years.emplace(lr.record.year, lr.row);
    if (!inserted) {
      c.error(kRatiosFile, lr.row, "DUPLICATE_KEY",
              "ratios for " + std::to_string(lr.record.year) + " already defined at row " +
                  std::to_string(it->second));
    }
  }

  // sales: duplicates and dangling references
  std::map<std::tuple<std::string, std::string, int>, std::size_t> sales_keys;
  std::map<std::pair<std::string, int>, std::pair<std::uint64_t, std::size_t>> zone_year_units;
  std::map<int, std::size_t> first_row_of_year;
  for (const auto& ls : tables.sales) {
    const auto& s = ls.record;
    const auto [it, inserted] =
        sales_keys.emplace(std::make_tuple(s.model_id, s.zone_id, s.year), ls.row);
    if (!inserted) {
      c.error(kSalesFile, ls.row, "DUPLICATE_KEY",
              "sales (" + s.model_id + ", " + s.zone_id + ", " + std::to_string(s.year) +
                  ") already defined at row " + std::to_string(it->second));
      continue;
    }
    if (!zone_keys.contains({s.zone_id, s.year})) {
      c.error(kSalesFile, ls.row, "DANGLING_ZONE",
              zone_ids.contains(s.zone_id)
                  ? "zone '" + s.zone_id + "' has no parameters for " + std::to_string(s.year)
                  : "unknown zone '" + s.zone_id + "'");
    }
    if (!model_years.contains({s.model_id, s.year})) {
      c.error(kSalesFile, ls.row, "DANGLING_MODEL",
              "model '" + s.model_id + "' has no versions for " + std::to_string(s.year));
    }
    if (s.units == 0) {
      c.warning(kSalesFile, ls.row, "ZERO_SALES",
                "zero units for (" + s.model_id + ", " + s.zone_id + ", " +
                    std::to_string(s.year) + ")");
    }
    auto& [units, row] = zone_year_units.try_emplace({s.zone_id, s.year}, 0, ls.row)
                             .first->second;
    units += s.units;
    row = std::min(row, ls.row);
    auto [year_it, _] = first_row_of_year.try_emplace(s.year, ls.row);
    year_it->second = std::min(year_it->second, ls.row);
  }
  for (const auto& [key, value] : zone_year_units) {
    if (value.first == 0) {
      c.warning(kSalesFile, value.second, "ZERO_FLEET",
                "zone '" + key.first + "' sold no vehicles in " + std::to_string(key.second) +
                    "; per-vehicle intensity is undefined for that year");
    }
  }
  if (tables.has_ratios) {
    for (const auto& [year, row] : first_row_of_year) {
      if (!ratio_years.contains(year)) {
        c.warning(kSalesFile, row, "NO_RATIO",
                  "no scaling ratios for " + std::to_string(year) + " in ratios.csv");
      }
    }
  }

  auto by_location = [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.file, a.row) < std::tie(b.file, b.row);
  };
  std::stable_sort(report.errors.begin(), report.errors.end(), by_location);
  std::stable_sort(report.warnings.begin(), report.warnings.end(), by_location);
}

inline std::string combined_checksum(const std::vector<FileChecksum>& files) {
  std::string lines;
  for (const auto& f : files) lines += f.sha256 + "  " + f.file + "\n";
  return sha256_hex(lines);
}

inline void append(std::vector<Diagnostic>& into, std::vector<Diagnostic>& from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()),
              std::make_move_iterator(from.end()));
}

struct ParsedDirectory {
  DatasetTables tables;
  ValidationReport report;
  std::vector<FileChecksum> checksums;
};

inline ParsedDirectory parse_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::io, "IO_ERROR", "dataset directory not found: " + dir.string());
  }
  ParsedDirectory out;
  auto& t = out.tables;

  // Per-file parsing runs concurrently; cross-checks follow.
  auto versions = std::async(std::launch::async, [&] {
    return parse_file(dir, kVersionsFile, kVersionsColumns, true, [&](RowReader& r, auto line) {
      auto rec = read_version(r, line);
      if (r.ok()) t.versions.push_back(std::move(rec));
    });
  });
  auto sales = std::async(std::launch::async, [&] {
    return parse_file(dir, kSalesFile, kSalesColumns, true, [&](RowReader& r, auto line) {
      auto rec = read_sales(r, line);
      if (r.ok()) t.sales.push_back(std::move(rec));
    });
  });
  auto zones = std::async(std::launch::async, [&] {
    return parse_file(dir, kZonesFile, kZonesColumns, true, [&](RowReader& r, auto line) {
      auto rec = read_zone(r, line);
      if (r.ok()) t.zones.push_back(std::move(rec));
    });
  });
  auto ratios = std::async(std::launch::async, [&] {
    return parse_file(dir, kRatiosFile, kRatiosColumns, false, [&](RowReader& r, auto line) {
      auto rec = read_ratios(r, line);
      if (r.ok()) t.ratios.push_back(std::move(rec));
    });
  });

  std::vector<FileParse> files;
  files.push_back(ratios.get());
  files.push_back(sales.get());
  files.push_back(versions.get());
  files.push_back(zones.get());  // alphabetical
  for (auto& f : files) {
    append(out.report.errors, f.errors);
    append(out.report.warnings, f.warnings);
    if (f.present && !f.sha256.empty()) out.checksums.push_back({f.name, f.sha256});
  }
  t.has_ratios = files.front().present;
  return out;
}

}  // namespace detail

/// Parses and validates `dir`. The dataset is returned only when the report
/// holds no errors; warnings never block. Throws Error{io} when `dir` is not
/// a readable directory.
inline LoadResult load_dataset(const std::filesystem::path& dir) {
  auto parsed = detail::parse_directory(dir);
  LoadResult out;
  out.report = std::move(parsed.report);
  if (out.report.has_io_error()) return out;
  detail::check_tables(parsed.tables, out.report);
  if (!out.report.ok()) return out;
  Provenance provenance;
  provenance.source = dir.string();
  provenance.files = std::move(parsed.checksums);
  provenance.checksum = detail::combined_checksum(provenance.files);
  out.dataset = detail::DatasetBuilder::build(parsed.tables, std::move(provenance));
  return out;
}

/// Full diagnostic pass without constructing a dataset.
inline ValidationReport validate_only(const std::filesystem::path& dir) {
  auto parsed = detail::parse_directory(dir);
  if (!parsed.report.has_io_error()) detail::check_tables(parsed.tables, parsed.report);
  return std::move(parsed.report);
}

/// Serializes records in the on-disk schemas. Used for checksums of
/// in-memory datasets and by tools that write fixtures.
inline std::string to_csv(std::span<const VehicleVersion> versions) {
  std::ostringstream out;
  out << "model_id,version_id,year,battery_kwh,nedc_km,share,lambda,rho\n";
  for (const auto& v : versions) {
    csv::write_row(out, std::vector<std::string>{
                            v.model_id, v.version_id, std::to_string(v.year),
                            csv::format_double(v.battery_kwh), csv::format_double(v.nedc_km),
                            csv::format_double(v.sales_share),
                            csv::format_double(v.mild_degradation),
                            csv::format_double(v.harsh_degradation)});
  }
  return out.str();
}

inline std::string to_csv(std::span<const SalesRecord> sales) {
  std::ostringstream out;
  out << "model_id,zone_id,year,units\n";
  for (const auto& s : sales) {
    csv::write_row(out, std::vector<std::string>{s.model_id, s.zone_id, std::to_string(s.year),
                                                 std::to_string(s.units)});
  }
  return out.str();
}

inline std::string to_csv(std::span<const ZoneParameters> zones) {
  std::ostringstream out;
  out << "zone_id,year,annual_mileage_km,mild_season_fraction,emission_factor_kgco2_per_kwh\n";
  for (const auto& z : zones) {
    csv::write_row(out, std::vector<std::string>{
                            z.zone_id, std::to_string(z.year),
                            csv::format_double(z.annual_mileage_km),
                            csv::format_double(z.mild_season_fraction),
                            csv::format_double(z.emission_factor)});
  }
  return out.str();
}

inline std::string to_csv(std::span<const ScalingRatios> ratios) {
  std::ostringstream out;
  out << "year,stock_to_top20,all_sales_to_top20\n";
  for (const auto& r : ratios) {
    csv::write_row(out, std::vector<std::string>{std::to_string(r.year),
                                                 csv::format_double(r.stock_to_top20),
                                                 csv::format_double(r.all_sales_to_top20)});
  }
  return out.str();
}

/// Validates in-memory records. Rows in diagnostics are index + 2, as if each
/// vector had been read from a file with a header line.
inline LoadResult make_dataset(std::vector<VehicleVersion> versions,
                               std::vector<SalesRecord> sales,
                               std::vector<ZoneParameters> zones,
                               std::vector<ScalingRatios> ratios = {}) {
  DatasetTables tables;
  auto locate = [](auto& source, auto& target) {
    for (std::size_t i = 0; i < source.size(); ++i) {
      target.push_back({std::move(source[i]), i + 2});
    }
  };
  const bool has_ratios = !ratios.empty();
  LoadResult out;
  detail::Checker year_check{out.report};
  auto check_year = [&](std::string_view file, std::size_t row, int year) {
    if (year < kMinYear || year > kMaxYear) {
      year_check.error(file, row, "YEAR_RANGE", "year " + std::to_string(year) + " out of range");
    }
  };
  for (std::size_t i = 0; i < versions.size(); ++i) check_year(kVersionsFile, i + 2, versions[i].year);
  for (std::size_t i = 0; i < sales.size(); ++i) check_year(kSalesFile, i + 2, sales[i].year);
  for (std::size_t i = 0; i < zones.size(); ++i) check_year(kZonesFile, i + 2, zones[i].year);
  for (std::size_t i = 0; i < ratios.size(); ++i) check_year(kRatiosFile, i + 2, ratios[i].year);

  std::vector<FileChecksum> checksums;
  auto sorted_csv = [](auto records, auto key) {
    std::sort(records.begin(), records.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    return to_csv(std::span(std::as_const(records)));
  };
  if (has_ratios) {
    checksums.push_back({std::string(kRatiosFile),
                         sha256_hex(sorted_csv(ratios, [](const auto& r) { return r.year; }))});
  }
  checksums.push_back({std::string(kSalesFile), sha256_hex(sorted_csv(sales, [](const auto& s) {
                         return std::tie(s.year, s.zone_id, s.model_id);
                       }))});
  checksums.push_back(
      {std::string(kVersionsFile), sha256_hex(sorted_csv(versions, [](const auto& v) {
         return std::tie(v.model_id, v.year, v.version_id);
       }))});
  checksums.push_back({std::string(kZonesFile), sha256_hex(sorted_csv(zones, [](const auto& z) {
                         return std::tie(z.zone_id, z.year);
                       }))});

  locate(versions, tables.versions);
  locate(sales, tables.sales);
  locate(zones, tables.zones);
  locate(ratios, tables.ratios);
  tables.has_ratios = has_ratios;

  detail::check_tables(tables, out.report);
  if (!out.report.ok()) return out;
  Provenance provenance;
  provenance.source = "<memory>";
  provenance.files = std::move(checksums);
  provenance.checksum = detail::combined_checksum(provenance.files);
  out.dataset = detail::DatasetBuilder::build(tables, std::move(provenance));
  return out;
}

}  // namespace bevcharge
