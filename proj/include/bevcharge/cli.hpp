#pragma once

// Command implementations behind the bevcharge tool. Kept out of main() so
// tests can drive them with string streams.

#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bevcharge/analytics.hpp"
#include "bevcharge/csv.hpp"
#include "bevcharge/dataset.hpp"
#include "bevcharge/error.hpp"
#include "bevcharge/report.hpp"
#include "bevcharge/result_tree.hpp"

namespace bevcharge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;  // validation errors and usage errors
inline constexpr int kExitIo = 3;

inline int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::io ? kExitIo : kExitValidation;
}

[[noreturn]] inline void usage_error(const std::string& message) {
  throw Error(ErrorKind::usage, "USAGE", message);
}

/// Accepts "2022", "2020..2022" or "2020,2022". Empty text means "all".
inline std::vector<int> parse_years(std::string_view text) {
  std::set<int> years;
  text = csv::trim(text);
  if (text.empty()) return {};
  auto year = [&](std::string_view s) {
    const auto y = csv::to_integer<int>(s);
    if (!y) usage_error("bad year '" + std::string(s) + "'");
    return *y;
  };
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const int first = year(text.substr(0, dots));
    const int last = year(text.substr(dots + 2));
    if (last < first) usage_error("year range " + std::string(text) + " is reversed");
    if (last - first > 1000) usage_error("year range " + std::string(text) + " is too wide");
    for (int y = first; y <= last; ++y) years.insert(y);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos
                                                                             : comma - start);
      years.insert(year(piece));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return {years.begin(), years.end()};
}

inline Level parse_level(std::string_view s) {
  for (auto l : {Level::version, Level::model, Level::zone, Level::national}) {
    if (s == to_string(l)) return l;
  }
  usage_error("unknown level '" + std::string(s) + "'");
}

inline Format parse_format(std::string_view s) {
  for (auto f : {Format::json, Format::csv, Format::md}) {
    if (s == to_string(f)) return f;
  }
  usage_error("unknown format '" + std::string(s) + "'");
}

inline ScaleTarget parse_scale(std::string_view s) {
  for (auto t : {ScaleTarget::stock, ScaleTarget::all_sales}) {
    if (s == to_string(t)) return t;
  }
  usage_error("unknown scale target '" + std::string(s) + "'");
}

inline FleetMode parse_fleet_mode(std::string_view s) {
  for (auto m : {FleetMode::cumulative, FleetMode::single_year}) {
    if (s == to_string(m)) return m;
  }
  usage_error("unknown intensity denominator '" + std::string(s) + "'");
}

inline void print_report(const ValidationReport& report, std::ostream& out) {
  for (const auto& d : report.errors) {
    out << "error: " << d.file << ":" << d.row << ": " << d.code << ": " << d.message << "\n";
  }
  for (const auto& d : report.warnings) {
    out << "warning: " << d.file << ":" << d.row << ": " << d.code << ": " << d.message << "\n";
  }
  out << report.errors.size() << " errors, " << report.warnings.size() << " warnings\n";
}

inline void print_error(const Error& e, std::ostream& err) {
  err << "error: ";
  if (!e.file().empty()) {
    err << e.file();
    if (e.row() > 0) err << ":" << e.row();
    err << ": ";
  }
  err << e.code() << ": " << e.what() << "\n";
}

inline int run_validate(const std::filesystem::path& data, std::ostream& out, std::ostream& err) {
  try {
    const auto report = validate_only(data);
    print_report(report, out);
    if (report.has_io_error()) return kExitIo;
    return report.ok() ? kExitOk : kExitValidation;
  } catch (const Error& e) {
    print_error(e, err);
    return exit_code_for(e);
  }
}

// Loads the dataset or reports why it cannot be used.
inline std::optional<FleetDataset> load_or_report(const std::filesystem::path& data,
                                                  std::ostream& err, int& exit_code) {
  auto loaded = load_dataset(data);
  if (!loaded.report.ok()) {
    print_report(loaded.report, err);
    exit_code = loaded.report.has_io_error() ? kExitIo : kExitValidation;
    return std::nullopt;
  }
  return std::move(loaded.dataset);
}

inline void emit(const std::optional<std::filesystem::path>& path, std::string_view content,
                 std::ostream& out) {
  if (path) {
    write_atomically(*path, content);
  } else {
    out << content;
  }
}

struct ComputeRequest {
  std::filesystem::path data;
  std::string years;  // empty: every year in the dataset
  std::optional<std::filesystem::path> out;
  Format format = Format::json;
  unsigned threads = 1;
  double uncertainty = kDefaultUncertainty;
};

inline int run_compute(const ComputeRequest& req, std::ostream& out, std::ostream& err) {
  try {
    if (req.format == Format::md) usage_error("compute writes json or csv");
    int code = kExitOk;
    const auto data = load_or_report(req.data, err, code);
    if (!data) return code;
    auto years = parse_years(req.years);
    if (years.empty()) years = data->years();
    BuildOptions options;
    options.threads = req.threads;
    options.uncertainty = req.uncertainty;
    const auto tree = build_result_tree(*data, years, options);
    const auto header =
        make_header(*data, {{"command", "compute"},
                            {"years", join_years(years)},
                            {"format", std::string(to_string(req.format))},
                            {"uncertainty", csv::format_double(req.uncertainty)}});
    emit(req.out,
         req.format == Format::json ? render_json(tree, header, &data->provenance())
                                    : render_compute_csv(tree, header),
         out);
    return kExitOk;
  } catch (const Error& e) {
    print_error(e, err);
    return exit_code_for(e);
  }
}

struct ReportRequest {
  std::filesystem::path data;
  std::string years;
  std::optional<std::filesystem::path> out;
  Level level = Level::national;
  Format format = Format::md;
  bool intensity = false;
  bool growth = false;
  std::optional<ScaleTarget> scale;
  FleetMode fleet_mode = FleetMode::cumulative;
  double uncertainty = kDefaultUncertainty;
  unsigned threads = 1;
};

inline int run_report(const ReportRequest& req, std::ostream& out, std::ostream& err) {
  try {
    ReportSpec spec;
    spec.level = req.level;
    spec.format = req.format;
    spec.options.intensity = req.intensity;
    spec.options.growth = req.growth;
    spec.options.scale = req.scale;
    spec.options.fleet_mode = req.fleet_mode;
    spec.options.uncertainty = req.uncertainty;
    spec.years = {0};  // placeholder so flag combinations are checked before loading
    check_report_spec(spec);

    int code = kExitOk;
    const auto data = load_or_report(req.data, err, code);
    if (!data) return code;
    spec.years = parse_years(req.years);
    if (spec.years.empty()) spec.years = data->years();

    BuildOptions options;
    options.threads = req.threads;
    options.uncertainty = req.uncertainty;
    const auto tree = build_result_tree(*data, spec.years, options);

    std::vector<std::pair<std::string, std::string>> header_options = {
        {"command", "report"},
        {"level", std::string(to_string(spec.level))},
        {"format", std::string(to_string(spec.format))},
        {"years", join_years(spec.years)},
        {"uncertainty", csv::format_double(req.uncertainty)},
        {"intensity", req.intensity ? "true" : "false"},
        {"intensity_denominator", std::string(to_string(req.fleet_mode))},
        {"growth", req.growth ? "true" : "false"},
        {"scale", req.scale ? std::string(to_string(*req.scale)) : "none"}};
    emit(req.out, render_report(tree, *data, spec, make_header(*data, header_options)), out);
    return kExitOk;
  } catch (const Error& e) {
    print_error(e, err);
    return exit_code_for(e);
  }
}

}  // namespace bevcharge::cli
