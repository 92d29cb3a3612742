#pragma once

// Serializers for result trees (JSON, long-form CSV) and the tabular reports
// (Markdown or long-form CSV) built on top of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bevcharge/analytics.hpp"
#include "bevcharge/csv.hpp"
#include "bevcharge/dataset.hpp"
#include "bevcharge/error.hpp"
#include "bevcharge/result_tree.hpp"
#include "bevcharge/uncertainty.hpp"
#include "bevcharge/version.hpp"

namespace bevcharge {

inline constexpr std::string_view kResultSchemaId = "bevcharge.result-tree/1";

enum class Level { version, model, zone, national };
enum class Format { json, csv, md };

inline std::string_view to_string(Level level) {
  switch (level) {
    case Level::version: return "version";
    case Level::model: return "model";
    case Level::zone: return "zone";
    case Level::national: return "national";
  }
  return "national";
}

inline std::string_view to_string(Format format) {
  switch (format) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::md: return "md";
  }
  return "csv";
}

struct ReportOptions {
  double uncertainty = kDefaultUncertainty;
  std::optional<ScaleTarget> scale;
  FleetMode fleet_mode = FleetMode::cumulative;
  bool intensity = false;
  bool growth = false;
};

struct ReportSpec {
  Level level = Level::national;
  Format format = Format::md;
  std::vector<int> years;
  ReportOptions options;
};

/// Rejects option combinations the report writer cannot honour.
inline void check_report_spec(const ReportSpec& spec) {
  auto usage = [](const std::string& message) {
    throw Error(ErrorKind::usage, "USAGE", message);
  };
  if (spec.years.empty()) usage("report needs at least one year");
  if (spec.format == Format::json) usage("reports are written as md or csv");
  if (spec.options.intensity && spec.level == Level::version) {
    usage("--intensity is not defined at version level (no per-version fleet)");
  }
  if (spec.options.scale && (spec.level == Level::version || spec.level == Level::model)) {
    usage("--scale applies national ratios and needs --level zone or national");
  }
  if (!(spec.options.uncertainty >= 0.0 && spec.options.uncertainty < 1.0)) {
    usage("uncertainty fraction must lie in [0, 1)");
  }
}

// Provenance stamped on every output. Carries no timestamp.
struct ReportHeader {
  std::string dataset_checksum;
  std::string source;
  std::string tool_version = kVersion;
  std::vector<std::pair<std::string, std::string>> options;
};

inline ReportHeader make_header(const FleetDataset& data,
                                std::vector<std::pair<std::string, std::string>> options) {
  return {data.provenance().checksum, data.provenance().source, kVersion, std::move(options)};
}

inline std::string join_years(const std::vector<int>& years) {
  std::string out;
  for (std::size_t i = 0; i < years.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(years[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Result tree serialization

inline nlohmann::ordered_json to_json(const ResultTree& tree, const ReportHeader& header,
                                      const Provenance* provenance = nullptr) {
  using nlohmann::ordered_json;
  ordered_json root;
  root["schema"] = kResultSchemaId;
  ordered_json prov;
  prov["tool"] = kToolName;
  prov["tool_version"] = header.tool_version;
  prov["dataset_checksum"] = header.dataset_checksum;
  prov["source"] = header.source;
  if (provenance) {
    ordered_json files = ordered_json::array();
    for (const auto& f : provenance->files) files.push_back({{"file", f.file}, {"sha256", f.sha256}});
    prov["files"] = std::move(files);
  }
  ordered_json options = ordered_json::object();
  for (const auto& [k, v] : header.options) options[k] = v;
  prov["options"] = std::move(options);
  root["provenance"] = std::move(prov);
  root["units"] = {{"energy", "kWh"}, {"emissions", "kgCO2"}, {"emission_factor", "kgCO2/kWh"}};

  auto band_json = [](const auto& band) {
    return ordered_json{{"low", band.low.base()}, {"mid", band.mid.base()}, {"high", band.high.base()}};
  };

  ordered_json years = ordered_json::array();
  for (const auto& y : tree.years) {
    ordered_json yj;
    yj["year"] = y.year;
    yj["energy_kwh"] = y.energy.base();
    yj["emissions_kgco2"] = y.emissions.base();
    yj["units"] = y.units;
    yj["cumulative_units"] = y.cumulative_units;
    if (y.energy_band && y.emissions_band) {
      yj["band"] = {{"energy_kwh", band_json(*y.energy_band)},
                    {"emissions_kgco2", band_json(*y.emissions_band)}};
    }
    ordered_json zones = ordered_json::array();
    for (const auto& z : y.zones) {
      ordered_json zj;
      zj["zone_id"] = z.zone_id;
      zj["emission_factor_kgco2_per_kwh"] = z.emission_factor;
      zj["energy_kwh"] = z.energy.base();
      zj["emissions_kgco2"] = z.emissions.base();
      zj["units"] = z.units;
      zj["cumulative_units"] = z.cumulative_units;
      ordered_json models = ordered_json::array();
      for (const auto& m : z.models) {
        ordered_json mj;
        mj["model_id"] = m.model_id;
        mj["energy_kwh"] = m.energy.base();
        mj["emissions_kgco2"] = m.emissions.base();
        mj["units"] = m.units;
        mj["cumulative_units"] = m.cumulative_units;
        ordered_json versions = ordered_json::array();
        for (const auto& v : m.versions) {
          versions.push_back({{"version_id", v.version_id},
                              {"sales_share", v.sales_share},
                              {"mild_kwh", v.energy.mild.base()},
                              {"harsh_kwh", v.energy.harsh.base()},
                              {"annual_kwh", v.energy.annual.base()},
                              {"emissions_kgco2", v.emissions.base()}});
        }
        mj["versions"] = std::move(versions);
        models.push_back(std::move(mj));
      }
      zj["models"] = std::move(models);
      zones.push_back(std::move(zj));
    }
    yj["zones"] = std::move(zones);
    years.push_back(std::move(yj));
  }
  root["years"] = std::move(years);
  return root;
}

inline std::string render_json(const ResultTree& tree, const ReportHeader& header,
                               const Provenance* provenance = nullptr) {
  return to_json(tree, header, provenance).dump(2) + "\n";
}

inline void write_provenance_comments(std::ostream& out, const ReportHeader& header) {
  out << "# tool=" << kToolName << " " << header.tool_version << "\n";
  out << "# dataset_checksum=" << header.dataset_checksum << "\n";
  out << "# source=" << header.source << "\n";
  for (const auto& [k, v] : header.options) out << "# option." << k << "=" << v << "\n";
}

inline constexpr std::string_view kComputeCsvHeader = "level,scope,year,metric,value,unit";

/// One row per (level, scope, year, metric), values in base units at full
/// precision.
inline std::string render_compute_csv(const ResultTree& tree, const ReportHeader& header) {
  std::ostringstream out;
  write_provenance_comments(out, header);
  out << kComputeCsvHeader << "\n";
  auto row = [&](std::string_view level, const std::string& scope, int year,
                 std::string_view metric, double value, std::string_view unit) {
    csv::write_row(out, std::vector<std::string>{std::string(level), scope, std::to_string(year),
                                                 std::string(metric), csv::format_double(value),
                                                 std::string(unit)});
  };
  for (const auto& y : tree.years) {
    const std::string nat = "national";
    row("national", nat, y.year, "energy", y.energy.base(), "kWh");
    row("national", nat, y.year, "emissions", y.emissions.base(), "kgCO2");
    row("national", nat, y.year, "units", static_cast<double>(y.units), "vehicles");
    row("national", nat, y.year, "cumulative_units", static_cast<double>(y.cumulative_units),
        "vehicles");
    if (y.energy_band && y.emissions_band) {
      row("national", nat, y.year, "energy_low", y.energy_band->low.base(), "kWh");
      row("national", nat, y.year, "energy_high", y.energy_band->high.base(), "kWh");
      row("national", nat, y.year, "emissions_low", y.emissions_band->low.base(), "kgCO2");
      row("national", nat, y.year, "emissions_high", y.emissions_band->high.base(), "kgCO2");
    }
    for (const auto& z : y.zones) {
      row("zone", z.zone_id, y.year, "energy", z.energy.base(), "kWh");
      row("zone", z.zone_id, y.year, "emissions", z.emissions.base(), "kgCO2");
      row("zone", z.zone_id, y.year, "emission_factor", z.emission_factor, "kgCO2/kWh");
      row("zone", z.zone_id, y.year, "units", static_cast<double>(z.units), "vehicles");
      row("zone", z.zone_id, y.year, "cumulative_units", static_cast<double>(z.cumulative_units),
          "vehicles");
      for (const auto& m : z.models) {
        const auto ms = z.zone_id + "/" + m.model_id;
        row("model", ms, y.year, "energy", m.energy.base(), "kWh");
        row("model", ms, y.year, "emissions", m.emissions.base(), "kgCO2");
        row("model", ms, y.year, "units", static_cast<double>(m.units), "vehicles");
        row("model", ms, y.year, "cumulative_units", static_cast<double>(m.cumulative_units),
            "vehicles");
        for (const auto& v : m.versions) {
          const auto vs = ms + "/" + v.version_id;
          row("version", vs, y.year, "mild_energy", v.energy.mild.base(), "kWh");
          row("version", vs, y.year, "harsh_energy", v.energy.harsh.base(), "kWh");
          row("version", vs, y.year, "energy", v.energy.annual.base(), "kWh");
          row("version", vs, y.year, "emissions", v.emissions.base(), "kgCO2");
          row("version", vs, y.year, "sales_share", v.sales_share, "fraction");
        }
      }
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Report tables

struct Metric {
  std::string name;
  std::string unit;
  int decimals = 1;
};

struct TableRow {
  std::string scope;
  int year = 0;
  std::vector<std::optional<double>> values;  // nullopt renders as an empty cell
};

struct Table {
  std::string name;
  std::string title;
  std::vector<Metric> metrics;
  std::vector<TableRow> rows;
};

/// Rounds percentages to `decimals` places so they sum exactly to 100
/// (largest-remainder apportionment). Zero total gives all zeros.
inline std::vector<double> apportion_percentages(const std::vector<double>& values,
                                                 int decimals = 1) {
  std::vector<double> out(values.size(), 0.0);
  double total = 0.0;
  for (double v : values) total += v;
  if (!(total > 0.0)) return out;
  const double scale = std::pow(10.0, decimals);
  const auto target = static_cast<std::int64_t>(std::llround(100.0 * scale));
  std::vector<std::int64_t> units(values.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double exact = values[i] / total * 100.0 * scale;
    units[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += units[i];
    remainders.emplace_back(exact - static_cast<double>(units[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < target && k < remainders.size(); ++k, ++assigned) {
    ++units[remainders[k].second];
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<double>(units[i]) / scale;
  }
  return out;
}

namespace detail {

// Flattened scope rows at one level for one year.
inline std::vector<std::pair<ScopeTotals, std::string>> scopes_at(const YearResult& y,
                                                                  Level level) {
  std::vector<std::pair<ScopeTotals, std::string>> out;  // (totals, parent scope)
  switch (level) {
    case Level::national:
      out.emplace_back(totals(y), "");
      break;
    case Level::zone:
      for (const auto& z : y.zones) out.emplace_back(totals(z, y.year), "national");
      break;
    case Level::model:
      for (const auto& z : y.zones) {
        for (const auto& m : z.models) out.emplace_back(totals(m, z.zone_id, y.year), z.zone_id);
      }
      break;
    case Level::version:
      for (const auto& z : y.zones) {
        for (const auto& m : z.models) {
          for (const auto& v : m.versions) {
            ScopeTotals t;
            t.scope = z.zone_id + "/" + m.model_id + "/" + v.version_id;
            t.year = y.year;
            t.energy = v.energy.annual;
            t.emissions = v.emissions;
            out.emplace_back(std::move(t), z.zone_id + "/" + m.model_id);
          }
        }
      }
      break;
  }
  return out;
}

}  // namespace detail

inline std::vector<Table> build_report_tables(const ResultTree& tree, const FleetDataset& data,
                                              const ReportSpec& spec) {
  check_report_spec(spec);
  const auto& opts = spec.options;
  std::vector<Table> tables;

  Table totals_table{"totals", "Electricity consumption and emissions",
                     {{"energy", "GWh", 1},
                      {"energy_low", "GWh", 1},
                      {"energy_high", "GWh", 1},
                      {"emissions", "MtCO2", 2}},
                     {}};
  Table contribution{"contribution", "Contribution to parent scope electricity consumption",
                     {{"share", "%", 1}}, {}};
  for (const auto& y : tree.years) {
    const auto scopes = detail::scopes_at(y, spec.level);
    for (const auto& [t, parent] : scopes) {
      const auto band = uncertainty_band(t.energy, opts.uncertainty);
      totals_table.rows.push_back({t.scope, y.year,
                                   {to_gwh(t.energy), to_gwh(band.low), to_gwh(band.high),
                                    to_mt_co2(t.emissions)}});
    }
    if (spec.level == Level::national) continue;
    std::map<std::string, std::vector<std::size_t>> by_parent;
    for (std::size_t i = 0; i < scopes.size(); ++i) by_parent[scopes[i].second].push_back(i);
    for (const auto& [parent, members] : by_parent) {
      std::vector<double> energies;
      for (auto i : members) energies.push_back(scopes[i].first.energy.base());
      const auto shares = apportion_percentages(energies);
      double total = 0.0;
      for (double e : energies) total += e;
      if (!(total > 0.0)) continue;
      for (std::size_t k = 0; k < members.size(); ++k) {
        contribution.rows.push_back({scopes[members[k]].first.scope, y.year, {shares[k]}});
      }
    }
  }
  tables.push_back(std::move(totals_table));
  if (spec.level != Level::national) tables.push_back(std::move(contribution));

  auto intensity_of = [&](const ScopeTotals& t) {
    return energy_intensity(t, opts.fleet_mode);
  };

  if (opts.growth) {
    Table growth{"growth", "Annual change rate", {{"energy_growth", "%", 1},
                                                  {"emissions_growth", "%", 1}}, {}};
    if (opts.intensity) {
      growth.metrics.push_back({"energy_intensity_growth", "%", 1});
      growth.metrics.push_back({"carbon_intensity_growth", "%", 1});
    }
    for (std::size_t i = 1; i < tree.years.size(); ++i) {
      const auto& prev_year = tree.years[i - 1];
      const auto& cur_year = tree.years[i];
      std::map<std::string, ScopeTotals> previous;
      for (auto& [t, parent] : detail::scopes_at(prev_year, spec.level)) previous[t.scope] = t;
      for (const auto& [cur, parent] : detail::scopes_at(cur_year, spec.level)) {
        const auto it = previous.find(cur.scope);
        if (it == previous.end()) continue;
        const auto& prev = it->second;
        auto rate = [](double a, double b) -> std::optional<double> {
          if (!(a > 0.0)) return std::nullopt;
          return growth_rate(a, b);
        };
        TableRow row{cur.scope, cur_year.year,
                     {rate(prev.energy.base(), cur.energy.base()),
                      rate(prev.emissions.base(), cur.emissions.base())}};
        if (opts.intensity) {
          const auto pi = intensity_of(prev);
          const auto ci = intensity_of(cur);
          row.values.push_back(rate(pi.energy_intensity, ci.energy_intensity));
          row.values.push_back(rate(pi.carbon_intensity, ci.carbon_intensity));
        }
        if (std::all_of(row.values.begin(), row.values.end(),
                        [](const auto& v) { return !v.has_value(); })) {
          continue;
        }
        growth.rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(growth));
  }

  if (opts.intensity) {
    Table intensity{"intensity",
                    std::string("Average intensity per vehicle (") +
                        std::string(to_string(opts.fleet_mode)) + " fleet)",
                    {{"energy_intensity", "kWh/vehicle", 1},
                     {"carbon_intensity", "kgCO2/vehicle", 1},
                     {"fleet", "vehicles", 0}},
                    {}};
    for (const auto& y : tree.years) {
      for (const auto& [t, parent] : detail::scopes_at(y, spec.level)) {
        const auto r = intensity_of(t);
        intensity.rows.push_back({t.scope, y.year,
                                  {r.energy_intensity, r.carbon_intensity,
                                   static_cast<double>(r.fleet_count)}});
      }
    }
    tables.push_back(std::move(intensity));
  }

  if (opts.scale) {
    Table scaled{"scaled",
                 "Top-20 totals scaled to " + std::string(to_string(*opts.scale)) +
                     " (zone rows use the national ratio)",
                 {{"ratio", "x", 2},
                  {"top20_energy", "GWh", 1},
                  {"scaled_energy", "GWh", 1},
                  {"top20_emissions", "MtCO2", 2},
                  {"scaled_emissions", "MtCO2", 2},
                  {"uniform_ratio_estimate", "flag", 0}},
                 {}};
    for (const auto& y : tree.years) {
      const auto s = scale_to_population(y, std::span(data.ratios()), *opts.scale);
      scaled.rows.push_back({"national", y.year,
                             {s.ratio, to_gwh(y.energy), to_gwh(s.energy), to_mt_co2(y.emissions),
                              to_mt_co2(s.emissions), 0.0}});
      if (spec.level == Level::zone) {
        for (std::size_t k = 0; k < s.zones.size(); ++k) {
          const auto& z = y.zones[k];
          scaled.rows.push_back({z.zone_id, y.year,
                                 {s.ratio, to_gwh(z.energy), to_gwh(s.zones[k].energy),
                                  to_mt_co2(z.emissions), to_mt_co2(s.zones[k].emissions),
                                  s.uniform_ratio_estimate ? 1.0 : 0.0}});
        }
      }
    }
    tables.push_back(std::move(scaled));
  }
  return tables;
}

inline std::string format_fixed(double value, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  // Avoid "-0.0" after rounding.
  const double scale = std::pow(10.0, decimals);
  if (std::round(value * scale) == 0.0) value = 0.0;
  out << value;
  return out.str();
}

inline std::string render_markdown(const std::vector<Table>& tables, const ReportHeader& header) {
  std::ostringstream out;
  out << "# " << kToolName << " report\n\n";
  out << "- tool: " << kToolName << " " << header.tool_version << "\n";
  out << "- dataset checksum: `" << header.dataset_checksum << "`\n";
  out << "- source: `" << header.source << "`\n";
  out << "- options:";
  for (const auto& [k, v] : header.options) out << " " << k << "=" << v;
  out << "\n";
  for (const auto& t : tables) {
    out << "\n## " << t.title << "\n\n| scope | year |";
    for (const auto& m : t.metrics) out << " " << m.name << " (" << m.unit << ") |";
    out << "\n|---|---:|";
    for (std::size_t i = 0; i < t.metrics.size(); ++i) out << "---:|";
    out << "\n";
    for (const auto& r : t.rows) {
      out << "| " << r.scope << " | " << r.year << " |";
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        out << " " << (r.values[i] ? format_fixed(*r.values[i], t.metrics[i].decimals) : "")
            << " |";
      }
      out << "\n";
    }
  }
  return out.str();
}

inline constexpr std::string_view kReportCsvHeader = "table,scope,year,metric,value,unit";

inline std::string render_report_csv(const std::vector<Table>& tables,
                                     const ReportHeader& header) {
  std::ostringstream out;
  write_provenance_comments(out, header);
  out << kReportCsvHeader << "\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        if (!r.values[i]) continue;
        csv::write_row(out, std::vector<std::string>{
                                t.name, r.scope, std::to_string(r.year), t.metrics[i].name,
                                format_fixed(*r.values[i], t.metrics[i].decimals),
                                t.metrics[i].unit});
      }
    }
  }
  return out.str();
}

inline std::string render_report(const ResultTree& tree, const FleetDataset& data,
                                 const ReportSpec& spec, const ReportHeader& header) {
  const auto tables = build_report_tables(tree, data, spec);
  return spec.format == Format::md ? render_markdown(tables, header)
                                   : render_report_csv(tables, header);
}

// ---------------------------------------------------------------------------

/// Writes `content` to a sibling temp file and renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::io, "IO_ERROR", "cannot open " + tmp.string() + " for writing",
                  path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorKind::io, "IO_ERROR", "failed writing " + tmp.string(), path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorKind::io, "IO_ERROR", "cannot move output into place: " + ec.message(),
                path.string());
  }
}

}  // namespace bevcharge
