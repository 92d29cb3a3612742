#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "bevcharge/dataset.hpp"
#include "bevcharge/error.hpp"
#include "bevcharge/model.hpp"
#include "bevcharge/uncertainty.hpp"
#include "bevcharge/units.hpp"

namespace bevcharge {

struct VersionResult {
  std::string version_id;
  double sales_share = 0.0;
  SeasonalConsumption energy;
  EmissionQuantity emissions;
};

struct ModelResult {
  std::string model_id;
  std::uint64_t units = 0;             // sold in this zone and year
  std::uint64_t cumulative_units = 0;  // sold in this zone from the first dataset year
  EnergyQuantity energy;
  EmissionQuantity emissions;
  std::vector<VersionResult> versions;
};

struct ZoneResult {
  std::string zone_id;
  double emission_factor = 0.0;
  std::uint64_t units = 0;
  std::uint64_t cumulative_units = 0;
  EnergyQuantity energy;
  EmissionQuantity emissions;
  std::vector<ModelResult> models;
};

struct YearResult {
  int year = 0;
  std::uint64_t units = 0;
  std::uint64_t cumulative_units = 0;
  EnergyQuantity energy;
  EmissionQuantity emissions;
  std::vector<ZoneResult> zones;
  std::optional<UncertaintyBand<EnergyQuantity>> energy_band;
  std::optional<UncertaintyBand<EmissionQuantity>> emissions_band;
};

// Energy at every internal node is the canonical-order fold of its children.
// Emissions are the zone factor applied at each level, so a zone's emissions
// equal the sum of its models' only up to rounding.
struct ResultTree {
  std::vector<YearResult> years;

  const YearResult* year(int y) const {
    for (const auto& r : years) {
      if (r.year == y) return &r;
    }
    return nullptr;
  }
};

struct BuildOptions {
  unsigned threads = 1;
  std::optional<double> uncertainty;  // attaches national bands when set
};

namespace detail {

struct Cell {
  const SalesRecord* sales = nullptr;
  const ZoneParameters* zone = nullptr;
  std::span<const VehicleVersion> versions;
  std::uint64_t cumulative_units = 0;
};

inline ModelResult evaluate_cell(const Cell& cell) {
  ModelResult out;
  out.model_id = cell.sales->model_id;
  out.units = cell.sales->units;
  out.cumulative_units = cell.cumulative_units;
  // Dataset versions are already in version-id order.
  for (const auto& v : cell.versions) {
    VersionResult vr;
    vr.version_id = v.version_id;
    vr.sales_share = v.sales_share;
    vr.energy = version_annual_energy(v, *cell.sales, *cell.zone);
    vr.emissions = zone_emissions(vr.energy.annual, *cell.zone);
    out.energy += vr.energy.annual;
    out.versions.push_back(std::move(vr));
  }
  out.emissions = zone_emissions(out.energy, *cell.zone);
  return out;
}

// Evaluates every cell. Results land in cell order whatever `threads` is.
inline std::vector<ModelResult> evaluate_cells(const std::vector<Cell>& cells,
                                               unsigned threads) {
  std::vector<ModelResult> results(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());
  auto run = [&](std::size_t i) {
    try {
      results[i] = evaluate_cell(cells[i]);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), cells.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run(i);
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return results;
}

}  // namespace detail

/// Evaluates the dataset for `years` (duplicates ignored) into a nested
/// version -> model -> zone -> national tree. Every zone with parameters for
/// a year gets a node, even without sales. Throws NO_DATA_YEAR when a
/// requested year has no sales records.
inline ResultTree build_result_tree(const FleetDataset& data, std::span<const int> years,
                                    const BuildOptions& options = {}) {
  const std::set<int> requested(years.begin(), years.end());
  const auto available = data.years();
  for (int y : requested) {
    if (!std::binary_search(available.begin(), available.end(), y)) {
      throw Error(ErrorKind::validation, "NO_DATA_YEAR",
                  "no sales data for year " + std::to_string(y), std::string(kSalesFile));
    }
  }

  // Units sold up to and including `year`; null filters match everything.
  auto cumulative = [&](int year, const std::string* zone, const std::string* model) {
    std::uint64_t total = 0;
    for (const auto& s : data.sales()) {
      if (s.year <= year && (!zone || s.zone_id == *zone) &&
          (!model || s.model_id == *model)) {
        total += s.units;
      }
    }
    return total;
  };

  std::vector<detail::Cell> cells;
  for (const auto& s : data.sales()) {
    if (!requested.contains(s.year)) continue;
    detail::Cell cell;
    cell.sales = &s;
    cell.zone = data.zone(s.zone_id, s.year);
    cell.versions = data.versions_of(s.model_id, s.year);
    cell.cumulative_units = cumulative(s.year, &s.zone_id, &s.model_id);
    cells.push_back(cell);
  }
  auto results = detail::evaluate_cells(cells, options.threads);

  ResultTree tree;
  std::size_t next_cell = 0;
  for (int y : requested) {
    YearResult year;
    year.year = y;
    year.cumulative_units = cumulative(y, nullptr, nullptr);
    std::vector<ZoneEnergy> zone_energies;
    std::vector<ZoneEmissions> zone_emission_list;
    for (const auto& zp : data.zones()) {
      if (zp.year != y) continue;
      ZoneResult zone;
      zone.zone_id = zp.zone_id;
      zone.emission_factor = zp.emission_factor;
      zone.cumulative_units = cumulative(y, &zp.zone_id, nullptr);
      year.zones.push_back(std::move(zone));
    }
    // data.zones() is ordered (zone, year), so zones arrive in id order.
    while (next_cell < cells.size() && cells[next_cell].sales->year == y) {
      const auto& zone_id = cells[next_cell].sales->zone_id;
      auto zone = std::find_if(year.zones.begin(), year.zones.end(),
                               [&](const ZoneResult& z) { return z.zone_id == zone_id; });
      zone->models.push_back(std::move(results[next_cell]));
      ++next_cell;
    }
    for (auto& zone : year.zones) {
      std::vector<ModelEnergy> model_energies;
      for (const auto& m : zone.models) {
        model_energies.push_back({m.model_id, zone.zone_id, y, m.energy});
        zone.units += m.units;
      }
      zone.energy = zone_energy(model_energies);
      zone.emissions = zone_emissions(zone.energy, *data.zone(zone.zone_id, y));
      year.units += zone.units;
      zone_energies.push_back({zone.zone_id, y, zone.energy});
      zone_emission_list.push_back({zone.zone_id, y, zone.emissions});
    }
    year.energy = national_energy(zone_energies);
    year.emissions = national_emissions(zone_emission_list);
    if (options.uncertainty) {
      year.energy_band = uncertainty_band(year.energy, *options.uncertainty);
      year.emissions_band = uncertainty_band(year.emissions, *options.uncertainty);
    }
    tree.years.push_back(std::move(year));
  }
  return tree;
}

}  // namespace bevcharge
