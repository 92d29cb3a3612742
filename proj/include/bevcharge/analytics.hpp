#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bevcharge/error.hpp"
#include "bevcharge/result_tree.hpp"
#include "bevcharge/types.hpp"
#include "bevcharge/uncertainty.hpp"
#include "bevcharge/units.hpp"

namespace bevcharge {

// Per-vehicle denominators: vehicles sold since the first dataset year, or
// only those sold in the target year.
enum class FleetMode { cumulative, single_year };

enum class ScaleTarget { stock, all_sales };

inline std::string_view to_string(FleetMode mode) {
  return mode == FleetMode::cumulative ? "cumulative" : "single-year";
}

inline std::string_view to_string(ScaleTarget target) {
  return target == ScaleTarget::stock ? "stock" : "all-sales";
}

// Energy and emissions of one scope (national, zone or model-in-zone) in a year.
struct ScopeTotals {
  std::string scope;
  int year = 0;
  EnergyQuantity energy;
  EmissionQuantity emissions;
  std::uint64_t units = 0;
  std::uint64_t cumulative_units = 0;
};

inline ScopeTotals totals(const YearResult& r) {
  return {"national", r.year, r.energy, r.emissions, r.units, r.cumulative_units};
}

inline ScopeTotals totals(const ZoneResult& z, int year) {
  return {z.zone_id, year, z.energy, z.emissions, z.units, z.cumulative_units};
}

inline ScopeTotals totals(const ModelResult& m, std::string_view zone_id, int year) {
  return {std::string(zone_id) + "/" + m.model_id, year, m.energy, m.emissions, m.units,
          m.cumulative_units};
}

inline std::uint64_t fleet_count(const ScopeTotals& t, FleetMode mode) {
  return mode == FleetMode::cumulative ? t.cumulative_units : t.units;
}

struct IntensityResult {
  std::string scope;
  int year = 0;
  double energy_intensity = 0.0;  // kWh per vehicle
  double carbon_intensity = 0.0;  // kgCO2 per vehicle
  std::uint64_t fleet_count = 0;
};

/// Per-vehicle energy and carbon for a scope. Throws ZERO_FLEET when the
/// denominator is zero.
inline IntensityResult energy_intensity(const ScopeTotals& scope, std::uint64_t fleet) {
  if (fleet == 0) {
    throw Error(ErrorKind::validation, "ZERO_FLEET",
                "no vehicles in scope '" + scope.scope + "' for " + std::to_string(scope.year),
                std::string(kSalesFile));
  }
  const double n = static_cast<double>(fleet);
  return {scope.scope, scope.year, scope.energy.base() / n, scope.emissions.base() / n, fleet};
}

inline IntensityResult energy_intensity(const ScopeTotals& scope, FleetMode mode) {
  return energy_intensity(scope, fleet_count(scope, mode));
}

/// Percentage change from `previous` to `current`. Throws UNDEFINED_BASE
/// unless previous > 0.
inline double growth_rate(double previous, double current) {
  if (!(previous > 0.0)) {
    throw Error(ErrorKind::validation, "UNDEFINED_BASE",
                "growth rate needs a positive base, got " + std::to_string(previous));
  }
  return 100.0 * (current - previous) / previous;
}

template <typename Unit>
double growth_rate(Quantity<Unit> previous, Quantity<Unit> current) {
  return growth_rate(previous.base(), current.base());
}

inline double ratio_for(const ScalingRatios& ratios, ScaleTarget target) {
  return target == ScaleTarget::stock ? ratios.stock_to_top20 : ratios.all_sales_to_top20;
}

inline const ScalingRatios& find_ratios(std::span<const ScalingRatios> ratios, int year) {
  for (const auto& r : ratios) {
    if (r.year == year) return r;
  }
  throw Error(ErrorKind::validation, "NO_RATIO",
              "no scaling ratios for year " + std::to_string(year), std::string(kRatiosFile));
}

inline ScopeTotals scale_to_population(const ScopeTotals& scope, const ScalingRatios& ratios,
                                       ScaleTarget target) {
  const double ratio = ratio_for(ratios, target);
  ScopeTotals out = scope;
  out.energy = scope.energy * ratio;
  out.emissions = scope.emissions * ratio;
  return out;
}

// National totals extrapolated to the whole BEV population. Zone entries use
// the national ratio unchanged; `uniform_ratio_estimate` marks that.
struct ScaledResult {
  int year = 0;
  ScaleTarget target = ScaleTarget::stock;
  double ratio = 1.0;
  EnergyQuantity energy;
  EmissionQuantity emissions;
  std::vector<ScopeTotals> zones;
  bool uniform_ratio_estimate = true;
};

inline ScaledResult scale_to_population(const YearResult& national, const ScalingRatios& ratios,
                                        ScaleTarget target) {
  if (ratios.year != national.year) {
    throw Error(ErrorKind::usage, "KEY_MISMATCH",
                "ratios for " + std::to_string(ratios.year) + " applied to " +
                    std::to_string(national.year));
  }
  ScaledResult out;
  out.year = national.year;
  out.target = target;
  out.ratio = ratio_for(ratios, target);
  out.energy = national.energy * out.ratio;
  out.emissions = national.emissions * out.ratio;
  for (const auto& z : national.zones) {
    out.zones.push_back(scale_to_population(totals(z, national.year), ratios, target));
  }
  return out;
}

/// Looks up the year's ratios; throws NO_RATIO when absent.
inline ScaledResult scale_to_population(const YearResult& national,
                                        std::span<const ScalingRatios> ratios,
                                        ScaleTarget target) {
  return scale_to_population(national, find_ratios(ratios, national.year), target);
}

}  // namespace bevcharge
