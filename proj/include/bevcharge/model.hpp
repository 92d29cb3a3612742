#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bevcharge/error.hpp"
#include "bevcharge/types.hpp"
#include "bevcharge/units.hpp"

namespace bevcharge {

/// Tolerance on the sum of version shares within one (model, year).
inline constexpr double kShareSumTolerance = 1e-6;

namespace detail {

inline void check_alignment(const VehicleVersion& version, const SalesRecord& sales,
                            const ZoneParameters& zone) {
  if (version.model_id != sales.model_id) {
    throw Error(ErrorKind::usage, "KEY_MISMATCH",
                "version belongs to model '" + version.model_id +
                    "' but sales record is for '" + sales.model_id + "'");
  }
  if (sales.zone_id != zone.zone_id) {
    throw Error(ErrorKind::usage, "KEY_MISMATCH",
                "sales record is for zone '" + sales.zone_id +
                    "' but parameters are for '" + zone.zone_id + "'");
  }
  if (version.year != sales.year || sales.year != zone.year) {
    throw Error(ErrorKind::usage, "KEY_MISMATCH",
                "year mismatch: version " + std::to_string(version.year) + ", sales " +
                    std::to_string(sales.year) + ", zone " + std::to_string(zone.year));
  }
}

// share * units * (km * battery) / (coefficient * nedc)
inline EnergyQuantity seasonal_energy(const VehicleVersion& version,
                                      const SalesRecord& sales, double seasonal_km,
                                      double coefficient) {
  const double value = version.sales_share * static_cast<double>(sales.units) *
                       (seasonal_km * version.battery_kwh) /
                       (coefficient * version.nedc_km);
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::computation, "NON_FINITE",
                "non-finite consumption for " + version.model_id + "/" +
                    version.version_id);
  }
  return kwh(value);
}

}  // namespace detail

/// Spring/autumn consumption of one version's share of a model's zone sales.
/// Uses the mild-season fraction of the zone's annual mileage.
inline EnergyQuantity mild_season_energy(const VehicleVersion& version,
                                         const SalesRecord& sales,
                                         const ZoneParameters& zone) {
  detail::check_alignment(version, sales, zone);
  const double km = zone.mild_season_fraction * zone.annual_mileage_km;
  return detail::seasonal_energy(version, sales, km, version.mild_degradation);
}

/// Summer/winter counterpart of mild_season_energy.
inline EnergyQuantity harsh_season_energy(const VehicleVersion& version,
                                          const SalesRecord& sales,
                                          const ZoneParameters& zone) {
  detail::check_alignment(version, sales, zone);
  const double km = (1.0 - zone.mild_season_fraction) * zone.annual_mileage_km;
  return detail::seasonal_energy(version, sales, km, version.harsh_degradation);
}

inline SeasonalConsumption version_annual_energy(const VehicleVersion& version,
                                                 const SalesRecord& sales,
                                                 const ZoneParameters& zone) {
  SeasonalConsumption out;
  out.mild = mild_season_energy(version, sales, zone);
  out.harsh = harsh_season_energy(version, sales, zone);
  out.annual = out.mild + out.harsh;
  return out;
}

/// Sum of version shares; callers compare against 1 with kShareSumTolerance.
inline double share_sum(std::span<const VehicleVersion> versions) {
  std::vector<const VehicleVersion*> sorted;
  sorted.reserve(versions.size());
  for (const auto& v : versions) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->version_id < b->version_id; });
  double sum = 0.0;
  for (const auto* v : sorted) sum += v->sales_share;
  return sum;
}

/// Annual consumption of one model in one zone: the per-version annual
/// totals folded in version-id order.
inline EnergyQuantity model_energy(std::span<const VehicleVersion> versions,
                                   const SalesRecord& sales, const ZoneParameters& zone) {
  if (versions.empty()) {
    throw Error(ErrorKind::usage, "NO_VERSIONS",
                "model '" + sales.model_id + "' has no versions in " +
                    std::to_string(sales.year));
  }
  const double sum = share_sum(versions);
  if (std::abs(sum - 1.0) > kShareSumTolerance) {
    throw Error(ErrorKind::validation, "SHARE_SUM",
                "version shares of model '" + sales.model_id + "' sum to " +
                    std::to_string(sum));
  }
  std::vector<const VehicleVersion*> sorted;
  for (const auto& v : versions) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->version_id < b->version_id; });
  EnergyQuantity total;
  for (const auto* v : sorted) total += version_annual_energy(*v, sales, zone).annual;
  return total;
}

struct ModelEnergy {
  std::string model_id;
  std::string zone_id;
  int year = 0;
  EnergyQuantity energy;
};

struct ZoneEnergy {
  std::string zone_id;
  int year = 0;
  EnergyQuantity energy;
};

struct ZoneEmissions {
  std::string zone_id;
  int year = 0;
  EmissionQuantity emissions;
};

/// Zone total: model results folded in model-id order.
inline EnergyQuantity zone_energy(std::span<const ModelEnergy> models) {
  if (models.empty()) return {};
  std::vector<const ModelEnergy*> sorted;
  for (const auto& m : models) {
    if (m.zone_id != models.front().zone_id || m.year != models.front().year) {
      throw Error(ErrorKind::usage, "KEY_MISMATCH",
                  "zone_energy inputs span more than one (zone, year)");
    }
    sorted.push_back(&m);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->model_id < b->model_id; });
  EnergyQuantity total;
  for (const auto* m : sorted) total += m->energy;
  return total;
}

namespace detail {

template <typename Entry, typename Q>
Q fold_by_zone(std::span<const Entry> entries, Q Entry::*member, const char* what) {
  std::vector<const Entry*> sorted;
  for (const auto& e : entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->zone_id < b->zone_id; });
  Q total;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i]->year != sorted.front()->year) {
      throw Error(ErrorKind::usage, "KEY_MISMATCH",
                  std::string(what) + " inputs span more than one year");
    }
    if (i > 0 && sorted[i]->zone_id == sorted[i - 1]->zone_id) {
      throw Error(ErrorKind::usage, "DUPLICATE_ZONE",
                  std::string(what) + ": zone '" + sorted[i]->zone_id +
                      "' appears twice for " + std::to_string(sorted[i]->year));
    }
    total += (*sorted[i]).*member;
  }
  return total;
}

}  // namespace detail

/// National total over one entry per zone.
inline EnergyQuantity national_energy(std::span<const ZoneEnergy> zones) {
  return detail::fold_by_zone(zones, &ZoneEnergy::energy, "national_energy");
}

/// Zone emissions: grid emission factor times zone consumption.
inline EmissionQuantity zone_emissions(EnergyQuantity zone_total, const ZoneParameters& zone) {
  if (!(zone.emission_factor >= 0.0)) {
    throw Error(ErrorKind::usage, "UNIT_VIOLATION",
                "negative emission factor for zone '" + zone.zone_id + "'");
  }
  return emissions_for(zone_total, zone.emission_factor);
}

inline EmissionQuantity national_emissions(std::span<const ZoneEmissions> zones) {
  return detail::fold_by_zone(zones, &ZoneEmissions::emissions, "national_emissions");
}

}  // namespace bevcharge
