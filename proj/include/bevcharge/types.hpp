#pragma once

#include <cstdint>
#include <string>

#include "bevcharge/units.hpp"

namespace bevcharge {

// One purchasable variant of a model in a given year.
struct VehicleVersion {
  std::string model_id;
  std::string version_id;
  int year = 0;
  double battery_kwh = 0.0;       // energy per full charge
  double nedc_km = 0.0;           // rated range
  double sales_share = 0.0;       // fraction of the model's sales, national
  double mild_degradation = 1.0;  // spring/autumn range coefficient
  double harsh_degradation = 1.0; // summer/winter range coefficient

  friend bool operator==(const VehicleVersion&, const VehicleVersion&) = default;
};

// Units of one model sold in one climate zone in one year.
struct SalesRecord {
  std::string model_id;
  std::string zone_id;
  int year = 0;
  std::uint64_t units = 0;

  friend bool operator==(const SalesRecord&, const SalesRecord&) = default;
};

struct ZoneParameters {
  std::string zone_id;
  int year = 0;
  double annual_mileage_km = 0.0;
  double mild_season_fraction = 0.5;  // share of mileage driven in spring/autumn
  double emission_factor = 0.0;       // kgCO2 per kWh

  friend bool operator==(const ZoneParameters&, const ZoneParameters&) = default;
};

// National multipliers from the top-selling fleet to the whole BEV population.
struct ScalingRatios {
  int year = 0;
  double stock_to_top20 = 1.0;
  double all_sales_to_top20 = 1.0;

  friend bool operator==(const ScalingRatios&, const ScalingRatios&) = default;
};

// Invariant: annual == mild + harsh.
struct SeasonalConsumption {
  EnergyQuantity mild;
  EnergyQuantity harsh;
  EnergyQuantity annual;
};

}  // namespace bevcharge
