#pragma once

#include <cmath>
#include <compare>
#include <string>
#include <string_view>

#include "bevcharge/error.hpp"

namespace bevcharge {

struct KilowattHours {
  static constexpr double reporting_scale = 1e6;
  static constexpr std::string_view base_symbol = "kWh";
  static constexpr std::string_view reporting_symbol = "GWh";
};

struct KilogramsCO2 {
  static constexpr double reporting_scale = 1e9;
  static constexpr std::string_view base_symbol = "kgCO2";
  static constexpr std::string_view reporting_symbol = "MtCO2";
};

// Non-negative scalar in a fixed base unit. Arithmetic stays in base units;
// the reporting unit is only used at the presentation boundary.
template <typename Unit>
class Quantity {
 public:
  using unit_type = Unit;

  constexpr Quantity() noexcept = default;

  static Quantity from_base(double value) {
    check(value);
    return Quantity(value);
  }

  static Quantity from_reporting(double value) {
    return from_base(value * Unit::reporting_scale);
  }

  constexpr double base() const noexcept { return value_; }
  constexpr double reporting() const noexcept {
    return value_ / Unit::reporting_scale;
  }

  Quantity& operator+=(Quantity other) {
    value_ += other.value_;
    return *this;
  }
  friend Quantity operator+(Quantity a, Quantity b) { return a += b; }

  friend Quantity operator*(Quantity q, double factor) {
    return from_base(q.value_ * factor);
  }
  friend Quantity operator*(double factor, Quantity q) { return q * factor; }

  friend constexpr bool operator==(Quantity, Quantity) = default;
  friend constexpr auto operator<=>(Quantity, Quantity) = default;

 private:
  constexpr explicit Quantity(double value) noexcept : value_(value) {}

  static void check(double value) {
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::computation, "NON_FINITE",
                  "non-finite " + std::string(Unit::base_symbol) + " value");
    }
    if (value < 0.0) {
      throw Error(ErrorKind::computation, "NEGATIVE_QUANTITY",
                  "negative " + std::string(Unit::base_symbol) + " value");
    }
  }

  double value_ = 0.0;
};

using EnergyQuantity = Quantity<KilowattHours>;
using EmissionQuantity = Quantity<KilogramsCO2>;

inline EnergyQuantity kwh(double value) { return EnergyQuantity::from_base(value); }
inline EnergyQuantity gwh(double value) { return EnergyQuantity::from_reporting(value); }
inline EmissionQuantity kg_co2(double value) { return EmissionQuantity::from_base(value); }
inline EmissionQuantity mt_co2(double value) { return EmissionQuantity::from_reporting(value); }

inline double to_gwh(EnergyQuantity q) noexcept { return q.reporting(); }
inline double to_mt_co2(EmissionQuantity q) noexcept { return q.reporting(); }

// kgCO2 per kWh applied to an energy total.
inline EmissionQuantity emissions_for(EnergyQuantity energy, double kg_per_kwh) {
  return kg_co2(kg_per_kwh * energy.base());
}

}  // namespace bevcharge
