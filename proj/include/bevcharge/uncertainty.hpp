#pragma once

#include <string>

#include "bevcharge/error.hpp"

namespace bevcharge {

inline constexpr double kDefaultUncertainty = 0.10;

template <typename Q>
struct UncertaintyBand {
  Q low;
  Q mid;
  Q high;
};

/// Symmetric presentation band mid * (1 -/+ u). Requires 0 <= u < 1.
template <typename Q>
UncertaintyBand<Q> uncertainty_band(Q mid, double u = kDefaultUncertainty) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw Error(ErrorKind::usage, "UNCERTAINTY_RANGE",
                "uncertainty fraction must lie in [0, 1), got " + std::to_string(u));
  }
  const Q delta = mid * u;
  Q low;
  if constexpr (requires { mid.base(); }) {
    low = Q::from_base(mid.base() - delta.base());
  } else {
    low = mid - delta;
  }
  return {low, mid, mid + delta};
}

}  // namespace bevcharge
