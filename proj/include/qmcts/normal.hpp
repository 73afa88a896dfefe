#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qmcts {

/// Standard normal density.
double phi(double y) noexcept;

/// Standard normal CDF, evaluated through erfc (absolute error ~1e-16).
double Phi(double y) noexcept;

/// Inputs at or beyond the open-cube boundary are moved to these values
/// before inversion.
inline constexpr double kClampLow = 1e-16;
inline constexpr double kClampHigh = 1.0 - 1e-16;

/// Inverse standard normal CDF on (0, 1): Wichura's AS241 rational
/// approximation followed by one Halley step against Phi.
/// Throws a domain error outside (0, 1) or for NaN.
double inv_Phi(double u);

/// Moves u == 0 / u == 1 into the open cube; returns true if it did.
bool clamp_unit(double& u) noexcept;

struct MappedPoints {
  std::vector<double> values;  // row-major, count x dimension
  std::size_t count = 0;
  std::size_t dimension = 0;
  std::size_t clamped = 0;  // components moved off the cube boundary
};

/// Componentwise inv_Phi of row-major points in (0,1)^m (after clamping).
MappedPoints map_points(std::span<const double> unit_points, std::size_t dimension);

}  // namespace qmcts
