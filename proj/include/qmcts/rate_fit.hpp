#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qmcts {

/// Samples: slope of -log(error) against log(N), so convergence is positive.
/// Time: slope of log(error) against log(tau).
enum class FitOrientation { samples, time };

struct RateFit {
  std::vector<std::pair<double, double>> points;  // (N or tau, error), all of them
  std::size_t window_begin = 0;                   // fit uses points[window_begin, window_end)
  std::size_t window_end = 0;
  double slope = 0.0;
  double intercept = 0.0;
  FitOrientation orientation = FitOrientation::samples;
  std::optional<double> expected;  // metadata only
};

/// Least squares in log-log coordinates over the last `window` points (all
/// points when window is 0 or exceeds the count). Throws unless the window
/// holds at least two distinct abscissae and every error in it exceeds
/// `floor` (nonpositive or roundoff-level errors cannot be fitted).
RateFit fit_rate(std::span<const std::pair<double, double>> points, std::size_t window,
                 FitOrientation orientation, double floor = 0.0);

/// Errors below this relative level are treated as exact for study fits.
inline constexpr double kRoundoffFloor = 1e-12;

}  // namespace qmcts
