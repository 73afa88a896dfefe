#include "qmcts/rate_fit.hpp"

#include <cmath>

#include "qmcts/error.hpp"

namespace qmcts {

RateFit fit_rate(std::span<const std::pair<double, double>> points, std::size_t window,
                 FitOrientation orientation, double floor) {
  RateFit fit;
  fit.points.assign(points.begin(), points.end());
  fit.orientation = orientation;
  const std::size_t n = points.size();
  const std::size_t w = (window == 0 || window > n) ? n : window;
  fit.window_begin = n - w;
  fit.window_end = n;
  if (w < 2) fail(ErrorCategory::numeric, "rate fit needs at least two points");

  double sx = 0.0, sy = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = fit.window_begin; i < n; ++i) {
    const auto [x, e] = points[i];
    if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorCategory::numeric, "rate fit abscissa must be positive");
    if (!(e > floor) || !std::isfinite(e)) {
      fail(ErrorCategory::numeric, "rate fit refused: error " + std::to_string(e) + " at point " +
                                       std::to_string(i) + " is not above the level " + std::to_string(floor));
    }
    lx.push_back(std::log(x));
    ly.push_back(orientation == FitOrientation::samples ? -std::log(e) : std::log(e));
    sx += lx.back();
    sy += ly.back();
  }
  const double mx = sx / static_cast<double>(w);
  const double my = sy / static_cast<double>(w);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCategory::numeric, "rate fit needs distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace qmcts
