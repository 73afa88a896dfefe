#include "qmcts/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmcts/error.hpp"
#include "qmcts/normal.hpp"

namespace qmcts {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned kMaxDepth = 20;
constexpr double kTolerance = 1e-13;

// Phi(-t), accurate for large t.
inline double upper_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

// Mirrors entries i <= N/2 into N - i so that the table is bitwise symmetric.
template <class F>
std::vector<double> symmetric_table(std::uint64_t N, F&& value_at) {
  std::vector<double> t(N);
  for (std::uint64_t i = 0; i <= N / 2; ++i) t[i] = value_at(static_cast<double>(i) / static_cast<double>(N));
  for (std::uint64_t i = N / 2 + 1; i < N; ++i) t[i] = t[N - i];
  return t;
}

}  // namespace

double gaussian_kernel_midpoint(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    fail(ErrorCategory::domain, "weight-function parameter must be positive");
  }
  // exp(2 theta t) Phi(-t)^2 decays like exp(-(t - theta)^2); 12 past the
  // peak the remainder is below exp(-140) of the integral.
  auto f = [theta](double t) {
    const double q = upper_tail(t);
    return std::exp(2.0 * theta * t) * q * q;
  };
  return -2.0 * Rule::integrate(f, 0.0, theta + 12.0, kMaxDepth, kTolerance);
}

double gaussian_shift_averaged_kernel(double x, double theta, double midpoint) {
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCategory::domain, "kernel argument outside [0, 1]");
  const double s = std::min(x, 1.0 - x);
  const double e = std::exp(2.0 * theta * theta);
  // s = 0 is the limit c -> infinity.
  if (s == 0.0) return midpoint + (e * Phi(2.0 * theta) - 0.5) / theta;
  const double c = -inv_Phi(s);
  return midpoint + (e * (Phi(c - 2.0 * theta) - Phi(-2.0 * theta)) - (0.5 - s)) / theta;
}

double gaussian_shift_averaged_kernel(double x, double theta) {
  return gaussian_shift_averaged_kernel(x, theta, gaussian_kernel_midpoint(theta));
}

GaussianWeightKernel::GaussianWeightKernel(std::vector<double> theta) : theta_(std::move(theta)) {}

std::vector<double> GaussianWeightKernel::table(std::size_t coordinate, std::uint64_t N) const {
  if (coordinate >= theta_.size()) {
    fail(ErrorCategory::dimension, "kernel requested for coordinate beyond the weight spec");
  }
  const double theta = theta_[coordinate];
  // Coordinates sharing theta share a table.
  for (std::size_t j = 0; j < coordinate; ++j) {
    if (theta_[j] == theta) return table(j, N);
  }
  const double mid = gaussian_kernel_midpoint(theta);
  return symmetric_table(N, [theta, mid](double x) { return gaussian_shift_averaged_kernel(x, theta, mid); });
}

std::vector<double> BernoulliKernel::table(std::size_t, std::uint64_t N) const {
  return symmetric_table(N, [](double x) { return x * x - x + 1.0 / 6.0; });
}

}  // namespace qmcts
