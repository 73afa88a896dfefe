#pragma once

#include <cstdint>
#include <vector>

#include "qmcts/lattice.hpp"

namespace qmcts {

/// Shift-averaged kernel of the weighted unanchored Sobolev space over R with
/// the standard normal density and weight function w(t) = exp(-theta |t|),
/// transported to the unit interval:
///
///   K(x) = int_R exp(2 theta |t|) [ (Phi(t) - x)_+ + (Phi(t) - 1 + x)_+ - Phi(t)^2 ] dt.
///
/// K is symmetric about 1/2 and K'(x) = -(exp(2 theta c) - 1) / theta with
/// c = -Phi^{-1}(x) for x < 1/2, which integrates in closed form:
///
///   K(x) = K(1/2) + [ e^{2 theta^2} (Phi(c - 2 theta) - Phi(-2 theta)) - (1/2 - s) ] / theta,
///
/// s = min(x, 1 - x), c = -Phi^{-1}(s). Only K(1/2) = -2 int_0^inf e^{2 theta t} Phi(-t)^2 dt
/// needs quadrature (adaptive Gauss-Kronrod).
double gaussian_shift_averaged_kernel(double x, double theta);
double gaussian_shift_averaged_kernel(double x, double theta, double midpoint);
double gaussian_kernel_midpoint(double theta);

/// Kernel provider for the POD weights built from a WeightSpec: coordinate j
/// uses the weight-function parameter theta_j.
class GaussianWeightKernel final : public KernelProvider {
 public:
  explicit GaussianWeightKernel(std::vector<double> theta);
  std::vector<double> table(std::size_t coordinate, std::uint64_t N) const override;
  std::string name() const override { return "gaussian-exp-weight"; }

 private:
  std::vector<double> theta_;
};

/// Shift-averaged kernel of the unanchored Sobolev space on [0,1]:
/// B2(x) = x^2 - x + 1/6, identical for every coordinate. Cheap and exact,
/// used to test CBC against exhaustive search.
class BernoulliKernel final : public KernelProvider {
 public:
  std::vector<double> table(std::size_t coordinate, std::uint64_t N) const override;
  std::string name() const override { return "bernoulli-b2"; }
};

}  // namespace qmcts
