#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qmcts/torus.hpp"

namespace qmcts {

/// Real 2*pi-periodic profiles a potential can be built from.
struct ConstantProfile {
  double value = 0.0;
};
struct CosineProfile {
  int frequency = 1;  // cos(frequency * x)
};
/// Values at the nodes of a grid of the given size; resampled spectrally onto
/// other power-of-two grids.
struct TabulatedProfile {
  std::vector<double> values;
};
using PeriodicProfile = std::variant<ConstantProfile, CosineProfile, TabulatedProfile>;

std::vector<double> sample_profile(const PeriodicProfile& profile, const TorusGrid& grid);

/// (sup |f|, sup |f'|). Closed form for constants and cosines; for tabulated
/// profiles, grid maxima after spectral refinement onto a 4x finer grid.
struct SupNorms {
  double value = 0.0;
  double derivative = 0.0;
};
SupNorms sup_norms(const PeriodicProfile& profile);

struct KLMode {
  double strength;  // lambda_j > 0
  PeriodicProfile shape;
};

/// Truncated Karhunen-Loeve potential V(xi, x) = v0(x) + sum_j lambda_j xi_j v_j(x).
class KLPotential {
 public:
  KLPotential(PeriodicProfile background, std::vector<KLMode> modes);

  std::size_t dimension() const noexcept { return modes_.size(); }
  const PeriodicProfile& background() const noexcept { return background_; }
  std::span<const KLMode> modes() const noexcept { return modes_; }

  /// Decay exponent alpha when built by build_cosine_potential.
  std::optional<double> cosine_alpha() const noexcept { return cosine_alpha_; }
  std::string describe() const;

 private:
  friend KLPotential build_cosine_potential(double, std::size_t, double);

  PeriodicProfile background_;
  std::vector<KLMode> modes_;
  std::optional<double> cosine_alpha_;
};

/// offset + sum_{j=1..m} j^{-alpha} xi_j cos(j x); requires alpha > 1.
KLPotential build_cosine_potential(double alpha, std::size_t m, double offset);

/// Mode values tabulated once on a grid so that repeated evaluation only pays
/// for the weighted sum.
class GridPotential {
 public:
  GridPotential(const KLPotential& potential, const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t dimension() const noexcept { return strengths_.size(); }

  /// v0(x_k) + sum_j lambda_j xi_j v_j(x_k), compensated sum in ascending j.
  void evaluate(std::span<const double> xi, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> xi) const;

 private:
  TorusGrid grid_;
  std::vector<double> background_;
  std::vector<double> strengths_;
  std::vector<double> mode_values_;  // row j holds v_j at all nodes
};

std::vector<double> evaluate(const KLPotential& potential, std::span<const double> xi,
                             const TorusGrid& grid);

/// b_j = lambda_j * ||v_j||_{W^{1,inf}} with ||f|| = max(sup|f|, sup|f'|).
struct DecayReport {
  std::vector<double> b;
  std::optional<double> p;
  double sum_b_p = 0.0;
  bool satisfied = false;
  std::string notes;
  std::optional<double> cosine_alpha;  // enables the analytic tail test
};

DecayReport decay_sequences(const KLPotential& potential);

/// Partial sum of b_j^p plus, when the potential is a cosine family, the
/// analytic tail test p * (alpha - 1) > 1.
DecayReport check_summability(const DecayReport& report, double p);

/// Fitted algebraic decay rate r of b_j ~ j^{-r} over the tail j in
/// [ceil(m/2), m]; nullopt for fewer than two usable terms.
std::optional<double> fitted_decay_rate(std::span<const double> b);

}  // namespace qmcts
