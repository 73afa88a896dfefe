#include "qmcts/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmcts/error.hpp"
#include "qmcts/summation.hpp"

namespace qmcts {

namespace {

// Trigonometric resampling of real nodal values onto a grid of another
// power-of-two size sharing the node x_0 = -pi.
std::vector<double> resample(std::span<const double> values, std::size_t target) {
  const std::size_t source = values.size();
  if (source == target) return {values.begin(), values.end()};
  if (target < source) {
    const std::size_t stride = source / target;
    std::vector<double> out(target);
    for (std::size_t k = 0; k < target; ++k) out[k] = values[k * stride];
    return out;
  }
  std::vector<Complex> nodal(values.begin(), values.end());
  const auto coeffs = forward_transform(nodal);
  std::vector<Complex> padded(target);
  const TorusGrid src(source);
  for (std::size_t n = 0; n < source; ++n) {
    const int k = src.wavenumber(n);
    const Complex c = coeffs[n] / static_cast<double>(source);
    if (n == source / 2) {
      padded[target - source / 2] += 0.5 * c;
      padded[source / 2] += 0.5 * c;
    } else {
      const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k)
                                     : target - static_cast<std::size_t>(-k);
      padded[idx] += c;
    }
  }
  // padded holds normalized coefficients; undo the 1/M of the inverse.
  auto refined = inverse_transform(padded);
  std::vector<double> out(target);
  for (std::size_t k = 0; k < target; ++k) out[k] = refined[k].real() * static_cast<double>(target);
  return out;
}

void check_tabulated(const TabulatedProfile& t) {
  const std::size_t n = t.values.size();
  if (n < 2 || (n & (n - 1)) != 0) {
    fail(ErrorCategory::domain, "tabulated profile needs a power-of-two number of nodes");
  }
  for (double v : t.values) {
    if (!std::isfinite(v)) fail(ErrorCategory::domain, "tabulated profile has non-finite values");
  }
}

}  // namespace

std::vector<double> sample_profile(const PeriodicProfile& profile, const TorusGrid& grid) {
  std::vector<double> out(grid.size());
  if (const auto* c = std::get_if<ConstantProfile>(&profile)) {
    std::fill(out.begin(), out.end(), c->value);
  } else if (const auto* cs = std::get_if<CosineProfile>(&profile)) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = std::cos(static_cast<double>(cs->frequency) * grid.node(k));
    }
  } else {
    const auto& t = std::get<TabulatedProfile>(profile);
    check_tabulated(t);
    out = resample(t.values, grid.size());
  }
  return out;
}

SupNorms sup_norms(const PeriodicProfile& profile) {
  if (const auto* c = std::get_if<ConstantProfile>(&profile)) {
    return {std::abs(c->value), 0.0};
  }
  if (const auto* cs = std::get_if<CosineProfile>(&profile)) {
    return {1.0, std::abs(static_cast<double>(cs->frequency))};
  }
  const auto& t = std::get<TabulatedProfile>(profile);
  check_tabulated(t);
  const TorusGrid fine(4 * t.values.size());
  const auto values = resample(t.values, fine.size());
  std::vector<Complex> as_complex(values.begin(), values.end());
  const auto deriv = spectral_derivative(WaveField(fine, std::move(as_complex)));
  SupNorms n;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    n.value = std::max(n.value, std::abs(values[k]));
    n.derivative = std::max(n.derivative, std::abs(deriv[k].real()));
  }
  return n;
}

// KLPotential ---------------------------------------------------------------

KLPotential::KLPotential(PeriodicProfile background, std::vector<KLMode> modes)
    : background_(std::move(background)), modes_(std::move(modes)) {
  if (const auto* t = std::get_if<TabulatedProfile>(&background_)) check_tabulated(*t);
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const double s = modes_[j].strength;
    if (!(s > 0.0) || !std::isfinite(s)) {
      fail(ErrorCategory::domain, "mode strengths must be positive and finite");
    }
    if (j > 0 && s > modes_[j - 1].strength) {
      fail(ErrorCategory::domain, "mode strengths must be nonincreasing");
    }
    if (const auto* t = std::get_if<TabulatedProfile>(&modes_[j].shape)) check_tabulated(*t);
  }
}

std::string KLPotential::describe() const {
  std::ostringstream os;
  if (cosine_alpha_) {
    os << "cosine(alpha=" << *cosine_alpha_ << ", m=" << modes_.size() << ", offset="
       << std::get<ConstantProfile>(background_).value << ")";
  } else {
    os << "custom(m=" << modes_.size() << ")";
  }
  return os.str();
}

KLPotential build_cosine_potential(double alpha, std::size_t m, double offset) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    fail(ErrorCategory::domain, "cosine potential requires alpha > 1");
  }
  if (!std::isfinite(offset)) fail(ErrorCategory::domain, "offset must be finite");
  std::vector<KLMode> modes;
  modes.reserve(m);
  for (std::size_t j = 1; j <= m; ++j) {
    modes.push_back({std::pow(static_cast<double>(j), -alpha),
                     CosineProfile{static_cast<int>(j)}});
  }
  KLPotential pot(ConstantProfile{offset}, std::move(modes));
  pot.cosine_alpha_ = alpha;
  return pot;
}

// GridPotential -------------------------------------------------------------

GridPotential::GridPotential(const KLPotential& potential, const TorusGrid& grid)
    : grid_(grid), background_(sample_profile(potential.background(), grid)) {
  const std::size_t m = potential.dimension();
  strengths_.reserve(m);
  mode_values_.reserve(m * grid.size());
  for (const auto& mode : potential.modes()) {
    strengths_.push_back(mode.strength);
    const auto v = sample_profile(mode.shape, grid);
    mode_values_.insert(mode_values_.end(), v.begin(), v.end());
  }
}

void GridPotential::evaluate(std::span<const double> xi, std::span<double> out) const {
  const std::size_t m = strengths_.size();
  const std::size_t n = grid_.size();
  if (xi.size() != m) {
    fail(ErrorCategory::dimension, "potential has dimension " + std::to_string(m) +
                                       " but xi has length " + std::to_string(xi.size()));
  }
  if (out.size() != n) fail(ErrorCategory::dimension, "output field has the wrong size");
  for (double x : xi) {
    if (!std::isfinite(x)) fail(ErrorCategory::domain, "xi has a non-finite component");
  }
  for (std::size_t k = 0; k < n; ++k) {
    CompensatedSum acc;
    acc.add(background_[k]);
    for (std::size_t j = 0; j < m; ++j) acc.add(strengths_[j] * xi[j] * mode_values_[j * n + k]);
    out[k] = acc.value();
  }
}

std::vector<double> GridPotential::evaluate(std::span<const double> xi) const {
  std::vector<double> out(grid_.size());
  evaluate(xi, out);
  return out;
}

std::vector<double> evaluate(const KLPotential& potential, std::span<const double> xi,
                             const TorusGrid& grid) {
  return GridPotential(potential, grid).evaluate(xi);
}

// Decay diagnostics -----------------------------------------------------------

DecayReport decay_sequences(const KLPotential& potential) {
  DecayReport report;
  report.b.reserve(potential.dimension());
  report.cosine_alpha = potential.cosine_alpha();
  for (const auto& mode : potential.modes()) {
    const auto norms = sup_norms(mode.shape);
    report.b.push_back(mode.strength * std::max(norms.value, norms.derivative));
  }
  return report;
}

DecayReport check_summability(const DecayReport& report, double p) {
  const auto& cosine_alpha = report.cosine_alpha;
  if (!(p > 0.0 && p <= 1.0)) {
    fail(ErrorCategory::domain, "summability exponent p must lie in (0, 1]");
  }
  DecayReport out = report;
  out.p = p;
  CompensatedSum acc;
  for (double b : report.b) acc.add(std::pow(b, p));
  out.sum_b_p = acc.value();
  std::ostringstream notes;
  if (report.b.empty()) {
    out.satisfied = true;
    notes << "m = 0: vacuous";
  } else if (cosine_alpha) {
    const double tail = p * (*cosine_alpha - 1.0);
    out.satisfied = tail > 1.0;
    notes << "cosine tail criterion p*(alpha-1) = " << tail << (out.satisfied ? " > 1" : " <= 1");
  } else {
    out.satisfied = std::isfinite(out.sum_b_p);
    notes << "finite partial sum only; tail behaviour not verified";
  }
  out.notes = notes.str();
  return out;
}

std::optional<double> fitted_decay_rate(std::span<const double> b) {
  const std::size_t m = b.size();
  if (m < 2) return std::nullopt;
  const std::size_t first = std::max<std::size_t>(1, (m + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t j = first; j <= m; ++j) {
    if (!(b[j - 1] > 0.0)) continue;
    const double x = std::log(static_cast<double>(j));
    const double y = -std::log(b[j - 1]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom <= 0) return std::nullopt;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

}  // namespace qmcts
