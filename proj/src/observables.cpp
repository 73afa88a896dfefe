#include "qmcts/observables.hpp"

#include <cmath>
#include <numbers>

#include "qmcts/error.hpp"

namespace qmcts {

std::string kind_name(ObservableKind kind) {
  return kind == ObservableKind::position_density ? "S" : "J";
}

ObservableKind parse_kind(const std::string& name) {
  if (name == "S" || name == "position-density") return ObservableKind::position_density;
  if (name == "J" || name == "current-density") return ObservableKind::current_density;
  fail(ErrorCategory::config, "unknown observable '" + name + "' (expected S or J)");
}

ObservableField::ObservableField(TorusGrid g, std::vector<double> v, ObservableKind k)
    : grid(g), values(std::move(v)), kind(k) {
  if (values.size() != grid.size()) fail(ErrorCategory::dimension, "observable length differs from grid size");
  for (double x : values) {
    if (!std::isfinite(x)) fail(ErrorCategory::numeric, "observable contains non-finite values");
    if (kind == ObservableKind::position_density && x < -1e-12) {
      fail(ErrorCategory::numeric, "position density is negative beyond roundoff");
    }
  }
}

void position_density_into(std::span<const Complex> psi, std::span<double> out) {
  for (std::size_t k = 0; k < psi.size(); ++k) {
    out[k] = psi[k].real() * psi[k].real() + psi[k].imag() * psi[k].imag();
  }
}

void current_density_into(std::span<const Complex> psi, std::span<double> out) {
  const std::size_t m = psi.size();
  auto& ws = thread_workspace(m);
  auto buf = ws.buffer();
  std::copy(psi.begin(), psi.end(), buf.begin());
  ws.forward();
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t n = 0; n < m; ++n) {
    if (n == m / 2) {
      buf[n] = Complex{};
      continue;
    }
    const double k = static_cast<double>(n < m / 2 ? static_cast<long>(n) : static_cast<long>(n) - static_cast<long>(m));
    buf[n] = Complex(-buf[n].imag(), buf[n].real()) * (k * scale);
  }
  ws.backward();
  // Im(conj(a) b) = a_re b_im - a_im b_re
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = psi[k].real() * buf[k].imag() - psi[k].imag() * buf[k].real();
  }
}

ObservableField position_density(const WaveField& f) {
  std::vector<double> v(f.size());
  position_density_into(f.values(), v);
  return {f.grid(), std::move(v), ObservableKind::position_density};
}

ObservableField current_density(const WaveField& f) {
  std::vector<double> v(f.size());
  current_density_into(f.values(), v);
  return {f.grid(), std::move(v), ObservableKind::current_density};
}

ObservableField observe(const WaveField& f, ObservableKind kind) {
  return kind == ObservableKind::position_density ? position_density(f) : current_density(f);
}

std::size_t nearest_node(const TorusGrid& grid, double x0) {
  if (!std::isfinite(x0)) fail(ErrorCategory::domain, "evaluation point must be finite");
  const double t = (x0 + std::numbers::pi) / grid.spacing();
  const auto m = static_cast<long long>(grid.size());
  long long k = static_cast<long long>(std::ceil(t - 0.5));
  k %= m;
  if (k < 0) k += m;
  return static_cast<std::size_t>(k);
}

double point_eval(const ObservableField& obs, double x0) { return obs.values[nearest_node(obs.grid, x0)]; }

double l2_relative_error(const ObservableField& num, const ObservableField& ref) {
  if (!(num.grid == ref.grid)) fail(ErrorCategory::dimension, "observables live on different grids");
  const double denom = discrete_l2_norm(ref.values, ref.grid);
  if (!(denom > 0.0)) fail(ErrorCategory::numeric, "reference observable has zero norm");
  std::vector<double> diff(num.values.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = num.values[k] - ref.values[k];
  return discrete_l2_norm(diff, ref.grid) / denom;
}

}  // namespace qmcts
