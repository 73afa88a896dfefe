#include "qmcts/torus.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "qmcts/error.hpp"
#include "qmcts/summation.hpp"

namespace qmcts {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_finite(std::span<const Complex> values, const char* what) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag())) {
      fail(ErrorCategory::numeric,
           std::string(what) + ": non-finite value at node " + std::to_string(k));
    }
  }
}

void require_same_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    fail(ErrorCategory::dimension, std::string(what) + ": expected " +
                                       std::to_string(expected) + " values, got " +
                                       std::to_string(got));
  }
}

}  // namespace

// TorusGrid -----------------------------------------------------------------

TorusGrid::TorusGrid(std::size_t size) : size_(size) {
  if (size < 2 || !is_power_of_two(size)) {
    fail(ErrorCategory::domain,
         "grid size must be a power of two >= 2, got " + std::to_string(size));
  }
  spacing_ = 2.0 * std::numbers::pi / static_cast<double>(size);
}

double TorusGrid::node(std::size_t k) const noexcept {
  return -std::numbers::pi + static_cast<double>(k) * spacing_;
}

std::vector<double> TorusGrid::nodes() const {
  std::vector<double> x(size_);
  for (std::size_t k = 0; k < size_; ++k) x[k] = node(k);
  return x;
}

int TorusGrid::wavenumber(std::size_t index) const noexcept {
  const auto n = static_cast<long>(index);
  const auto m = static_cast<long>(size_);
  return static_cast<int>(n < m / 2 ? n : n - m);
}

// WaveField -----------------------------------------------------------------

WaveField::WaveField(TorusGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  require_same_size(grid_.size(), values_.size(), "WaveField");
  require_finite(values_, "WaveField");
}

WaveField WaveField::zeros(TorusGrid grid) {
  return WaveField(grid, std::vector<Complex>(grid.size()));
}

WaveField sample_initial(const TorusGrid& grid, const InitialData& kind) {
  std::vector<Complex> v(grid.size());
  if (std::holds_alternative<GaussianPacket>(kind)) {
    const double amp = std::sqrt(8.0 / std::numbers::pi);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double x = grid.node(k);
      v[k] = amp * std::exp(-8.0 * x * x);
    }
  } else if (const auto* pw = std::get_if<PlaneWave>(&kind)) {
    const long half = static_cast<long>(grid.size() / 2);
    if (std::labs(pw->k) >= half) {
      fail(ErrorCategory::domain, "plane wave k=" + std::to_string(pw->k) +
                                      " not representable on a grid of size " +
                                      std::to_string(grid.size()));
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = std::polar(1.0, static_cast<double>(pw->k) * grid.node(k));
    }
  } else {
    const auto& custom = std::get<CustomInitial>(kind);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = custom.profile(grid.node(k));
  }
  return WaveField(grid, std::move(v));
}

// Workspace -------------------------------------------------------------------

SpectralWorkspace::SpectralWorkspace(std::size_t size) : size_(size) {
  std::lock_guard lock(planner_mutex());
  buffer_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * size));
  auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
  // FFTW_ESTIMATE keeps plan selection (and thus roundoff) deterministic.
  forward_plan_ = fftw_plan_dft_1d(static_cast<int>(size), raw, raw, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_1d(static_cast<int>(size), raw, raw, FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
  for (std::size_t i = 0; i < size; ++i) buffer_[i] = Complex{};
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(buffer_);
}

void SpectralWorkspace::forward() noexcept {
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
}

void SpectralWorkspace::backward() noexcept {
  fftw_execute(static_cast<fftw_plan>(backward_plan_));
}

SpectralWorkspace& thread_workspace(std::size_t size) {
  thread_local std::map<std::size_t, std::unique_ptr<SpectralWorkspace>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<SpectralWorkspace>(size);
  return *slot;
}

// Transforms ----------------------------------------------------------------

std::vector<Complex> forward_transform(std::span<const Complex> values) {
  auto& ws = thread_workspace(values.size());
  std::copy(values.begin(), values.end(), ws.buffer().begin());
  ws.forward();
  return {ws.buffer().begin(), ws.buffer().end()};
}

std::vector<Complex> inverse_transform(std::span<const Complex> coefficients) {
  auto& ws = thread_workspace(coefficients.size());
  std::copy(coefficients.begin(), coefficients.end(), ws.buffer().begin());
  ws.backward();
  const double scale = 1.0 / static_cast<double>(coefficients.size());
  std::vector<Complex> out(ws.buffer().begin(), ws.buffer().end());
  for (auto& c : out) c *= scale;
  return out;
}

// Subflows --------------------------------------------------------------------

WaveField kinetic_step(const WaveField& f, double t) {
  const auto& grid = f.grid();
  const std::size_t m = grid.size();
  auto& ws = thread_workspace(m);
  auto buf = ws.buffer();
  std::copy(f.values().begin(), f.values().end(), buf.begin());
  ws.forward();
  const double scale = 1.0 / static_cast<double>(m);
  std::vector<Complex> mult(m);
  for (std::size_t n = 0; n < m; ++n) {
    const double k = grid.wavenumber(n);
    mult[n] = std::polar(scale, -0.5 * k * k * t);
  }
  multiply_in_place(buf, mult);
  ws.backward();
  return WaveField(grid, {buf.begin(), buf.end()});
}

WaveField potential_step(const WaveField& f, std::span<const double> potential, double t) {
  require_same_size(f.size(), potential.size(), "potential_step");
  std::vector<Complex> out(f.values().begin(), f.values().end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!std::isfinite(potential[k])) {
      fail(ErrorCategory::numeric, "potential_step: non-finite potential value");
    }
    const Complex phase = std::polar(1.0, -t * potential[k]);
    const double ar = out[k].real(), ai = out[k].imag();
    out[k] = Complex(ar * phase.real() - ai * phase.imag(), ar * phase.imag() + ai * phase.real());
  }
  return WaveField(f.grid(), std::move(out));
}

WaveField spectral_derivative(const WaveField& f) {
  const auto& grid = f.grid();
  const std::size_t m = grid.size();
  auto& ws = thread_workspace(m);
  auto buf = ws.buffer();
  std::copy(f.values().begin(), f.values().end(), buf.begin());
  ws.forward();
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t n = 0; n < m; ++n) {
    const int k = grid.wavenumber(n);
    if (n == m / 2) {
      buf[n] = Complex{};
      continue;
    }
    buf[n] = Complex(-buf[n].imag(), buf[n].real()) * (static_cast<double>(k) * scale);
  }
  ws.backward();
  return WaveField(grid, {buf.begin(), buf.end()});
}

double discrete_l2_norm(const WaveField& f) {
  CompensatedSum acc;
  for (const auto& v : f.values()) acc.add(std::norm(v));
  return std::sqrt(f.grid().spacing() * acc.value());
}

double discrete_l2_norm(std::span<const double> values, const TorusGrid& grid) {
  require_same_size(grid.size(), values.size(), "discrete_l2_norm");
  CompensatedSum acc;
  for (double v : values) acc.add(v * v);
  return std::sqrt(grid.spacing() * acc.value());
}

}  // namespace qmcts
