#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace qmcts {

using Complex = std::complex<double>;

/// Uniform grid on the torus [-pi, pi): x_k = -pi + k*h, h = 2*pi/M, M a power
/// of two. Wavenumbers follow FFT ordering: index n maps to n for n < M/2 and
/// to n - M otherwise, so the unpaired (Nyquist) mode is -M/2.
class TorusGrid {
 public:
  explicit TorusGrid(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return spacing_; }
  double node(std::size_t k) const noexcept;
  std::vector<double> nodes() const;
  int wavenumber(std::size_t index) const noexcept;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  std::size_t size_;
  double spacing_;
};

/// Complex samples of a wave function at the grid nodes.
class WaveField {
 public:
  WaveField(TorusGrid grid, std::vector<Complex> values);
  static WaveField zeros(TorusGrid grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Complex& operator[](std::size_t k) const noexcept { return values_[k]; }

 private:
  TorusGrid grid_;
  std::vector<Complex> values_;
};

// Initial data ----------------------------------------------------------------

/// sqrt(8/pi) * exp(-8 x^2), the Gaussian wave packet used in all studies.
struct GaussianPacket {};
struct PlaneWave {
  int k = 1;
};
struct CustomInitial {
  std::function<Complex(double)> profile;
};
using InitialData = std::variant<GaussianPacket, PlaneWave, CustomInitial>;

WaveField sample_initial(const TorusGrid& grid, const InitialData& kind);

// Spectral transforms -------------------------------------------------------

/// Unnormalized forward DFT, c_n = sum_k f_k exp(-2 pi i n k / M).
std::vector<Complex> forward_transform(std::span<const Complex> values);
/// Inverse of forward_transform (includes the 1/M factor).
std::vector<Complex> inverse_transform(std::span<const Complex> coefficients);

// Exact subflows and derived quantities -------------------------------------

/// Free flow exp(i t d_xx / 2): mode k is multiplied by exp(-i k^2 t / 2).
WaveField kinetic_step(const WaveField& f, double t);

/// Potential flow exp(-i t V): pointwise multiplication by exp(-i t V(x_k)).
WaveField potential_step(const WaveField& f, std::span<const double> potential, double t);

/// d/dx via multiplication of mode k by i*k; the Nyquist mode is zeroed.
WaveField spectral_derivative(const WaveField& f);

/// sqrt(h * sum_k |f_k|^2).
double discrete_l2_norm(const WaveField& f);
double discrete_l2_norm(std::span<const double> values, const TorusGrid& grid);

// Workspace used by the fast propagation path ---------------------------------

/// In-place FFT buffer of fixed size with its own FFTW plans. Planning is
/// serialized internally; execution on distinct workspaces is thread-safe.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(std::size_t size);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  std::size_t size() const noexcept { return size_; }
  std::span<Complex> buffer() noexcept { return {buffer_, size_}; }
  std::span<const Complex> buffer() const noexcept { return {buffer_, size_}; }

  void forward() noexcept;  // unnormalized
  void backward() noexcept;  // unnormalized; caller folds in 1/M

 private:
  std::size_t size_;
  Complex* buffer_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Workspace for the calling thread, created on first use per size.
SpectralWorkspace& thread_workspace(std::size_t size);

/// a *= b without the NaN/Inf recovery path of the library operator.
inline void multiply_in_place(std::span<Complex> a, std::span<const Complex> b) noexcept {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    a[i] = Complex(ar * br - ai * bi, ar * bi + ai * br);
  }
}

}  // namespace qmcts
