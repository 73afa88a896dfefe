#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qmcts/error.hpp"
#include "qmcts/torus.hpp"

using namespace qmcts;

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

WaveField random_field(const TorusGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Complex> v(g.size());
  for (auto& z : v) z = {nd(rng), nd(rng)};
  return WaveField(g, v);
}

}  // namespace

TEST_CASE("grid layout and wavenumbers") {
  const TorusGrid g(8);
  CHECK(g.spacing() == doctest::Approx(std::numbers::pi / 4));
  CHECK(g.node(0) == -std::numbers::pi);
  CHECK(g.node(4) == doctest::Approx(0.0).scale(1.0));
  const int expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t n = 0; n < 8; ++n) CHECK(g.wavenumber(n) == expected[n]);
  CHECK_THROWS_AS(TorusGrid(0), Error);
  CHECK_THROWS_AS(TorusGrid(1), Error);
  CHECK_THROWS_AS(TorusGrid(96), Error);
}

TEST_CASE("initial data") {
  const TorusGrid g(128);
  const auto gauss = sample_initial(g, GaussianPacket{});
  CHECK(gauss[64].real() == doctest::Approx(std::sqrt(8.0 / std::numbers::pi)).epsilon(1e-15));
  CHECK(gauss[64].real() == doctest::Approx(1.595769).epsilon(1e-6));
  CHECK(discrete_l2_norm(gauss) == doctest::Approx(std::sqrt(2.0 / std::sqrt(std::numbers::pi))).epsilon(1e-14));
  CHECK(discrete_l2_norm(gauss) == doctest::Approx(1.062252).epsilon(1e-6));

  const auto pw = sample_initial(g, PlaneWave{1});
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(std::abs(pw[k]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(pw[k] - std::exp(Complex(0.0, g.node(k)))) < 1e-15);
  }
  CHECK_THROWS_AS(sample_initial(g, PlaneWave{64}), Error);
  CHECK_THROWS_AS(sample_initial(g, PlaneWave{-64}), Error);
  CHECK_NOTHROW(sample_initial(g, PlaneWave{63}));
  const auto custom = sample_initial(g, CustomInitial{[](double x) { return Complex(std::cos(x), 0.0); }});
  CHECK(custom[0].real() == doctest::Approx(-1.0));
}

TEST_CASE("discrete L2 norm") {
  const TorusGrid g(64);
  CHECK(discrete_l2_norm(WaveField(g, std::vector<Complex>(64, 1.0))) == doctest::Approx(std::sqrt(2 * std::numbers::pi)));
  CHECK(discrete_l2_norm(WaveField(g, std::vector<Complex>(64, 1.0))) == doctest::Approx(2.506628).epsilon(1e-6));
  CHECK(discrete_l2_norm(WaveField::zeros(g)) == 0.0);
}

TEST_CASE("wave fields reject bad values") {
  const TorusGrid g(8);
  CHECK_THROWS_AS(WaveField(g, std::vector<Complex>(4)), Error);
  std::vector<Complex> bad(8);
  bad[3] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(WaveField(g, bad), Error);
}

TEST_CASE("transform round trip and convention") {
  const TorusGrid g(64);
  const auto f = random_field(g, 1);
  const auto back = inverse_transform(forward_transform(f.values()));
  CHECK(max_abs_diff(back, f.values()) <= 1e-13 * discrete_l2_norm(f));
  // e^{i x_k} has coefficient M * e^{-i pi} at index 1 under x_k = -pi + k h.
  const auto c = forward_transform(sample_initial(g, PlaneWave{1}).values());
  CHECK(std::abs(c[1] - Complex(-64.0, 0.0)) < 1e-12);
}

TEST_CASE("kinetic step") {
  const TorusGrid g(128);
  const auto f = random_field(g, 2);
  CHECK(max_abs_diff(kinetic_step(f, 0.0).values(), f.values()) < 1e-14);
  const double tau = 0.37;
  const auto pw = sample_initial(g, PlaneWave{1});
  const auto out = kinetic_step(pw, tau);
  const Complex phase = std::exp(Complex(0.0, -tau / 2));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(out[k] - pw[k] * phase) < 1e-14);
  const auto round = kinetic_step(kinetic_step(f, 1.3), -1.3);
  CHECK(max_abs_diff(round.values(), f.values()) <= 1e-13 * discrete_l2_norm(f));
  for (double t : {0.001, 0.5, 17.0, -3.0}) {
    CHECK(discrete_l2_norm(kinetic_step(f, t)) == doctest::Approx(discrete_l2_norm(f)).epsilon(1e-12));
  }
}

TEST_CASE("potential step") {
  const TorusGrid g(64);
  const auto f = random_field(g, 3);
  const std::vector<double> zero(64, 0.0), one(64, 1.0);
  CHECK(max_abs_diff(potential_step(f, zero, 0.9).values(), f.values()) == 0.0);
  const auto neg = potential_step(f, one, std::numbers::pi);
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(neg[k] + f[k]) < 1e-14 * std::max(1.0, std::abs(f[k])));
  std::vector<double> V(64);
  for (std::size_t k = 0; k < 64; ++k) V[k] = 3.0 * std::sin(g.node(k)) + 0.2 * k;
  const auto out = potential_step(f, V, 0.77);
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(out[k]) == doctest::Approx(std::abs(f[k])).epsilon(1e-15));
  CHECK(discrete_l2_norm(out) == doctest::Approx(discrete_l2_norm(f)).epsilon(1e-12));
  const std::vector<double> wrong(32, 0.0);
  CHECK_THROWS_AS(potential_step(f, wrong, 0.1), Error);
}

TEST_CASE("spectral derivative") {
  const TorusGrid g(64);
  const auto d0 = spectral_derivative(WaveField(g, std::vector<Complex>(64, 2.5)));
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(d0[k]) < 1e-14);
  const auto pw = sample_initial(g, PlaneWave{1});
  const auto d1 = spectral_derivative(pw);
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(d1[k] - Complex(0.0, 1.0) * pw[k]) < 1e-13);
  std::vector<Complex> s(64);
  for (std::size_t k = 0; k < 64; ++k) s[k] = std::sin(g.node(k));
  const auto ds = spectral_derivative(WaveField(g, s));
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(ds[k] - std::cos(g.node(k))) <= 1e-12);
  // The Nyquist mode is removed: cos(32 x) sampled on 64 nodes differentiates to zero.
  std::vector<Complex> nyq(64);
  for (std::size_t k = 0; k < 64; ++k) nyq[k] = std::cos(32.0 * g.node(k));
  const auto dn = spectral_derivative(WaveField(g, nyq));
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(dn[k]) < 1e-12);
}

TEST_CASE("spectral accuracy: M = 64 and M = 128 agree on common nodes") {
  auto evolve = [](std::size_t M) {
    const TorusGrid g(M);
    auto f = sample_initial(g, GaussianPacket{});
    std::vector<double> V(M);
    for (std::size_t k = 0; k < M; ++k) V[k] = 1.0 + 0.5 * std::cos(g.node(k));
    for (int n = 0; n < 100; ++n) f = kinetic_step(potential_step(f, V, 0.01), 0.01);
    return f;
  };
  const auto coarse = evolve(64), fine = evolve(128);
  std::vector<Complex> diff(64);
  for (std::size_t k = 0; k < 64; ++k) diff[k] = coarse[k] - fine[2 * k];
  CHECK(discrete_l2_norm(WaveField(TorusGrid(64), diff)) < 1e-9);
}
