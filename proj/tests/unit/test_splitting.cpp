#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "qmcts/error.hpp"
#include "qmcts/potential.hpp"
#include "qmcts/rate_fit.hpp"
#include "qmcts/splitting.hpp"

using namespace qmcts;

namespace {

double rel_diff(const WaveField& a, const WaveField& b) {
  std::vector<Complex> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return discrete_l2_norm(WaveField(a.grid(), d)) / discrete_l2_norm(b);
}

WaveField random_smooth_field(const TorusGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Complex> v(g.size(), 0.0);
  for (int k = -6; k <= 6; ++k) {
    const Complex c(nd(rng), nd(rng));
    for (std::size_t n = 0; n < g.size(); ++n) v[n] += c * std::exp(Complex(0.0, k * g.node(n)));
  }
  return WaveField(g, v);
}

std::vector<double> sample_potential(const TorusGrid& g) {
  const auto pot = build_cosine_potential(4.5, 4, 1.0);
  const std::vector<double> xi = {0.8, -1.3, 0.4, 2.1};
  return evaluate(pot, xi, g);
}

}  // namespace

TEST_CASE("built-in schemes") {
  const auto lie = SplittingScheme::lie();
  REQUIRE(lie.stages().size() == 2);
  CHECK(lie.stages()[0].kind == Subflow::potential);
  CHECK(lie.stages()[1].kind == Subflow::kinetic);
  CHECK(lie.formal_order() == 1);
  const auto strang = SplittingScheme::strang();
  REQUIRE(strang.stages().size() == 3);
  CHECK(strang.stages()[0].kind == Subflow::kinetic);
  CHECK(strang.stages()[0].fraction == 0.5);
  CHECK(strang.stages()[1].kind == Subflow::potential);
  CHECK(strang.stages()[2].fraction == 0.5);
  CHECK(strang.formal_order() == 2);
  for (const auto& s : {lie, strang}) {
    double kin = 0.0, pot = 0.0;
    for (const auto& st : s.stages()) (st.kind == Subflow::kinetic ? kin : pot) += st.fraction;
    CHECK(kin == 1.0);
    CHECK(pot == 1.0);
  }
}

TEST_CASE("scheme validation and parsing") {
  CHECK_THROWS_AS(SplittingScheme("x", {}, 1), Error);
  CHECK_THROWS_AS(SplittingScheme("x", {{Subflow::kinetic, 0.5}, {Subflow::potential, 1.0}}, 1), Error);
  const auto s = SplittingScheme::parse(
      "# symmetric three-stage\nname sym\norder 2\npotential 0.5\nkinetic 1\npotential 0.5\n");
  CHECK(s.name() == "sym");
  CHECK(s.formal_order() == 2);
  REQUIRE(s.stages().size() == 3);
  CHECK(s.stages()[0].kind == Subflow::potential);
  CHECK_THROWS_AS(SplittingScheme::parse("kinetic 1\nwobble 1\n"), Error);
  CHECK_THROWS_AS(SplittingScheme::parse("kinetic one\npotential 1\n"), Error);
  CHECK(SplittingScheme::by_name("lie").name() == "lie");
  CHECK(SplittingScheme::by_name("strang").name() == "strang");
  CHECK_THROWS_AS(SplittingScheme::by_name("yoshida"), Error);

  const auto path = std::filesystem::temp_directory_path() / "qmcts_test_scheme.txt";
  std::ofstream(path) << "kinetic 0.5\npotential 1\nkinetic 0.5\norder 2\n";
  const auto f = SplittingScheme::by_name("custom:" + path.string());
  CHECK(f.stages().size() == 3);
  CHECK(f.formal_order() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(SplittingScheme::by_name("custom:/nonexistent/scheme.txt"), Error);
}

TEST_CASE("tau = 0 is the identity for every scheme") {
  const TorusGrid g(64);
  const auto f = random_smooth_field(g, 1);
  const auto V = sample_potential(g);
  for (const auto& s : {SplittingScheme::lie(), SplittingScheme::strang()}) {
    CHECK(rel_diff(step(f, s, 0.0, V), f) < 1e-15);
  }
  CHECK(rel_diff(propagate(f, SplittingScheme::strang(), 0.1, 0, V), f) == 0.0);
}

TEST_CASE("constant potential: splitting is exact") {
  const TorusGrid g(64);
  const auto f = random_smooth_field(g, 2);
  const double c = 1.7, tau = 0.05;
  const std::vector<double> V(64, c);
  const auto coeff = forward_transform(f.values());
  std::vector<Complex> exact_coeff(64);
  for (std::size_t n = 0; n < 64; ++n) {
    const double k = g.wavenumber(n);
    exact_coeff[n] = coeff[n] * std::exp(Complex(0.0, -(k * k / 2 + c) * tau));
  }
  const WaveField exact(g, inverse_transform(exact_coeff));
  CHECK(rel_diff(step(f, SplittingScheme::lie(), tau, V), exact) < 1e-13);
  CHECK(rel_diff(step(f, SplittingScheme::strang(), tau, V), exact) < 1e-13);

  // Lie step on e^{ix} with V = 1 multiplies by e^{-i tau} e^{-i tau/2}.
  const auto pw = sample_initial(g, PlaneWave{1});
  const std::vector<double> one(64, 1.0);
  const auto out = step(pw, SplittingScheme::lie(), tau, one);
  const Complex phase = std::exp(Complex(0.0, -tau)) * std::exp(Complex(0.0, -tau / 2));
  for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(out[k] - pw[k] * phase) < 1e-14);
}

TEST_CASE("Strang is time symmetric") {
  const TorusGrid g(128);
  const auto f = random_smooth_field(g, 3);
  const auto V = sample_potential(g);
  const auto s = SplittingScheme::strang();
  for (double tau : {0.001, 0.1, 0.7}) {
    CHECK(rel_diff(step(step(f, s, tau, V), s, -tau, V), f) < 1e-12);
  }
}

TEST_CASE("unitarity over many steps") {
  const TorusGrid g(128);
  const auto f = sample_initial(g, GaussianPacket{});
  const auto V = sample_potential(g);
  const double n0 = discrete_l2_norm(f);
  for (const auto& s : {SplittingScheme::lie(), SplittingScheme::strang()}) {
    CHECK(discrete_l2_norm(step(f, s, 0.01, V)) == doctest::Approx(n0).epsilon(1e-12));
    const auto out = propagate(f, s, 1e-3, 10000, V);
    CHECK(std::abs(discrete_l2_norm(out) / n0 - 1.0) <= 1e-12);
  }
}

TEST_CASE("free flow and gauge covariance") {
  const TorusGrid g(128);
  const auto f = sample_initial(g, GaussianPacket{});
  const std::vector<double> zero(128, 0.0);
  const double tau = 0.01;
  const std::size_t n = 100;
  for (const auto& s : {SplittingScheme::lie(), SplittingScheme::strang()}) {
    CHECK(rel_diff(propagate(f, s, tau, n, zero), kinetic_step(f, n * tau)) < 1e-12);
  }
  const auto V = sample_potential(g);
  auto Vc = V;
  const double c = 0.9;
  for (double& v : Vc) v += c;
  const auto s = SplittingScheme::strang();
  const auto a = propagate(f, s, tau, n, V);
  const auto b = propagate(f, s, tau, n, Vc);
  const Complex phase = std::exp(Complex(0.0, -c * tau * static_cast<double>(n)));
  std::vector<Complex> shifted(128);
  for (std::size_t k = 0; k < 128; ++k) {
    shifted[k] = a[k] * phase;
    CHECK(std::abs(std::norm(a[k]) - std::norm(b[k])) < 1e-12);
  }
  CHECK(rel_diff(b, WaveField(g, shifted)) < 1e-12);
  CHECK_THROWS_AS(propagate(f, s, 0.0, 3, V), Error);
  CHECK_THROWS_AS(propagate(f, s, -0.1, 3, V), Error);
}

TEST_CASE("fused propagation matches stage-by-stage stepping") {
  const TorusGrid g(64);
  const auto f = random_smooth_field(g, 4);
  const auto V = sample_potential(g);
  const auto custom = SplittingScheme::parse("potential 0.25\nkinetic 0.5\npotential 0.5\nkinetic 0.5\npotential 0.25\n");
  for (const auto& s : {SplittingScheme::lie(), SplittingScheme::strang(), custom}) {
    auto ref = f;
    for (int i = 0; i < 50; ++i) ref = step(ref, s, 0.02, V);
    CHECK(rel_diff(propagate(f, s, 0.02, 50, V), ref) < 1e-12);
  }
}

TEST_CASE("observed order: Lie 1, Strang 2") {
  const TorusGrid g(128);
  const auto f = sample_initial(g, GaussianPacket{});
  const auto V = sample_potential(g);
  const std::vector<std::size_t> steps = {40, 80, 160, 320, 640};
  const auto ref = propagate(f, SplittingScheme::strang(), 1.0 / (640 * 64), 640 * 64, V);
  for (const auto& s : {SplittingScheme::lie(), SplittingScheme::strang()}) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n : steps) pts.emplace_back(1.0 / n, rel_diff(propagate(f, s, 1.0 / n, n, V), ref));
    const auto fit = fit_rate(pts, 0, FitOrientation::time);
    MESSAGE(s.name() << " slope " << fit.slope);
    CHECK(fit.slope == doctest::Approx(s.formal_order()).epsilon(0.1 / s.formal_order()));
  }
}
