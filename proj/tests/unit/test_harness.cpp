#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "qmcts/config.hpp"
#include "qmcts/error.hpp"
#include "qmcts/estimator.hpp"
#include "qmcts/io.hpp"
#include "qmcts/lattice.hpp"
#include "qmcts/normal.hpp"
#include "qmcts/rate_fit.hpp"
#include "qmcts/reference.hpp"
#include "qmcts/studies.hpp"
#include "qmcts/summation.hpp"

using namespace qmcts;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.m = 2;
  cfg.M = 32;
  cfg.T = 0.25;
  cfg.tau = 0.05;
  cfg.N = 16;
  cfg.R = 4;
  cfg.ref_M = 32;
  cfg.ref_tau = 0.05;
  cfg.ref_nodes = 8;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("qmcts_harness_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("configuration parsing") {
  const auto cfg = parse_config(
      "# comment\n"
      "m = 8\n"
      "alpha = 9/4\n"
      "tau = 1/640\n"
      "x0 = pi/4\n"
      "N = 2^10\n"
      "scheme = lie\n"
      "n_ladder = 256, 512, 1024\n"
      "tau_ladder = 1/40, 1/80\n"
      "p = 0.7\n");
  CHECK(cfg.m == 8);
  CHECK(cfg.alpha == 2.25);
  CHECK(cfg.tau == 1.0 / 640);
  CHECK(cfg.x0 == doctest::Approx(std::numbers::pi / 4).epsilon(1e-16));
  CHECK(cfg.N == 1024);
  CHECK(cfg.scheme == "lie");
  CHECK(cfg.n_ladder == std::vector<std::size_t>{256, 512, 1024});
  CHECK(cfg.tau_ladder.size() == 2);
  REQUIRE(cfg.p.has_value());
  CHECK(*cfg.p == 0.7);
  CHECK(cfg.nsteps() == 640);
  CHECK(parse_real_expression("-3*pi/4") == doctest::Approx(-0.75 * std::numbers::pi));
  CHECK(parse_real_expression("2^-3") == 0.125);

  const auto round = parse_config(to_text(cfg));
  CHECK(to_text(round) == to_text(cfg));
  CHECK(config_hash(round) == config_hash(cfg));
  auto moved = cfg;
  moved.output = "elsewhere";
  CHECK(config_hash(moved) == config_hash(cfg));
  moved.seed = 7;
  CHECK(config_hash(moved) != config_hash(cfg));
  for (const auto& key : config_keys()) CHECK_NOTHROW(get_key(cfg, key));

  auto expect_config_error = [](const std::string& text) {
    try {
      parse_config(text).validate();
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::config);
    }
  };
  expect_config_error("wobble = 3\n");
  expect_config_error("m = -1\n");
  expect_config_error("m 3\n");
  expect_config_error("tau = 0.3\n");
  expect_config_error("N = 0\n");
  expect_config_error("R = 0\n");
  expect_config_error("sampler = sobol\n");
  expect_config_error("M = 100\n");

  const auto path = std::filesystem::temp_directory_path() / "qmcts_harness.cfg";
  std::ofstream(path) << "R = 3\nseed = 99\n";
  const auto loaded = load_config(path);
  CHECK(loaded.R == 3);
  CHECK(loaded.seed == 99);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config("/nonexistent/qmcts.cfg"), Error);
}

TEST_CASE("standard error") {
  const std::vector<double> eq(5, 3.25);
  CHECK(standard_error(eq) == 0.0);
  CHECK(standard_error(std::vector<double>{0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(standard_error(std::vector<double>{1.0}), Error);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(7.0, 0.01);
  std::vector<double> v(16);
  for (double& x : v) x = nd(rng);
  // Two-pass oracle in long double.
  long double mean = 0.0L;
  for (double x : v) mean += x;
  mean /= v.size();
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double oracle = static_cast<double>(std::sqrt(ss / (v.size() * (v.size() - 1.0L))));
  CHECK(std::abs(standard_error(v) / oracle - 1.0) <= 1e-12);
  auto scaled = v;
  for (double& x : scaled) x *= -3.0;
  CHECK(standard_error(scaled) == doctest::Approx(3.0 * standard_error(v)).epsilon(1e-12));

  CHECK(stable_mean(eq) == 3.25);
  const std::vector<double> tricky = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  CHECK(stable_mean(tricky) == 0.1);
  CHECK(stable_mean(v) == doctest::Approx(static_cast<double>(mean)).epsilon(1e-15));
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-17);
  CHECK(s.value() == doctest::Approx(1.0 + 1e-14).epsilon(1e-16));
}

TEST_CASE("parallel_for reports the first failing task") {
  std::vector<int> hit(100, 0);
  parallel_for(100, [&](std::size_t i) { hit[i] = 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(50, [](std::size_t i) {
      if (i % 7 == 3) throw Error(ErrorCategory::numeric, "task " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "task 3");
  }
  CHECK(worker_count() >= 1);
}

TEST_CASE("deterministic potential: estimator is exact and split-independent") {
  auto cfg = small_config();
  cfg.m = 0;
  const auto problem = make_problem(cfg);
  SampleSolver solver(problem);
  std::vector<double> S(cfg.M), J(cfg.M);
  solver.solve(std::span<const double>{}, S, J);
  const double exact = S[nearest_node(problem.grid, cfg.x0)];
  cfg.functional = "point";
  for (auto [N, R] : {std::pair<std::size_t, std::size_t>{64, 2}, {16, 8}, {128, 1}, {1, 128}}) {
    cfg.N = N;
    cfg.R = R;
    for (const char* sampler : {"qmc", "mc"}) {
      cfg.sampler = sampler;
      const auto r = estimate(cfg);
      CHECK(r.mean == exact);
      for (double q : r.per_shift) CHECK(q == exact);
      CHECK(r.std_error == 0.0);
      CHECK(r.fields.mean_S == S);
    }
  }
}

TEST_CASE("degenerate rule: N = 1, zero shift") {
  auto cfg = small_config();
  const auto problem = make_problem(cfg);
  const GeneratingVector gv{{1, 1}, 1};
  ShiftSet shifts;
  shifts.count = 1;
  shifts.dimension = 2;
  shifts.shifts = {0.0, 0.0};
  const auto f = qmc_fields(problem, gv, shifts);
  std::vector<double> xi(2), S(cfg.M), J(cfg.M);
  qmc_parameter(gv, shifts.shift(0), 0, xi);
  CHECK(xi[0] == inv_Phi(kClampLow));
  CHECK(xi[1] == inv_Phi(kClampLow));
  SampleSolver(problem).solve(xi, S, J);
  CHECK(f.mean_S == S);
  CHECK(f.mean_J == J);
}

TEST_CASE("estimates are reproducible and agree with Monte Carlo") {
  auto cfg = small_config();
  cfg.functional = "point";
  cfg.N = 64;
  cfg.R = 8;
  const auto a = estimate(cfg), b = estimate(cfg);
  CHECK(a.per_shift == b.per_shift);
  CHECK(a.fields.S == b.fields.S);
  CHECK(a.generating_vector->z == b.generating_vector->z);
  CHECK(a.config_hash == config_hash(cfg));
  auto mc = cfg;
  mc.sampler = "mc";
  mc.N = 4096;
  mc.R = 16;
  const auto o = estimate(mc);
  const double combined = std::sqrt(a.std_error * a.std_error + o.std_error * o.std_error);
  CHECK(std::abs(a.mean - o.mean) <= 4.0 * combined);
}

TEST_CASE("generating vector sources") {
  auto cfg = small_config();
  cfg.N = 1;
  CHECK(generating_vector_for(cfg).z == std::vector<std::uint64_t>{1, 1});
  cfg.N = 64;
  const auto gv = generating_vector_for(cfg);
  CHECK(gv.z.size() == 2);
  const auto path = std::filesystem::temp_directory_path() / "qmcts_harness_gv.txt";
  write_generating_vector(gv, path);
  cfg.generator = "file:" + path.string();
  CHECK(generating_vector_for(cfg).z == gv.z);
  cfg.N = 32;
  CHECK_THROWS_AS(generating_vector_for(cfg), Error);
  std::filesystem::remove(path);
}

TEST_CASE("Gauss-Hermite rules") {
  for (std::size_t n : {1u, 2u, 5u, 20u}) {
    const auto r = gauss_hermite(n);
    REQUIRE(r.nodes.size() == n);
    double m0 = 0, m1 = 0, m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
      const double x = r.nodes[i], w = r.weights[i];
      m0 += w;
      m1 += w * x;
      m2 += w * x * x;
      m4 += w * x * x * x * x;
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(m1) < 1e-14);
    if (n >= 2) CHECK(std::abs(m2 - 1.0) <= 1e-12);
    if (n >= 3) CHECK(std::abs(m4 - 3.0) <= 1e-12);
  }
  // Degree 2n - 1 exactness: E[x^38] = 37!!.
  const auto r = gauss_hermite(20);
  double m38 = 0.0, dfact = 1.0;
  for (int k = 37; k > 1; k -= 2) dfact *= k;
  for (std::size_t i = 0; i < 20; ++i) m38 += r.weights[i] * std::pow(r.nodes[i], 38);
  CHECK(m38 == doctest::Approx(dfact).epsilon(1e-10));

  const auto t = tensor_gauss_hermite(5, 3);
  CHECK(t.count() == 125);
  CHECK(t.xi[2] == gauss_hermite(5).nodes[0]);
  CHECK(t.xi[5] == gauss_hermite(5).nodes[1]);  // last coordinate varies fastest
  double wsum = 0.0;
  for (double w : t.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  const auto pruned = tensor_gauss_hermite(20, 2, 1e-14);
  CHECK(pruned.count() < 400);
  for (double w : pruned.weights) CHECK(w >= 1e-14);
  CHECK_THROWS_AS(gauss_hermite(0), Error);
}

TEST_CASE("reference solutions") {
  auto cfg = small_config();
  cfg.m = 5;
  try {
    reference_solution(cfg);
    FAIL("m = 5 accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("se") != std::string::npos);
  }

  cfg.m = 0;
  const auto r0 = reference_solution(cfg);
  auto solo = cfg;
  solo.scheme = "strang";
  const auto problem = make_problem(solo);
  std::vector<double> S(cfg.M), J(cfg.M);
  SampleSolver(problem).solve(std::span<const double>{}, S, J);
  CHECK(r0.S.values == S);
  CHECK(r0.nodes_used == 1);

  // m = 1 against a dense Monte Carlo average of the same fine solver.
  cfg.m = 1;
  cfg.ref_nodes = 20;
  const auto r1 = reference_solution(cfg);
  auto mc = cfg;
  mc.sampler = "mc";
  mc.functional = "point";
  mc.N = 62500;
  mc.R = 16;
  const auto o = estimate(mc);
  const double ref_point = point_eval(r1.S, cfg.x0);
  MESSAGE("reference " << ref_point << " MC " << o.mean << " +- " << o.std_error);
  CHECK(std::abs(ref_point - o.mean) <= 4.0 * o.std_error);

  const TorusGrid fine(64), coarse(16);
  std::vector<double> v(64);
  for (std::size_t k = 0; k < 64; ++k) v[k] = static_cast<double>(k);
  const auto rr = restrict_to(ObservableField(fine, v, ObservableKind::current_density), coarse);
  CHECK(rr.values[3] == 12.0);
  CHECK_THROWS_AS(restrict_to(ObservableField(coarse, std::vector<double>(16, 0.0), ObservableKind::current_density), fine), Error);
}

TEST_CASE("rate fits") {
  const std::vector<std::pair<double, double>> exact = {{2, 1}, {4, 0.5}, {8, 0.25}};
  CHECK(fit_rate(exact, 0, FitOrientation::samples).slope == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<std::pair<double, double>> p34;
  for (int k = 10; k <= 15; ++k) p34.emplace_back(std::ldexp(1.0, k), std::pow(std::ldexp(1.0, k), -0.75));
  CHECK(fit_rate(p34, 0, FitOrientation::samples).slope == doctest::Approx(0.75).epsilon(1e-12));
  const auto last4 = fit_rate(p34, 4, FitOrientation::samples);
  CHECK(last4.window_begin == 2);
  CHECK(last4.window_end == 6);
  std::vector<std::pair<double, double>> tau_pts = {{0.1, 0.01}, {0.05, 0.0025}, {0.025, 0.000625}};
  CHECK(fit_rate(tau_pts, 0, FitOrientation::time).slope == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int k = 10; k <= 13; ++k) {
      const double N = std::ldexp(1.0, k);
      pts.emplace_back(N, noise(rng) / N);
    }
    const double s = fit_rate(pts, 4, FitOrientation::samples).slope;
    CHECK((s >= 0.8 && s <= 1.2));
  }
  const std::vector<std::pair<double, double>> bad = {{2, 1}, {4, 0.0}};
  CHECK_THROWS_AS(fit_rate(bad, 0, FitOrientation::samples), Error);
  const std::vector<std::pair<double, double>> one = {{2, 1}};
  CHECK_THROWS_AS(fit_rate(one, 0, FitOrientation::samples), Error);
  const std::vector<std::pair<double, double>> same = {{2, 1}, {2, 0.5}};
  CHECK_THROWS_AS(fit_rate(same, 0, FitOrientation::samples), Error);
  const std::vector<std::pair<double, double>> tiny = {{2, 1e-15}, {4, 1e-16}};
  CHECK_THROWS_AS(fit_rate(tiny, 0, FitOrientation::samples, kRoundoffFloor), Error);
}

TEST_CASE("time study with a constant potential refuses to fit") {
  auto cfg = small_config();
  cfg.m = 0;
  cfg.T = 0.25;
  cfg.ref_tau = 1.0 / 320;
  cfg.N = 1;
  cfg.R = 1;
  const std::vector<double> ladder = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  const auto st = run_time_study(cfg, ladder);
  for (double e : st.table.column("err_S")) CHECK(e < 1e-12);
  CHECK_FALSE(st.fit_S.has_value());
  CHECK_FALSE(st.fit_note.empty());
}

TEST_CASE("sample study in standard-error mode") {
  auto cfg = small_config();
  cfg.study_mode = "se";
  cfg.R = 8;
  const std::vector<std::size_t> ladder = {8, 16, 32, 64};
  const auto st = run_sample_study(cfg, ladder);
  CHECK(st.table.rows.size() == 4);
  CHECK(st.table.column("N_tot") == std::vector<double>{64, 128, 256, 512});
  REQUIRE(st.fit_S.has_value());
  CHECK(st.fit_S->slope > 0.3);
  CHECK(st.mode == "se");
}

TEST_CASE("CSV and JSON outputs") {
  Table t{{"a", "b"}, {{0.1, 1e-300}, {std::numbers::pi, -2.5e17}}};
  const auto dir = scratch_dir("csv");
  write_csv(t, dir / "t.csv");
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  Table empty{{"N", "err"}, {}};
  CHECK(to_csv(empty) == "N,err\n");
  CHECK(parse_csv(to_csv(empty)).rows.empty());
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), Error);
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), Error);
  CHECK_THROWS_AS(write_csv(t, dir / "t.csv" / "inner.csv"), Error);

  auto cfg = small_config();
  const auto r = estimate(cfg);
  const auto d1 = scratch_dir("out1"), d2 = scratch_dir("out2");
  emit_outputs(cfg, r, d1);
  emit_outputs(cfg, estimate(cfg), d2);
  for (const char* f : {"estimate.csv", "estimate_field.csv", "estimate.json"}) {
    CHECK(std::filesystem::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  CHECK(std::filesystem::exists(d1 / "estimate.timing.json"));
  const auto manifest = nlohmann::json::parse(slurp(d1 / "estimate.json"));
  CHECK(manifest["seed"] == 12345);
  CHECK(manifest["config_hash"] == config_hash(cfg));
  CHECK(manifest["rng"] == "philox4x32-10");
}
