// qmcts: command-line driver for the randomly shifted lattice time-splitting
// solver. Every configuration key is also a --<key> flag.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "qmcts/config.hpp"
#include "qmcts/error.hpp"
#include "qmcts/estimator.hpp"
#include "qmcts/io.hpp"
#include "qmcts/kernels.hpp"
#include "qmcts/normal.hpp"
#include "qmcts/rate_fit.hpp"
#include "qmcts/reference.hpp"
#include "qmcts/studies.hpp"

namespace {

using namespace qmcts;
using Clock = std::chrono::steady_clock;

struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* app, ConfigFlags& flags) {
  app->add_option("-c,--config", flags.file, "key = value configuration file");
  for (const auto& key : config_keys()) {
    app->add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; },
        "override configuration key '" + key + "'");
  }
}

ExperimentConfig resolve(const ConfigFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.file.empty()) cfg = load_config(flags.file);
  for (const auto& [k, v] : flags.values) set_key(cfg, k, v);
  cfg.validate();
  return cfg;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_real_expression(item));
  }
  return out;
}

void print_fit(const char* label, const std::optional<RateFit>& fit) {
  if (fit) std::printf("%s slope %.4f\n", label, fit->slope);
}

int run(int argc, char** argv) {
  CLI::App app{"Quasi-Monte Carlo time-splitting for the Schrodinger equation with a random potential"};
  app.require_subcommand(1);
  app.set_version_flag("--version", build_version() + " (" + build_git_describe() + ")");

  ConfigFlags solve_f, cbc_f, points_f, est_f, time_f, samp_f, ref_f;

  auto* solve = app.add_subcommand("solve", "one trajectory for a fixed xi; writes x, re, im, S, J");
  add_config_flags(solve, solve_f);
  std::string xi_text;
  solve->add_option("--xi", xi_text, "comma-separated parameter vector (default zeros)");

  auto* cbc = app.add_subcommand("cbc", "construct a generating vector and write it to <output>/generating_vector.txt");
  add_config_flags(cbc, cbc_f);

  auto* points = app.add_subcommand("points", "emit lattice or MC points as CSV (j, then m columns)");
  add_config_flags(points, points_f);
  std::size_t shift_index = 1;
  bool unshifted = false, mapped = false;
  points->add_option("--shift-index", shift_index, "which random shift to apply (1-based)")->check(CLI::PositiveNumber);
  points->add_flag("--unshifted", unshifted, "use the zero shift");
  points->add_flag("--mapped", mapped, "apply the inverse normal map");

  auto* est = app.add_subcommand("estimate", "run the estimator; writes estimate.{csv,json} and the mean fields");
  add_config_flags(est, est_f);

  auto* stime = app.add_subcommand("study-time", "time-step study over tau_ladder against the reference");
  add_config_flags(stime, time_f);

  auto* ssamp = app.add_subcommand("study-samples", "sample-count study over n_ladder (study_mode l2 or se)");
  add_config_flags(ssamp, samp_f);

  auto* ref = app.add_subcommand("reference", "tensor Gauss-Hermite reference of S and J (m <= 4)");
  add_config_flags(ref, ref_f);

  auto* fit = app.add_subcommand("fit", "least-squares rate fit on columns of an existing CSV");
  std::string csv_path, x_col = "N_tot", y_col = "err_S", orientation = "samples";
  std::size_t window = 4;
  fit->add_option("csv", csv_path, "input CSV")->required();
  fit->add_option("--x", x_col, "abscissa column");
  fit->add_option("--y", y_col, "error column");
  fit->add_option("--window", window, "number of trailing points (0 = all)");
  fit->add_option("--orientation", orientation, "samples or time")->check(CLI::IsMember({"samples", "time"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCategory::config);
  }

  if (*solve) {
    const auto cfg = resolve(solve_f);
    const Problem problem = make_problem(cfg);
    std::vector<double> xi = xi_text.empty() ? std::vector<double>(cfg.m, 0.0) : parse_list(xi_text);
    if (xi.size() != cfg.m) fail(ErrorCategory::dimension, "--xi must have m entries");
    const auto V = evaluate(problem.potential, xi, problem.grid);
    const WaveField out = propagate(problem.initial, problem.scheme, cfg.tau, cfg.nsteps(), V);
    const auto S = position_density(out);
    const auto J = current_density(out);
    Table t{{"x", "re", "im", "S", "J"}, {}};
    for (std::size_t k = 0; k < out.size(); ++k) {
      t.rows.push_back({problem.grid.node(k), out[k].real(), out[k].imag(), S.values[k], J.values[k]});
    }
    const auto path = std::filesystem::path(cfg.output) / "solve.csv";
    write_csv(t, path);
    std::printf("wrote %s (mass %.17g)\n", path.string().c_str(), discrete_l2_norm(out));
  } else if (*cbc) {
    const auto cfg = resolve(cbc_f);
    const GeneratingVector gv = generating_vector_for(cfg);
    const auto path = std::filesystem::path(cfg.output) / "generating_vector.txt";
    std::filesystem::create_directories(path.parent_path());
    write_generating_vector(gv, path);
    std::printf("wrote %s\n", path.string().c_str());
  } else if (*points) {
    const auto cfg = resolve(points_f);
    std::vector<double> pts;
    if (cfg.sampler == "mc") {
      pts = mc_points(cfg.N, cfg.m, cfg.seed);
    } else {
      const GeneratingVector gv = generating_vector_for(cfg);
      const ShiftSet shifts = random_shifts(std::max(cfg.R, shift_index), cfg.m, cfg.seed);
      std::vector<double> zero(cfg.m, 0.0);
      pts = lattice_points(gv, unshifted ? std::span<const double>(zero) : shifts.shift(shift_index - 1));
      if (mapped) pts = map_points(pts, cfg.m).values;
    }
    Table t;
    t.columns.push_back("j");
    for (std::size_t k = 1; k <= cfg.m; ++k) t.columns.push_back("x" + std::to_string(k));
    for (std::size_t j = 0; j < cfg.N; ++j) {
      std::vector<double> row{static_cast<double>(j + 1)};
      row.insert(row.end(), pts.begin() + static_cast<std::ptrdiff_t>(j * cfg.m),
                 pts.begin() + static_cast<std::ptrdiff_t>((j + 1) * cfg.m));
      t.rows.push_back(std::move(row));
    }
    std::cout << to_csv(t);
  } else if (*est) {
    const auto cfg = resolve(est_f);
    const EstimatorResult r = estimate(cfg);
    emit_outputs(cfg, r, cfg.output);
    std::printf("%s(x0=%.6g): mean %.12g  std_error %.3e  (%.2fs)\n", kind_name(r.kind).c_str(), r.x0, r.mean,
                r.std_error, r.wall_time);
  } else if (*stime) {
    const auto cfg = resolve(time_f);
    const auto t0 = Clock::now();
    const Study s = run_time_study(cfg, cfg.tau_ladder);
    emit_outputs(cfg, s, "time_study", cfg.output, seconds_since(t0));
    print_fit("err_S", s.fit_S);
    print_fit("err_J", s.fit_J);
    if (!s.fit_note.empty()) std::printf("fit: %s\n", s.fit_note.c_str());
  } else if (*ssamp) {
    const auto cfg = resolve(samp_f);
    const auto t0 = Clock::now();
    const Study s = run_sample_study(cfg, cfg.n_ladder);
    emit_outputs(cfg, s, "sample_study", cfg.output, seconds_since(t0));
    print_fit("err_S", s.fit_S);
    print_fit("err_J", s.fit_J);
    if (!s.fit_note.empty()) std::printf("fit: %s\n", s.fit_note.c_str());
  } else if (*ref) {
    const auto cfg = resolve(ref_f);
    const auto t0 = Clock::now();
    const ReferenceSolution r = reference_solution(cfg);
    Table t{{"x", "S", "J"}, {}};
    for (std::size_t k = 0; k < r.S.values.size(); ++k) t.rows.push_back({r.S.grid.node(k), r.S.values[k], r.J.values[k]});
    const std::filesystem::path dir(cfg.output);
    write_csv(t, dir / "reference.csv");
    auto doc = manifest_base(cfg);
    doc["nodes_used"] = r.nodes_used;
    doc["dropped_weight"] = r.dropped_weight;
    write_json(doc, dir / "reference.json");
    write_timing(seconds_since(t0), dir / "reference.timing.json");
    std::printf("reference from %zu nodes written to %s\n", r.nodes_used, dir.string().c_str());
  } else if (*fit) {
    const Table t = read_csv(csv_path);
    const auto xs = t.column(x_col);
    const auto ys = t.column(y_col);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < xs.size(); ++i) pairs.emplace_back(xs[i], ys[i]);
    const RateFit f = fit_rate(pairs, window,
                               orientation == "time" ? FitOrientation::time : FitOrientation::samples);
    std::cout << fit_to_json(f).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qmcts::Error& e) {
    std::fprintf(stderr, "qmcts: %s error: %s\n", qmcts::category_name(e.category()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qmcts: internal error: %s\n", e.what());
    return 1;
  }
}
