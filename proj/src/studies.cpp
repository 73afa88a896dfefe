#include "qmcts/studies.hpp"

#include <algorithm>

#include "qmcts/error.hpp"
#include "qmcts/estimator.hpp"

namespace qmcts {

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) fail(ErrorCategory::io, "table has no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

namespace {

void fit_columns(Study& study, const ExperimentConfig& cfg, std::size_t x_col, FitOrientation orientation,
                 std::optional<double> expected) {
  auto pairs_for = [&](std::size_t col) {
    std::vector<std::pair<double, double>> p;
    for (const auto& r : study.table.rows) p.emplace_back(r[x_col], r[col]);
    return p;
  };
  const std::size_t cS = 2, cJ = 3;
  for (auto [col, target] : {std::pair{cS, &study.fit_S}, std::pair{cJ, &study.fit_J}}) {
    try {
      const auto pairs = pairs_for(col);
      *target = fit_rate(pairs, cfg.fit_window, orientation, kRoundoffFloor);
      (*target)->expected = expected;
    } catch (const Error& e) {
      if (!study.fit_note.empty()) study.fit_note += "; ";
      study.fit_note += study.table.columns[col] + ": " + e.what();
    }
  }
}

const ReferenceSolution& ensure_reference(const ExperimentConfig& cfg, const ReferenceSolution* given,
                                          std::optional<ReferenceSolution>& storage) {
  if (given) {
    if (given->S.grid.size() != cfg.M) fail(ErrorCategory::dimension, "reference grid does not match M");
    return *given;
  }
  storage = reference_solution(cfg);
  return *storage;
}

}  // namespace

Study run_time_study(const ExperimentConfig& cfg, std::span<const double> tau_ladder,
                     const ReferenceSolution* reference) {
  cfg.validate();
  if (tau_ladder.empty()) fail(ErrorCategory::config, "empty tau ladder");
  if (cfg.m > kMaxReferenceDimension) {
    fail(ErrorCategory::dimension, "time studies need a reference solution, which is limited to m <= " +
                                       std::to_string(kMaxReferenceDimension));
  }
  std::optional<ReferenceSolution> storage;
  const ReferenceSolution& ref = ensure_reference(cfg, reference, storage);

  Study study;
  study.mode = "time";
  study.table.columns = {"tau", "nsteps", "err_S", "err_J"};
  std::optional<GeneratingVector> gv;
  if (cfg.sampler == "qmc") gv = generating_vector_for(cfg);
  study.generating_vector = gv;
  for (double tau : tau_ladder) {
    ExperimentConfig c = cfg;
    c.tau = tau;
    c.validate();
    const Problem problem = make_problem(c);
    const FieldEstimate est = gv ? qmc_fields(problem, *gv, random_shifts(c.R, c.m, c.seed))
                                 : mc_fields(problem, c.R, c.N, c.seed);
    study.table.rows.push_back({tau, static_cast<double>(c.nsteps()),
                                l2_relative_error(est.mean(ObservableKind::position_density), ref.S),
                                l2_relative_error(est.mean(ObservableKind::current_density), ref.J)});
  }
  fit_columns(study, cfg, 0, FitOrientation::time,
              static_cast<double>(SplittingScheme::by_name(cfg.scheme).formal_order()));
  return study;
}

Study run_sample_study(const ExperimentConfig& cfg, std::span<const std::size_t> n_ladder,
                       const ReferenceSolution* reference) {
  cfg.validate();
  if (n_ladder.empty()) fail(ErrorCategory::config, "empty N ladder");
  const bool l2 = cfg.study_mode == "l2";
  if (l2 && cfg.m > kMaxReferenceDimension) {
    fail(ErrorCategory::dimension, "L2-error mode needs a reference solution (m <= " +
                                       std::to_string(kMaxReferenceDimension) + "); use study_mode = se");
  }
  if (!l2 && cfg.R < 2) fail(ErrorCategory::config, "standard-error mode needs R >= 2");
  std::optional<ReferenceSolution> storage;
  const ReferenceSolution* ref = l2 ? &ensure_reference(cfg, reference, storage) : nullptr;

  Study study;
  study.mode = cfg.study_mode;
  study.table.columns = {"N", "N_tot", "err_S", "err_J", "mean_S", "mean_J"};
  for (std::size_t N : n_ladder) {
    ExperimentConfig c = cfg;
    c.N = N;
    c.validate();
    const Problem problem = make_problem(c);
    const FieldEstimate est = c.sampler == "qmc"
                                  ? qmc_fields(problem, generating_vector_for(c), random_shifts(c.R, c.m, c.seed))
                                  : mc_fields(problem, c.R, c.N, c.seed);
    const auto pS = est.point_values(ObservableKind::position_density, c.x0);
    const auto pJ = est.point_values(ObservableKind::current_density, c.x0);
    double eS = 0.0, eJ = 0.0;
    if (l2) {
      eS = l2_relative_error(est.mean(ObservableKind::position_density), ref->S);
      eJ = l2_relative_error(est.mean(ObservableKind::current_density), ref->J);
    } else {
      eS = standard_error(pS);
      eJ = standard_error(pJ);
    }
    study.table.rows.push_back({static_cast<double>(N), static_cast<double>(N * c.R), eS, eJ,
                                stable_mean(pS), stable_mean(pJ)});
  }
  std::optional<double> expected;
  if (cfg.sampler == "mc") {
    expected = 0.5;
  } else {
    const double p = effective_p(cfg, decay_sequences(make_potential(cfg)));
    expected = std::min(1.0, 1.0 / p - 0.5);
  }
  fit_columns(study, cfg, 1, FitOrientation::samples, expected);
  return study;
}

}  // namespace qmcts
