#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmcts/config.hpp"
#include "qmcts/rate_fit.hpp"
#include "qmcts/reference.hpp"

namespace qmcts {

/// Column-labelled numeric table.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

struct Study {
  Table table;
  std::optional<RateFit> fit_S;
  std::optional<RateFit> fit_J;
  std::string fit_note;  // why a fit was refused, empty otherwise
  std::string mode;      // "time", "l2" or "se"
  std::optional<GeneratingVector> generating_vector;  // time study with QMC
};

/// Errors of the expected S and J fields against the reference for every
/// step size. Sampler settings (N, R, seed, generating vector) stay fixed.
/// Columns: tau, nsteps, err_S, err_J.
Study run_time_study(const ExperimentConfig& cfg, std::span<const double> tau_ladder,
                     const ReferenceSolution* reference = nullptr);

/// Errors for every N at fixed tau and M. cfg.study_mode selects the L2 error
/// against the reference ("l2", m <= 4) or the standard error of the point
/// values at x0 ("se"). Columns: N, N_tot, err_S, err_J, mean_S, mean_J,
/// where the means are point values at x0.
Study run_sample_study(const ExperimentConfig& cfg, std::span<const std::size_t> n_ladder,
                       const ReferenceSolution* reference = nullptr);

}  // namespace qmcts
