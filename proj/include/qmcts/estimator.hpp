#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmcts/config.hpp"
#include "qmcts/lattice.hpp"
#include "qmcts/observables.hpp"

namespace qmcts {

/// Worker count from QMCTS_THREADS, else the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs task(i) for i in [0, count) on worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// Solves one trajectory per parameter vector and forms S and J at time T.
/// Not thread-safe; each worker owns one.
class SampleSolver {
 public:
  explicit SampleSolver(const Problem& problem);

  void solve(std::span<const double> xi, std::span<double> S, std::span<double> J);

 private:
  const Problem& problem_;
  GridPotential potential_;
  Propagator propagator_;
  std::vector<double> v_;
  std::vector<Complex> psi_;
};

/// Per-shift (or per-batch) mean fields of S and J and their means.
struct FieldEstimate {
  TorusGrid grid{2};
  std::size_t R = 0;
  std::size_t N = 0;
  std::vector<double> S;  // row-major R x M
  std::vector<double> J;
  std::vector<double> mean_S;
  std::vector<double> mean_J;

  std::span<const double> per_shift(ObservableKind kind, std::size_t k) const;
  ObservableField mean(ObservableKind kind) const;
  /// Per-shift point values at the node nearest to x0.
  std::vector<double> point_values(ObservableKind kind, double x0) const;
};

/// Per-shift values of the configured scalar functional with their mean and
/// standard error, plus the full fields.
struct EstimatorResult {
  ObservableKind kind = ObservableKind::position_density;
  double x0 = 0.0;
  std::vector<double> per_shift;
  double mean = 0.0;
  double std_error = 0.0;  // 0 when R = 1
  FieldEstimate fields;
  std::optional<GeneratingVector> generating_vector;
  double wall_time = 0.0;
  std::string config_hash;
};

/// sqrt(sum_k (Q_k - mean)^2 / (R (R - 1))). Throws for R < 2.
double standard_error(std::span<const double> values);

/// Mean with pivoted compensated summation in ascending order: exact when
/// all values are equal.
double stable_mean(std::span<const double> values);

/// Generating vector for the configuration: CBC with POD weights derived from
/// the potential, or read from file. N = 1 gives the all-ones vector.
GeneratingVector generating_vector_for(const ExperimentConfig& cfg);

/// Mapped parameter vector xi of lattice point j (0-based; point j+1 of the
/// rule) under shift `shift`.
void qmc_parameter(const GeneratingVector& gv, std::span<const double> shift, std::size_t j,
                   std::span<double> xi);

FieldEstimate qmc_fields(const Problem& problem, const GeneratingVector& gv, const ShiftSet& shifts);
FieldEstimate mc_fields(const Problem& problem, std::size_t batches, std::size_t per_batch,
                        std::uint64_t seed);

/// Weighted quadrature sum_i w_i F(xi_i) of both fields over explicit nodes.
struct WeightedNodes {
  std::vector<double> xi;  // row-major count x m
  std::vector<double> weights;
  std::size_t dimension = 0;
  std::size_t count() const noexcept { return weights.size(); }
};
FieldEstimate quadrature_fields(const Problem& problem, const WeightedNodes& nodes);

EstimatorResult summarize(const ExperimentConfig& cfg, FieldEstimate fields);

/// Randomly shifted lattice estimator of the configured observable.
EstimatorResult qmc_estimate(const ExperimentConfig& cfg);
EstimatorResult qmc_estimate(const ExperimentConfig& cfg, const GeneratingVector& gv);
/// R batches of N i.i.d. samples.
EstimatorResult mc_estimate(const ExperimentConfig& cfg);
/// Dispatches on cfg.sampler.
EstimatorResult estimate(const ExperimentConfig& cfg);

}  // namespace qmcts
