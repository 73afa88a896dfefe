#include "qmcts/reference.hpp"

#include "qmcts/error.hpp"
#include "qmcts/summation.hpp"

namespace qmcts {

ObservableField restrict_to(const ObservableField& fine, const TorusGrid& coarse) {
  const std::size_t Mf = fine.grid.size();
  const std::size_t Mc = coarse.size();
  if (Mc > Mf || Mf % Mc != 0) fail(ErrorCategory::dimension, "cannot restrict to a finer or incompatible grid");
  const std::size_t stride = Mf / Mc;
  std::vector<double> v(Mc);
  for (std::size_t k = 0; k < Mc; ++k) v[k] = fine.values[k * stride];
  return {coarse, std::move(v), fine.kind};
}

ReferenceSolution reference_solution(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.m > kMaxReferenceDimension) {
    fail(ErrorCategory::dimension,
         "tensor-grid reference refused for m = " + std::to_string(cfg.m) + " > " +
             std::to_string(kMaxReferenceDimension) + "; use the standard-error mode (study_mode = se)");
  }
  ExperimentConfig fine = cfg;
  fine.scheme = "strang";
  fine.tau = cfg.ref_tau;
  fine.M = cfg.ref_M;
  fine.validate();
  const Problem problem = make_problem(fine);
  const WeightedNodes nodes = tensor_gauss_hermite(cfg.ref_nodes, cfg.m, cfg.ref_prune);
  const FieldEstimate est = quadrature_fields(problem, nodes);

  CompensatedSum kept;
  for (double w : nodes.weights) kept.add(w);
  const TorusGrid coarse(cfg.M);
  return ReferenceSolution{restrict_to(est.mean(ObservableKind::position_density), coarse),
                           restrict_to(est.mean(ObservableKind::current_density), coarse), nodes.count(),
                           1.0 - kept.value()};
}

}  // namespace qmcts
