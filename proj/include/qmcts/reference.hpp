#pragma once

#include <cstddef>
#include <vector>

#include "qmcts/config.hpp"
#include "qmcts/estimator.hpp"
#include "qmcts/observables.hpp"

namespace qmcts {

/// n-point Gauss-Hermite rule for the standard normal density: nodes in
/// ascending order, weights summing to one. Exact for polynomials of degree
/// up to 2n - 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(std::size_t n);

/// Tensor product of the one-dimensional rule in m dimensions, keeping only
/// nodes whose product weight is at least `prune` (0 keeps all). Nodes are
/// enumerated with the last coordinate varying fastest.
WeightedNodes tensor_gauss_hermite(std::size_t n, std::size_t m, double prune = 0.0);

struct ReferenceSolution {
  ObservableField S;
  ObservableField J;
  std::size_t nodes_used = 0;
  double dropped_weight = 0.0;  // total product weight removed by pruning
};

/// Largest dimension for which a tensor-grid reference is attempted.
inline constexpr std::size_t kMaxReferenceDimension = 4;

/// Expected S and J at time T by tensor Gauss-Hermite collocation over fine
/// Strang solves (ref_tau, ref_M, ref_nodes from the configuration), restricted
/// to the configured grid of M nodes.
ReferenceSolution reference_solution(const ExperimentConfig& cfg);

/// Keeps every (fine.size() / coarse.size())-th node; grids share x_0 = -pi.
ObservableField restrict_to(const ObservableField& fine, const TorusGrid& coarse);

}  // namespace qmcts
