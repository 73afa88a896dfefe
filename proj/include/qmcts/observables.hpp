#pragma once

#include <span>
#include <string>
#include <vector>

#include "qmcts/torus.hpp"

namespace qmcts {

enum class ObservableKind { position_density, current_density };

std::string kind_name(ObservableKind kind);
ObservableKind parse_kind(const std::string& name);

/// Real nodal values of an observable on a grid.
struct ObservableField {
  TorusGrid grid;
  std::vector<double> values;
  ObservableKind kind;

  ObservableField(TorusGrid g, std::vector<double> v, ObservableKind k);
};

/// |psi|^2 at every node.
ObservableField position_density(const WaveField& f);

/// Im(conj(psi) * psi') with psi' from spectral_derivative.
ObservableField current_density(const WaveField& f);

ObservableField observe(const WaveField& f, ObservableKind kind);

/// Index of the node nearest to x0 (reduced onto [-pi, pi)); ties go to the smaller index.
std::size_t nearest_node(const TorusGrid& grid, double x0);

/// Value at the node nearest to x0.
double point_eval(const ObservableField& obs, double x0);

/// ||num - ref|| / ||ref|| in the discrete L2 norm. Throws when ||ref|| = 0.
double l2_relative_error(const ObservableField& num, const ObservableField& ref);

/// Fused kernels used by the estimator on raw node values.
void position_density_into(std::span<const Complex> psi, std::span<double> out);
void current_density_into(std::span<const Complex> psi, std::span<double> out);

}  // namespace qmcts
