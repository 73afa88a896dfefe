#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmcts/torus.hpp"

namespace qmcts {

enum class Subflow { kinetic, potential };

struct Stage {
  Subflow kind;
  double fraction;  // multiple of the time step; may be negative
};

/// Ordered composition of exact subflows making up one time step.
class SplittingScheme {
 public:
  /// Rejects empty stage lists and schemes whose kinetic or potential
  /// fractions do not each sum to one.
  SplittingScheme(std::string name, std::vector<Stage> stages, int formal_order);

  /// Potential(1) then Kinetic(1).
  static SplittingScheme lie();
  /// Kinetic(1/2), Potential(1), Kinetic(1/2).
  static SplittingScheme strang();

  /// One stage per line: `kinetic <fraction>` or `potential <fraction>`;
  /// optional `order <n>` and `name <label>` lines; `#` starts a comment.
  static SplittingScheme parse(std::string_view text, std::string default_name = "custom");
  static SplittingScheme from_file(const std::filesystem::path& path);

  /// "lie", "strang" or "custom:<file>".
  static SplittingScheme by_name(std::string_view name);

  const std::string& name() const noexcept { return name_; }
  std::span<const Stage> stages() const noexcept { return stages_; }
  int formal_order() const noexcept { return formal_order_; }

 private:
  std::string name_;
  std::vector<Stage> stages_;
  int formal_order_;
};

/// Applies the stages left to right, each as its own exact subflow.
WaveField step(const WaveField& f, const SplittingScheme& scheme, double tau,
               std::span<const double> potential);

/// nsteps applications of the scheme. Runs through Propagator.
WaveField propagate(const WaveField& f, const SplittingScheme& scheme, double tau,
                    std::size_t nsteps, std::span<const double> potential);

/// Fast repeated stepping with a fixed scheme and step size. Multipliers are
/// cached, and consecutive stages of the same kind (including across step
/// boundaries) are merged into one exact subflow, so a Strang run costs one
/// transform pair per step.
class Propagator {
 public:
  Propagator(const TorusGrid& grid, const SplittingScheme& scheme, double tau);

  const TorusGrid& grid() const noexcept { return grid_; }

  /// Sets the real potential for subsequent advance() calls.
  void set_potential(std::span<const double> potential);

  /// Advances physical-space values in place by nsteps time steps.
  void advance(std::span<Complex> values, std::size_t nsteps);

 private:
  const std::vector<Complex>& kinetic_multiplier(double fraction);
  const std::vector<Complex>& potential_multiplier(double fraction);
  void apply_kinetic(std::span<Complex> values, double fraction);
  void apply_potential(std::span<Complex> values, double fraction);

  TorusGrid grid_;
  std::vector<Stage> stages_;
  double tau_;
  std::vector<double> potential_;
  bool has_potential_ = false;
  std::vector<std::pair<double, std::vector<Complex>>> kinetic_cache_;
  std::vector<std::pair<double, std::vector<Complex>>> potential_cache_;
};

}  // namespace qmcts
