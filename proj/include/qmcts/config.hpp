#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qmcts/observables.hpp"
#include "qmcts/potential.hpp"
#include "qmcts/splitting.hpp"
#include "qmcts/torus.hpp"

namespace qmcts {

/// Flat key/value description of one experiment. Every field has a key of the
/// same name in config files and a --<key> flag on the command line.
struct ExperimentConfig {
  // potential
  std::string family = "cosine";
  double alpha = 4.5;
  std::size_t m = 4;
  double offset = 1.0;
  // discretization
  std::size_t M = 128;
  std::string scheme = "strang";
  double tau = 1e-3;
  double T = 1.0;
  std::string initial = "gaussian";  // gaussian | plane:<k>
  // sampling
  std::string sampler = "qmc";  // qmc | mc
  std::size_t N = 1024;
  std::size_t R = 16;
  std::uint64_t seed = 12345;
  std::string generator = "cbc";  // cbc | file:<path>
  std::optional<double> p;        // inferred from the decay of b_j when unset
  double delta = 0.1;
  std::size_t order_cap = 0;      // 0: min(m, 35)
  // observable
  std::string observable = "S";   // S | J
  std::string functional = "field";  // field | point
  double x0 = 0.785398163397448309616;  // pi/4
  // reference solution
  double ref_tau = 1e-3;
  std::size_t ref_M = 256;
  std::size_t ref_nodes = 20;
  double ref_prune = 1e-20;
  // studies
  std::vector<std::size_t> n_ladder = {256, 512, 1024, 2048, 4096, 8192};
  std::vector<double> tau_ladder = {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320, 1.0 / 640};
  std::size_t fit_window = 4;
  std::string study_mode = "l2";  // l2 | se
  std::string output = "qmcts_out";

  /// Number of steps T / tau; throws unless it is an integer within 1e-12.
  std::size_t nsteps() const;
  void validate() const;
};

/// Keys accepted by set_key, in canonical order.
const std::vector<std::string>& config_keys();

/// Assigns one key from its textual value; throws a config error on unknown
/// keys or malformed values.
void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_key(const ExperimentConfig& cfg, const std::string& key);

/// `key = value` lines, `#` comments, blank lines ignored.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Canonical text of every key (round-trips through parse_config).
std::string to_text(const ExperimentConfig& cfg);

/// FNV-1a 64-bit hash of every key except output, hex encoded.
std::string config_hash(const ExperimentConfig& cfg);

/// Parses reals such as "0.5", "pi/4", "-3*pi/4", "1/640", "2^-3".
double parse_real_expression(const std::string& text);

/// Objects derived from a configuration.
struct Problem {
  KLPotential potential;
  TorusGrid grid;
  SplittingScheme scheme;
  WaveField initial;
  double tau;
  std::size_t nsteps;
};

KLPotential make_potential(const ExperimentConfig& cfg);
InitialData make_initial(const ExperimentConfig& cfg);
Problem make_problem(const ExperimentConfig& cfg);

/// Configured p, or min(1, 1.05 / r) with r the fitted tail decay of b_j
/// (1 when fewer than two terms are available).
double effective_p(const ExperimentConfig& cfg, const DecayReport& decay);

}  // namespace qmcts
