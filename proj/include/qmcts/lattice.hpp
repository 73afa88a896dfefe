#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qmcts {

// Weight machinery ------------------------------------------------------------

/// 1/(2-2*delta) for p <= 2/3, p/(2-p) for 2/3 < p <= 1.
double lambda_star(double p, double delta);

/// Exponent of the weight function exp(-theta |xi|):
/// (b + sqrt(b^2 + 1 - 1/(2 lambda))) / 2.
double theta_for(double b, double lambda);

/// 2 (sqrt(2 pi) exp(theta^2/eta) / (pi^(2-2 eta) (1-eta) eta))^lambda * zeta(lambda + 1/2)
/// with eta = (2 lambda - 1) / (4 lambda); lambda in (1/2, 1].
double rho(double theta, double lambda);

/// Product-and-order-dependent weights gamma_u = Gamma_|u| * prod_{j in u} gamma_j
/// together with the weight-function parameters they were derived from.
struct WeightSpec {
  double p = 1.0;
  double delta = 0.1;
  double lambda_star = 1.0;
  double C_T = 1.0;
  std::vector<double> b;
  std::vector<double> theta;
  std::vector<double> gamma_dim;
  std::vector<double> log_gamma_order;  // log Gamma_l for l = 0..size-1
  double D = 0.0;                        // inf_j (theta_j - b_j); +inf for m = 0

  std::size_t dimension() const noexcept { return b.size(); }
  double Gamma(std::size_t order) const;
  /// gamma_u for the subset of (0-based) coordinates in `subset`.
  double pod_weight(std::span<const std::size_t> subset) const;
};

/// Builds the POD weight specification for a decay sequence b. Order factors
/// are tabulated up to `max_order` (at least the dimension is recommended).
WeightSpec build_weight_spec(std::span<const double> b, double p, double delta, double T,
                             std::size_t max_order = 64);

struct P1ConditionReport {
  bool satisfied = false;
  double lhs = 0.0;  // sum_j b_j
  double rhs = 0.0;  // sqrt(D) / (4 C_T sqrt(rho(theta_max, 1)))
};

/// Side condition needed when the summability exponent is p = 1.
P1ConditionReport check_p1_condition(const WeightSpec& spec, double theta_max);

// Generating vectors and points -------------------------------------------------

struct GeneratingVector {
  std::vector<std::uint64_t> z;
  std::uint64_t N = 1;

  std::size_t dimension() const noexcept { return z.size(); }
};

/// Throws unless 1 <= z_j <= N-1 with gcd(z_j, N) = 1 (z_j = 1 allowed for N = 1).
void validate(const GeneratingVector& gv);

/// Row-major N x m matrix; row j-1 holds frac(j z / N + shift), j = 1..N.
std::vector<double> lattice_points(const GeneratingVector& gv, std::span<const double> shift);

struct ShiftSet {
  std::vector<double> shifts;  // row-major R x m, each entry in [0, 1)
  std::size_t count = 0;
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
  std::string rng_id;

  std::span<const double> shift(std::size_t k) const {
    return {shifts.data() + k * dimension, dimension};
  }
};

ShiftSet random_shifts(std::size_t R, std::size_t m, std::uint64_t seed);

/// Row-major Nmc x m i.i.d. standard normal vectors, inv_Phi of open
/// uniforms from the Monte Carlo stream.
std::vector<double> mc_points(std::size_t Nmc, std::size_t m, std::uint64_t seed);

/// One i.i.d. standard-normal vector; row `sample` of mc_points.
void mc_point(std::uint64_t seed, std::size_t sample, std::span<double> out);

// Component-by-component construction ---------------------------------------------

/// Supplies the one-dimensional shift-averaged kernel of coordinate j
/// (0-based) at the N fractions i/N, i = 0..N-1. Implementations must be
/// symmetric: K(i/N) == K((N-i)/N) bitwise.
class KernelProvider {
 public:
  virtual ~KernelProvider() = default;
  virtual std::vector<double> table(std::size_t coordinate, std::uint64_t N) const = 0;
  virtual std::string name() const = 0;
};

struct CbcResult {
  GeneratingVector gv;
  std::vector<double> squared_error;  // criterion after fixing each coordinate
};

/// Greedy CBC with the order recursion over |u| <= order_cap. The order cap
/// defaults to min(m, 35). Ties go to the smallest admissible z.
CbcResult cbc_construct(std::size_t m, std::uint64_t N, const WeightSpec& spec,
                        const KernelProvider& kernel, std::size_t order_cap = 0);

/// Shift-averaged squared worst-case error of z for the given weights,
/// evaluated by the same order recursion CBC uses.
double cbc_criterion(const GeneratingVector& gv, const WeightSpec& spec,
                     const KernelProvider& kernel, std::size_t order_cap = 0);

// File format: line 1 "N <value>", then one z_j per line.
GeneratingVector read_generating_vector(const std::filesystem::path& path);
void write_generating_vector(const GeneratingVector& gv, const std::filesystem::path& path);
std::string format_generating_vector(const GeneratingVector& gv);
GeneratingVector parse_generating_vector(const std::string& text);

}  // namespace qmcts
