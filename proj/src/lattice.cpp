#include "qmcts/lattice.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qmcts/error.hpp"
#include "qmcts/normal.hpp"
#include "qmcts/random.hpp"

namespace qmcts {

double lambda_star(double p, double delta) {
  if (!(p > 0.0 && p <= 1.0)) fail(ErrorCategory::domain, "p must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 0.5)) fail(ErrorCategory::domain, "delta must lie in (0, 1/2]");
  if (p <= 2.0 / 3.0) return 1.0 / (2.0 - 2.0 * delta);
  return p / (2.0 - p);
}

double theta_for(double b, double lambda) {
  if (!(lambda > 0.5)) fail(ErrorCategory::domain, "lambda must exceed 1/2");
  if (!(b >= 0.0) || !std::isfinite(b)) fail(ErrorCategory::domain, "b_j must be finite and nonnegative");
  return 0.5 * (b + std::sqrt(b * b + 1.0 - 1.0 / (2.0 * lambda)));
}

double rho(double theta, double lambda) {
  if (!(lambda > 0.5 && lambda <= 1.0)) fail(ErrorCategory::domain, "lambda must lie in (1/2, 1]");
  if (!std::isfinite(theta)) fail(ErrorCategory::domain, "theta must be finite");
  const double eta = (2.0 * lambda - 1.0) / (4.0 * lambda);
  const double base = std::sqrt(2.0 * std::numbers::pi) * std::exp(theta * theta / eta) /
                      (std::pow(std::numbers::pi, 2.0 - 2.0 * eta) * (1.0 - eta) * eta);
  return 2.0 * std::pow(base, lambda) * boost::math::zeta(lambda + 0.5);
}

double WeightSpec::Gamma(std::size_t order) const {
  if (order >= log_gamma_order.size()) fail(ErrorCategory::dimension, "order beyond tabulated Gamma");
  return std::exp(log_gamma_order[order]);
}

double WeightSpec::pod_weight(std::span<const std::size_t> subset) const {
  if (subset.size() >= log_gamma_order.size()) fail(ErrorCategory::dimension, "order beyond tabulated Gamma");
  double log_w = log_gamma_order[subset.size()];
  for (std::size_t j : subset) {
    if (j >= gamma_dim.size()) fail(ErrorCategory::dimension, "coordinate beyond weight spec");
    log_w += std::log(gamma_dim[j]);
  }
  return std::exp(log_w);
}

WeightSpec build_weight_spec(std::span<const double> b, double p, double delta, double T,
                             std::size_t max_order) {
  if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorCategory::domain, "T must be positive");
  WeightSpec w;
  w.p = p;
  w.delta = delta;
  w.lambda_star = lambda_star(p, delta);
  w.C_T = std::max(1.0, T);
  w.b.assign(b.begin(), b.end());
  w.D = std::numeric_limits<double>::infinity();
  const double lam = w.lambda_star;
  for (double bj : w.b) {
    const double th = theta_for(bj, lam);
    if (!(th > bj)) fail(ErrorCategory::numeric, "theta_j <= b_j");
    w.theta.push_back(th);
    w.D = std::min(w.D, th - bj);
    const double ratio = bj * bj / ((th - bj) * rho(th, lam));
    w.gamma_dim.push_back(std::pow(ratio, 1.0 / (1.0 + lam)));
  }
  const std::size_t orders = std::max(max_order, w.b.size()) + 1;
  const double log4c = std::log(4.0 * w.C_T);
  w.log_gamma_order.resize(orders);
  for (std::size_t l = 0; l < orders; ++l) {
    const double ld = static_cast<double>(l);
    w.log_gamma_order[l] = (2.0 * std::lgamma(ld + 2.0) + 2.0 * ld * log4c) / (1.0 + lam);
  }
  return w;
}

P1ConditionReport check_p1_condition(const WeightSpec& spec, double theta_max) {
  P1ConditionReport r;
  r.lhs = std::accumulate(spec.b.begin(), spec.b.end(), 0.0);
  r.rhs = std::sqrt(spec.D) / (4.0 * spec.C_T * std::sqrt(rho(theta_max, 1.0)));
  r.satisfied = r.lhs < r.rhs;
  return r;
}

void validate(const GeneratingVector& gv) {
  if (gv.N < 1) fail(ErrorCategory::domain, "N must be positive");
  for (std::uint64_t z : gv.z) {
    const bool in_range = gv.N == 1 ? z == 1 : (z >= 1 && z <= gv.N - 1);
    if (!in_range || std::gcd(z, gv.N) != 1) {
      fail(ErrorCategory::domain, "generating vector entry " + std::to_string(z) +
                                      " is not admissible for N = " + std::to_string(gv.N));
    }
  }
}

std::vector<double> lattice_points(const GeneratingVector& gv, std::span<const double> shift) {
  const std::size_t m = gv.dimension();
  if (shift.size() != m) fail(ErrorCategory::dimension, "shift length differs from dimension");
  const double inv_n = 1.0 / static_cast<double>(gv.N);
  std::vector<double> out(gv.N * m);
  std::vector<std::uint64_t> idx(m, 0);
  for (std::uint64_t j = 1; j <= gv.N; ++j) {
    double* row = out.data() + (j - 1) * m;
    for (std::size_t k = 0; k < m; ++k) {
      idx[k] += gv.z[k] % gv.N;
      if (idx[k] >= gv.N) idx[k] -= gv.N;
      double v = static_cast<double>(idx[k]) * inv_n + shift[k];
      v -= std::floor(v);
      row[k] = v < 1.0 ? v : 0.0;
    }
  }
  return out;
}

ShiftSet random_shifts(std::size_t R, std::size_t m, std::uint64_t seed) {
  if (R < 1) fail(ErrorCategory::domain, "R must be at least 1");
  ShiftSet s;
  s.count = R;
  s.dimension = m;
  s.seed = seed;
  s.rng_id = kRngId;
  s.shifts.resize(R * m);
  for (std::size_t i = 0; i < R * m; ++i) s.shifts[i] = uniform_closed_open(seed, RandomStream::shifts, i);
  return s;
}

void mc_point(std::uint64_t seed, std::size_t sample, std::span<double> out) {
  const std::size_t m = out.size();
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = inv_Phi(uniform_open(seed, RandomStream::monte_carlo, sample * m + k));
  }
}

std::vector<double> mc_points(std::size_t Nmc, std::size_t m, std::uint64_t seed) {
  if (Nmc < 1) fail(ErrorCategory::domain, "Nmc must be at least 1");
  std::vector<double> out(Nmc * m);
  for (std::size_t i = 0; i < Nmc; ++i) mc_point(seed, i, {out.data() + i * m, m});
  return out;
}

namespace {

std::size_t effective_cap(std::size_t m, std::size_t order_cap, const WeightSpec& spec) {
  std::size_t cap = order_cap == 0 ? std::min<std::size_t>(m, 35) : std::min(order_cap, m);
  if (cap >= spec.log_gamma_order.size()) fail(ErrorCategory::dimension, "order cap beyond tabulated Gamma");
  return cap;
}

void check_table(const std::vector<double>& t, std::uint64_t N) {
  if (t.size() != N) fail(ErrorCategory::dimension, "kernel table has wrong length");
  for (double v : t) {
    if (!std::isfinite(v)) fail(ErrorCategory::numeric, "kernel table contains non-finite values");
  }
}

// State of the POD order recursion: U[l][k] = sum over |u| = l of prod_{j in u}
// gamma_j K_j(k z_j / N) for the coordinates fixed so far.
class OrderRecursion {
 public:
  OrderRecursion(std::size_t cap, std::uint64_t N, const WeightSpec& spec)
      : cap_(cap), n_(N), u_((cap + 1) * N, 0.0), gamma_(cap + 1) {
    std::fill_n(u_.begin(), N, 1.0);
    for (std::size_t l = 0; l <= cap; ++l) gamma_[l] = spec.Gamma(l);
  }

  // V(k) = sum_{l=1}^{min(s+1, cap)} Gamma_l U_{l-1}(k) for the next coordinate s.
  std::vector<double> candidate_weights(std::size_t s) const {
    std::vector<double> v(n_, 0.0);
    const std::size_t top = std::min(s + 1, cap_);
    for (std::size_t l = 1; l <= top; ++l) {
      const double* ul = u_.data() + (l - 1) * n_;
      for (std::uint64_t k = 0; k < n_; ++k) v[k] += gamma_[l] * ul[k];
    }
    return v;
  }

  void absorb(std::size_t s, double gamma_s, const std::vector<double>& table, std::uint64_t z) {
    const std::size_t top = std::min(s + 1, cap_);
    std::vector<double> kz(n_);
    std::uint64_t idx = 0;
    for (std::uint64_t k = 0; k < n_; ++k) {
      kz[k] = gamma_s * table[idx];
      idx += z;
      if (idx >= n_) idx -= n_;
    }
    for (std::size_t l = top; l >= 1; --l) {
      double* ul = u_.data() + l * n_;
      const double* prev = u_.data() + (l - 1) * n_;
      for (std::uint64_t k = 0; k < n_; ++k) ul[k] += kz[k] * prev[k];
    }
  }

  double squared_error(std::size_t s) const {
    const std::size_t top = std::min(s + 1, cap_);
    double total = 0.0;
    for (std::size_t l = 1; l <= top; ++l) {
      const double* ul = u_.data() + l * n_;
      double acc = 0.0;
      for (std::uint64_t k = 0; k < n_; ++k) acc += ul[k];
      total += gamma_[l] * acc;
    }
    return total / static_cast<double>(n_);
  }

 private:
  std::size_t cap_;
  std::uint64_t n_;
  std::vector<double> u_;
  std::vector<double> gamma_;
};

double score(const std::vector<double>& table, const std::vector<double>& v, std::uint64_t z,
             std::uint64_t N) {
  double acc = 0.0;
  std::uint64_t idx = 0;
  for (std::uint64_t k = 0; k < N; ++k) {
    acc += table[idx] * v[k];
    idx += z;
    if (idx >= N) idx -= N;
  }
  return acc;
}

}  // namespace

CbcResult cbc_construct(std::size_t m, std::uint64_t N, const WeightSpec& spec,
                        const KernelProvider& kernel, std::size_t order_cap) {
  if (N < 2) fail(ErrorCategory::domain, "CBC needs N >= 2");
  if (spec.dimension() < m) fail(ErrorCategory::dimension, "weight spec has fewer dimensions than m");
  const std::size_t cap = effective_cap(m, order_cap, spec);
  CbcResult res;
  res.gv.N = N;
  OrderRecursion rec(cap, N, spec);
  for (std::size_t s = 0; s < m; ++s) {
    const auto table = kernel.table(s, N);
    check_table(table, N);
    std::uint64_t best = 1;
    if (s > 0) {
      const auto v = rec.candidate_weights(s);
      double best_score = std::numeric_limits<double>::infinity();
      // K is symmetric, so z and N - z score identically; the smaller wins ties.
      for (std::uint64_t z = 1; z <= N / 2; ++z) {
        if (std::gcd(z, N) != 1) continue;
        const double sc = score(table, v, z, N);
        if (sc < best_score) {
          best_score = sc;
          best = z;
        }
      }
    }
    res.gv.z.push_back(best);
    rec.absorb(s, spec.gamma_dim[s], table, best);
    res.squared_error.push_back(rec.squared_error(s));
  }
  return res;
}

double cbc_criterion(const GeneratingVector& gv, const WeightSpec& spec, const KernelProvider& kernel,
                     std::size_t order_cap) {
  validate(gv);
  const std::size_t m = gv.dimension();
  if (spec.dimension() < m) fail(ErrorCategory::dimension, "weight spec has fewer dimensions than m");
  if (m == 0) return 0.0;
  const std::size_t cap = effective_cap(m, order_cap, spec);
  OrderRecursion rec(cap, gv.N, spec);
  for (std::size_t s = 0; s < m; ++s) {
    const auto table = kernel.table(s, gv.N);
    check_table(table, gv.N);
    rec.absorb(s, spec.gamma_dim[s], table, gv.z[s] % gv.N);
  }
  return rec.squared_error(m - 1);
}

std::string format_generating_vector(const GeneratingVector& gv) {
  std::ostringstream os;
  os << "N " << gv.N << '\n';
  for (std::uint64_t z : gv.z) os << z << '\n';
  return os.str();
}

GeneratingVector parse_generating_vector(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  GeneratingVector gv;
  if (!(is >> tag >> gv.N) || tag != "N") {
    fail(ErrorCategory::io, "generating-vector file must start with \"N <value>\"");
  }
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    unsigned long long z = 0;
    try {
      z = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.front() == '-') {
      fail(ErrorCategory::io, "malformed generating-vector entry '" + tok + "'");
    }
    gv.z.push_back(z);
  }
  validate(gv);
  return gv;
}

GeneratingVector read_generating_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open generating-vector file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_generating_vector(buf.str());
}

void write_generating_vector(const GeneratingVector& gv, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::io, "cannot write generating-vector file " + path.string());
  out << format_generating_vector(gv);
  if (!out) fail(ErrorCategory::io, "write failed for " + path.string());
}

}  // namespace qmcts
