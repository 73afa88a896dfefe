#include <cmath>
#include <numbers>

#include "qmcts/error.hpp"
#include "qmcts/reference.hpp"
#include "qmcts/summation.hpp"

namespace qmcts {

namespace {

// Orthonormal Hermite polynomials for the weight exp(-x^2): returns p_n(x)
// and sets pm1 = p_{n-1}(x).
double hermite_orthonormal(std::size_t n, double x, double& pm1) {
  double p0 = 1.0 / std::pow(std::numbers::pi, 0.25);
  double prev = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double next = x * std::sqrt(2.0 / jd) * p0 - std::sqrt((jd - 1.0) / jd) * prev;
    prev = p0;
    p0 = next;
  }
  pm1 = prev;
  return p0;
}

}  // namespace

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n < 1) fail(ErrorCategory::domain, "Gauss-Hermite rule needs at least one node");
  const double nd = static_cast<double>(n);
  // Physicists' nodes by Newton iteration from asymptotic starting guesses,
  // then scaled by sqrt(2) for the standard normal.
  std::vector<double> x(n), w(n);
  double z = 0.0;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double pm1 = 0.0;
      const double p = hermite_orthonormal(n, z, pm1);
      dp = std::sqrt(2.0 * nd) * pm1;
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    double pm1 = 0.0;
    hermite_orthonormal(n, z, pm1);
    dp = std::sqrt(2.0 * nd) * pm1;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) total.add(w[i]);
  for (std::size_t i = 0; i < n; ++i) {
    // Ascending order: x was filled from the largest node down.
    rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] / total.value();
  }
  return rule;
}

WeightedNodes tensor_gauss_hermite(std::size_t n, std::size_t m, double prune) {
  const GaussHermiteRule rule = gauss_hermite(n);
  WeightedNodes out;
  out.dimension = m;
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < m; ++k) w *= rule.weights[idx[k]];
    if (w >= prune) {
      for (std::size_t k = 0; k < m; ++k) out.xi.push_back(rule.nodes[idx[k]]);
      out.weights.push_back(w);
    }
    std::size_t k = m;
    while (k > 0) {
      --k;
      if (++idx[k] < n) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (m == 0) return out;
  }
}

}  // namespace qmcts
