#include "qmcts/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "qmcts/error.hpp"
#include "qmcts/kernels.hpp"
#include "qmcts/normal.hpp"
#include "qmcts/random.hpp"
#include "qmcts/summation.hpp"

namespace qmcts {

namespace {

constexpr std::size_t kChunk = 256;

// Runs task(state, i) for every i with one state per worker thread.
template <class MakeState, class Task>
void run_pool(std::size_t count, MakeState make_state, Task task) {
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    auto state = make_state();
    for (std::size_t i = 0; i < count; ++i) task(*state, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mutex;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto body = [&] {
    try {
      auto state = make_state();
      while (!stop.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          task(*state, i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          // Keep the lowest failing index so the reported error is reproducible.
          if (i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
          stop.store(true);
        }
      }
    } catch (...) {
      std::lock_guard lock(err_mutex);
      if (!err) err = std::current_exception();
      stop.store(true);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string format_xi(std::span<const double> xi) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < xi.size(); ++i) os << (i ? ", " : "") << xi[i];
  os << ')';
  return os.str();
}

void check_finite(std::span<const double> S, std::span<const double> J, std::size_t k, std::size_t j,
                  std::span<const double> xi) {
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (!std::isfinite(S[i]) || !std::isfinite(J[i])) {
      fail(ErrorCategory::numeric, "non-finite observable at shift " + std::to_string(k) + ", point " +
                                       std::to_string(j) + ", xi = " + format_xi(xi));
    }
  }
}

// Partial result of one chunk of samples: a pivot sample and the compensated
// sum of deviations from it (equal weights), or the weighted sum (pivot zero).
struct ChunkSum {
  std::size_t count = 0;
  std::vector<double> pivot_S, pivot_J;
  std::vector<double> dev_S, dev_J;
};

struct Worker {
  SampleSolver solver;
  std::vector<double> xi, S, J;
  Worker(const Problem& p, std::size_t m) : solver(p), xi(m), S(p.grid.size()), J(p.grid.size()) {}
};

// Equal-weight groups: group g holds samples 0..per_group-1, parameters from
// fill(g, j, xi). Result rows are group means.
template <class Fill>
FieldEstimate grouped_fields(const Problem& problem, std::size_t groups, std::size_t per_group, Fill fill) {
  const std::size_t M = problem.grid.size();
  const std::size_t m = problem.potential.dimension();
  const std::size_t chunks = (per_group + kChunk - 1) / kChunk;
  std::vector<ChunkSum> parts(groups * chunks);
  run_pool(
      groups * chunks, [&] { return std::make_unique<Worker>(problem, m); },
      [&](Worker& w, std::size_t task) {
        const std::size_t g = task / chunks;
        const std::size_t c = task % chunks;
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(per_group, begin + kChunk);
        ChunkSum part;
        part.count = end - begin;
        std::vector<CompensatedSum> acc_S(M), acc_J(M);
        for (std::size_t j = begin; j < end; ++j) {
          fill(g, j, std::span<double>(w.xi));
          w.solver.solve(w.xi, w.S, w.J);
          check_finite(w.S, w.J, g, j, w.xi);
          if (j == begin) {
            part.pivot_S = w.S;
            part.pivot_J = w.J;
            continue;
          }
          for (std::size_t i = 0; i < M; ++i) {
            acc_S[i].add(w.S[i] - part.pivot_S[i]);
            acc_J[i].add(w.J[i] - part.pivot_J[i]);
          }
        }
        part.dev_S.resize(M);
        part.dev_J.resize(M);
        for (std::size_t i = 0; i < M; ++i) {
          part.dev_S[i] = acc_S[i].value();
          part.dev_J[i] = acc_J[i].value();
        }
        parts[task] = std::move(part);
      });

  FieldEstimate est;
  est.grid = problem.grid;
  est.R = groups;
  est.N = per_group;
  est.S.resize(groups * M);
  est.J.resize(groups * M);
  const double n = static_cast<double>(per_group);
  for (std::size_t g = 0; g < groups; ++g) {
    const ChunkSum& first = parts[g * chunks];
    for (std::size_t i = 0; i < M; ++i) {
      CompensatedSum s, q;
      for (std::size_t c = 0; c < chunks; ++c) {
        const ChunkSum& part = parts[g * chunks + c];
        const double cnt = static_cast<double>(part.count);
        s.add(cnt * (part.pivot_S[i] - first.pivot_S[i]) + part.dev_S[i]);
        q.add(cnt * (part.pivot_J[i] - first.pivot_J[i]) + part.dev_J[i]);
      }
      est.S[g * M + i] = first.pivot_S[i] + s.value() / n;
      est.J[g * M + i] = first.pivot_J[i] + q.value() / n;
    }
  }
  est.mean_S.resize(M);
  est.mean_J.resize(M);
  std::vector<double> column(groups);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t g = 0; g < groups; ++g) column[g] = est.S[g * M + i];
    est.mean_S[i] = stable_mean(column);
    for (std::size_t g = 0; g < groups; ++g) column[g] = est.J[g * M + i];
    est.mean_J[i] = stable_mean(column);
  }
  return est;
}

// a * b mod n without overflow for any 64-bit n.
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  if (a == 0 || b <= UINT64_MAX / a) return (a * b) % n;
  std::uint64_t r = 0;
  while (b > 0) {
    if (b & 1u) r = (r >= n - a) ? r - (n - a) : r + a;
    a = (a >= n - a) ? a - (n - a) : a + a;
    b >>= 1;
  }
  return r;
}

struct CbcKey {
  std::size_t m;
  std::uint64_t N;
  double alpha, offset, p, delta, T;
  std::size_t cap;
  auto tie() const { return std::tie(m, N, alpha, offset, p, delta, T, cap); }
  bool operator<(const CbcKey& o) const { return tie() < o.tie(); }
};

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("QMCTS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  struct Nothing {};
  run_pool(count, [] { return std::make_unique<Nothing>(); }, [&](Nothing&, std::size_t i) { task(i); });
}

SampleSolver::SampleSolver(const Problem& problem)
    : problem_(problem),
      potential_(problem.potential, problem.grid),
      propagator_(problem.grid, problem.scheme, problem.tau),
      v_(problem.grid.size()),
      psi_(problem.grid.size()) {}

void SampleSolver::solve(std::span<const double> xi, std::span<double> S, std::span<double> J) {
  potential_.evaluate(xi, v_);
  propagator_.set_potential(v_);
  const auto init = problem_.initial.values();
  std::copy(init.begin(), init.end(), psi_.begin());
  propagator_.advance(psi_, problem_.nsteps);
  position_density_into(psi_, S);
  current_density_into(psi_, J);
}

std::span<const double> FieldEstimate::per_shift(ObservableKind kind, std::size_t k) const {
  const auto& v = kind == ObservableKind::position_density ? S : J;
  return {v.data() + k * grid.size(), grid.size()};
}

ObservableField FieldEstimate::mean(ObservableKind kind) const {
  return {grid, kind == ObservableKind::position_density ? mean_S : mean_J, kind};
}

std::vector<double> FieldEstimate::point_values(ObservableKind kind, double x0) const {
  const std::size_t node = nearest_node(grid, x0);
  std::vector<double> out(R);
  for (std::size_t k = 0; k < R; ++k) out[k] = per_shift(kind, k)[node];
  return out;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) fail(ErrorCategory::domain, "mean of an empty sequence");
  CompensatedSum acc;
  for (double v : values) acc.add(v - values[0]);
  return values[0] + acc.value() / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
  if (values.size() < 2) fail(ErrorCategory::domain, "standard error needs at least two values");
  const double mean = stable_mean(values);
  CompensatedSum acc;
  for (double v : values) acc.add((v - mean) * (v - mean));
  const double R = static_cast<double>(values.size());
  return std::sqrt(acc.value() / (R * (R - 1.0)));
}

GeneratingVector generating_vector_for(const ExperimentConfig& cfg) {
  if (cfg.generator.starts_with("file:")) {
    GeneratingVector gv = read_generating_vector(cfg.generator.substr(5));
    if (gv.N != cfg.N) {
      fail(ErrorCategory::config, "generating vector file has N = " + std::to_string(gv.N) +
                                      " but the configuration asks for N = " + std::to_string(cfg.N));
    }
    if (gv.dimension() < cfg.m) fail(ErrorCategory::dimension, "generating vector file has too few components");
    gv.z.resize(cfg.m);
    return gv;
  }
  if (cfg.N == 1) return {std::vector<std::uint64_t>(cfg.m, 1), 1};
  if (cfg.m == 0) return {{}, cfg.N};

  const KLPotential pot = make_potential(cfg);
  const DecayReport decay = decay_sequences(pot);
  const double p = effective_p(cfg, decay);
  const CbcKey key{cfg.m, cfg.N, cfg.alpha, cfg.offset, p, cfg.delta, cfg.T, cfg.order_cap};
  static std::mutex cache_mutex;
  static std::map<CbcKey, GeneratingVector> cache;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const WeightSpec spec = build_weight_spec(decay.b, p, cfg.delta, cfg.T);
  const GaussianWeightKernel kernel(spec.theta);
  GeneratingVector gv = cbc_construct(cfg.m, cfg.N, spec, kernel, cfg.order_cap).gv;
  std::lock_guard lock(cache_mutex);
  cache.emplace(key, gv);
  return gv;
}

void qmc_parameter(const GeneratingVector& gv, std::span<const double> shift, std::size_t j,
                   std::span<double> xi) {
  const double inv_n = 1.0 / static_cast<double>(gv.N);
  const std::uint64_t point = (j + 1) % gv.N;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const std::uint64_t idx = mul_mod(point, gv.z[k] % gv.N, gv.N);
    double u = static_cast<double>(idx) * inv_n + shift[k];
    u -= std::floor(u);
    if (!(u < 1.0)) u = 0.0;
    clamp_unit(u);
    xi[k] = inv_Phi(u);
  }
}

FieldEstimate qmc_fields(const Problem& problem, const GeneratingVector& gv, const ShiftSet& shifts) {
  validate(gv);
  const std::size_t m = problem.potential.dimension();
  if (gv.dimension() != m || shifts.dimension != m) {
    fail(ErrorCategory::dimension, "generating vector or shifts do not match the potential dimension");
  }
  return grouped_fields(problem, shifts.count, gv.N, [&](std::size_t k, std::size_t j, std::span<double> xi) {
    qmc_parameter(gv, shifts.shift(k), j, xi);
  });
}

FieldEstimate mc_fields(const Problem& problem, std::size_t batches, std::size_t per_batch,
                        std::uint64_t seed) {
  if (batches < 1 || per_batch < 1) fail(ErrorCategory::domain, "MC needs at least one sample per batch");
  return grouped_fields(problem, batches, per_batch, [&](std::size_t k, std::size_t j, std::span<double> xi) {
    mc_point(seed, k * per_batch + j, xi);
  });
}

FieldEstimate quadrature_fields(const Problem& problem, const WeightedNodes& nodes) {
  const std::size_t M = problem.grid.size();
  const std::size_t m = nodes.dimension;
  if (m != problem.potential.dimension()) fail(ErrorCategory::dimension, "quadrature nodes do not match m");
  if (nodes.xi.size() != nodes.count() * m) fail(ErrorCategory::dimension, "quadrature node array size");
  const std::size_t count = nodes.count();
  if (count == 0) fail(ErrorCategory::domain, "empty quadrature rule");
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<ChunkSum> parts(chunks);
  run_pool(
      chunks, [&] { return std::make_unique<Worker>(problem, m); },
      [&](Worker& w, std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(count, begin + kChunk);
        std::vector<CompensatedSum> acc_S(M), acc_J(M);
        for (std::size_t i = begin; i < end; ++i) {
          std::copy_n(nodes.xi.begin() + static_cast<std::ptrdiff_t>(i * m), m, w.xi.begin());
          w.solver.solve(w.xi, w.S, w.J);
          check_finite(w.S, w.J, 0, i, w.xi);
          const double wt = nodes.weights[i];
          for (std::size_t x = 0; x < M; ++x) {
            acc_S[x].add(wt * w.S[x]);
            acc_J[x].add(wt * w.J[x]);
          }
        }
        ChunkSum part;
        part.count = end - begin;
        part.dev_S.resize(M);
        part.dev_J.resize(M);
        for (std::size_t x = 0; x < M; ++x) {
          part.dev_S[x] = acc_S[x].value();
          part.dev_J[x] = acc_J[x].value();
        }
        parts[c] = std::move(part);
      });
  FieldEstimate est;
  est.grid = problem.grid;
  est.R = 1;
  est.N = count;
  est.S.assign(M, 0.0);
  est.J.assign(M, 0.0);
  for (std::size_t x = 0; x < M; ++x) {
    CompensatedSum s, q;
    for (const auto& part : parts) {
      s.add(part.dev_S[x]);
      q.add(part.dev_J[x]);
    }
    est.S[x] = s.value();
    est.J[x] = q.value();
  }
  est.mean_S = est.S;
  est.mean_J = est.J;
  return est;
}

EstimatorResult summarize(const ExperimentConfig& cfg, FieldEstimate fields) {
  EstimatorResult r;
  r.kind = parse_kind(cfg.observable);
  r.x0 = cfg.x0;
  r.per_shift = fields.point_values(r.kind, cfg.x0);
  r.mean = stable_mean(r.per_shift);
  r.std_error = r.per_shift.size() >= 2 ? standard_error(r.per_shift) : 0.0;
  r.fields = std::move(fields);
  r.config_hash = config_hash(cfg);
  return r;
}

EstimatorResult qmc_estimate(const ExperimentConfig& cfg, const GeneratingVector& gv) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = make_problem(cfg);
  const ShiftSet shifts = random_shifts(cfg.R, cfg.m, cfg.seed);
  EstimatorResult r = summarize(cfg, qmc_fields(problem, gv, shifts));
  r.generating_vector = gv;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

EstimatorResult qmc_estimate(const ExperimentConfig& cfg) {
  cfg.validate();
  return qmc_estimate(cfg, generating_vector_for(cfg));
}

EstimatorResult mc_estimate(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = make_problem(cfg);
  EstimatorResult r = summarize(cfg, mc_fields(problem, cfg.R, cfg.N, cfg.seed));
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

EstimatorResult estimate(const ExperimentConfig& cfg) {
  return cfg.sampler == "mc" ? mc_estimate(cfg) : qmc_estimate(cfg);
}

}  // namespace qmcts
