#include "qmcts/splitting.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qmcts/error.hpp"
#include "qmcts/summation.hpp"

namespace qmcts {

namespace {

constexpr double kFractionSumTolerance = 1e-12;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

SplittingScheme::SplittingScheme(std::string name, std::vector<Stage> stages, int formal_order)
    : name_(std::move(name)), stages_(std::move(stages)), formal_order_(formal_order) {
  if (stages_.empty()) fail(ErrorCategory::config, "splitting scheme has no stages");
  if (formal_order_ < 1) fail(ErrorCategory::config, "formal order must be positive");
  CompensatedSum kinetic, potential;
  for (const auto& s : stages_) {
    if (!std::isfinite(s.fraction)) fail(ErrorCategory::config, "non-finite stage fraction");
    (s.kind == Subflow::kinetic ? kinetic : potential).add(s.fraction);
  }
  if (std::abs(kinetic.value() - 1.0) > kFractionSumTolerance ||
      std::abs(potential.value() - 1.0) > kFractionSumTolerance) {
    std::ostringstream os;
    os << "inconsistent scheme '" << name_ << "': kinetic fractions sum to " << kinetic.value()
       << ", potential fractions sum to " << potential.value();
    fail(ErrorCategory::config, os.str());
  }
}

SplittingScheme SplittingScheme::lie() {
  return {"lie", {{Subflow::potential, 1.0}, {Subflow::kinetic, 1.0}}, 1};
}

SplittingScheme SplittingScheme::strang() {
  return {"strang",
          {{Subflow::kinetic, 0.5}, {Subflow::potential, 1.0}, {Subflow::kinetic, 0.5}},
          2};
}

SplittingScheme SplittingScheme::parse(std::string_view text, std::string default_name) {
  std::vector<Stage> stages;
  int order = 1;
  std::string name = std::move(default_name);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, value, extra;
    ls >> key >> value;
    if (value.empty() || (ls >> extra)) {
      fail(ErrorCategory::config, "scheme line " + std::to_string(lineno) + ": expected '<kind> <value>'");
    }
    try {
      if (key == "kinetic" || key == "potential") {
        std::size_t used = 0;
        const double f = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        stages.push_back({key == "kinetic" ? Subflow::kinetic : Subflow::potential, f});
      } else if (key == "order") {
        order = std::stoi(value);
      } else if (key == "name") {
        name = value;
      } else {
        fail(ErrorCategory::config, "scheme line " + std::to_string(lineno) + ": unknown kind '" + key + "'");
      }
    } catch (const std::logic_error&) {
      fail(ErrorCategory::config, "scheme line " + std::to_string(lineno) + ": bad number '" + value + "'");
    }
  }
  return {name, std::move(stages), order};
}

SplittingScheme SplittingScheme::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open scheme file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), "custom:" + path.string());
}

SplittingScheme SplittingScheme::by_name(std::string_view name) {
  if (name == "lie") return lie();
  if (name == "strang") return strang();
  if (name.starts_with("custom:")) return from_file(std::string(name.substr(7)));
  fail(ErrorCategory::config, "unknown splitting scheme '" + std::string(name) + "'");
}

WaveField step(const WaveField& f, const SplittingScheme& scheme, double tau,
               std::span<const double> potential) {
  if (potential.size() != f.size()) {
    fail(ErrorCategory::dimension, "step: potential and field sizes differ");
  }
  WaveField out = f;
  for (const auto& s : scheme.stages()) {
    out = s.kind == Subflow::kinetic ? kinetic_step(out, s.fraction * tau)
                                     : potential_step(out, potential, s.fraction * tau);
  }
  return out;
}

WaveField propagate(const WaveField& f, const SplittingScheme& scheme, double tau,
                    std::size_t nsteps, std::span<const double> potential) {
  if (nsteps > 0 && !(tau > 0.0)) {
    fail(ErrorCategory::domain, "propagate: time step must be positive");
  }
  if (potential.size() != f.size()) {
    fail(ErrorCategory::dimension, "propagate: potential and field sizes differ");
  }
  if (nsteps == 0) return f;
  Propagator prop(f.grid(), scheme, tau);
  prop.set_potential(potential);
  std::vector<Complex> values(f.values().begin(), f.values().end());
  prop.advance(values, nsteps);
  return WaveField(f.grid(), std::move(values));
}

// Propagator ------------------------------------------------------------------

Propagator::Propagator(const TorusGrid& grid, const SplittingScheme& scheme, double tau)
    : grid_(grid), stages_(scheme.stages().begin(), scheme.stages().end()), tau_(tau) {
  if (!std::isfinite(tau)) fail(ErrorCategory::domain, "time step must be finite");
}

void Propagator::set_potential(std::span<const double> potential) {
  if (potential.size() != grid_.size()) {
    fail(ErrorCategory::dimension, "Propagator: potential has the wrong size");
  }
  for (double v : potential) {
    if (!std::isfinite(v)) fail(ErrorCategory::numeric, "Propagator: non-finite potential");
  }
  potential_.assign(potential.begin(), potential.end());
  potential_cache_.clear();
  has_potential_ = true;
}

const std::vector<Complex>& Propagator::kinetic_multiplier(double fraction) {
  for (const auto& [f, mult] : kinetic_cache_) {
    if (f == fraction) return mult;
  }
  const std::size_t m = grid_.size();
  const double scale = 1.0 / static_cast<double>(m);
  const double t = fraction * tau_;
  std::vector<Complex> mult(m);
  for (std::size_t n = 0; n < m; ++n) {
    const double k = grid_.wavenumber(n);
    mult[n] = std::polar(scale, -0.5 * k * k * t);
  }
  kinetic_cache_.emplace_back(fraction, std::move(mult));
  return kinetic_cache_.back().second;
}

const std::vector<Complex>& Propagator::potential_multiplier(double fraction) {
  for (const auto& [f, mult] : potential_cache_) {
    if (f == fraction) return mult;
  }
  const double t = fraction * tau_;
  std::vector<Complex> mult(potential_.size());
  for (std::size_t k = 0; k < mult.size(); ++k) mult[k] = std::polar(1.0, -t * potential_[k]);
  potential_cache_.emplace_back(fraction, std::move(mult));
  return potential_cache_.back().second;
}

void Propagator::apply_kinetic(std::span<Complex> values, double fraction) {
  auto& ws = thread_workspace(grid_.size());
  auto buf = ws.buffer();
  std::copy(values.begin(), values.end(), buf.begin());
  ws.forward();
  multiply_in_place(buf, kinetic_multiplier(fraction));
  ws.backward();
  std::copy(buf.begin(), buf.end(), values.begin());
}

void Propagator::apply_potential(std::span<Complex> values, double fraction) {
  multiply_in_place(values, potential_multiplier(fraction));
}

void Propagator::advance(std::span<Complex> values, std::size_t nsteps) {
  if (values.size() != grid_.size()) {
    fail(ErrorCategory::dimension, "Propagator: field has the wrong size");
  }
  if (!has_potential_) fail(ErrorCategory::config, "Propagator: potential not set");
  // Pending merged stage; flushed whenever the subflow kind changes.
  Subflow pending_kind = Subflow::kinetic;
  double pending = 0.0;
  bool has_pending = false;
  auto flush = [&] {
    if (!has_pending) return;
    if (pending_kind == Subflow::kinetic) {
      apply_kinetic(values, pending);
    } else {
      apply_potential(values, pending);
    }
    has_pending = false;
    pending = 0.0;
  };
  for (std::size_t n = 0; n < nsteps; ++n) {
    for (const auto& s : stages_) {
      if (has_pending && s.kind != pending_kind) flush();
      pending_kind = s.kind;
      pending += s.fraction;
      has_pending = true;
    }
  }
  flush();
}

}  // namespace qmcts
