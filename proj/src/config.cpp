#include "qmcts/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "qmcts/error.hpp"

namespace qmcts {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  fail(ErrorCategory::config, "invalid value '" + value + "' for key '" + key + "'");
}

double plain_number(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || t.empty()) {
    fail(ErrorCategory::config, "cannot parse number '" + text + "'");
  }
  return v;
}

// Factor: number | pi | number*pi | number pi | a^b
double factor(std::string t) {
  t = trim(t);
  if (t.empty()) fail(ErrorCategory::config, "empty numeric expression");
  double sign = 1.0;
  while (!t.empty() && (t.front() == '-' || t.front() == '+')) {
    if (t.front() == '-') sign = -sign;
    t = trim(t.substr(1));
  }
  if (const auto star = t.find('*'); star != std::string::npos) {
    return sign * factor(t.substr(0, star)) * factor(t.substr(star + 1));
  }
  if (const auto caret = t.find('^'); caret != std::string::npos) {
    return sign * std::pow(factor(t.substr(0, caret)), factor(t.substr(caret + 1)));
  }
  if (t == "pi") return sign * std::numbers::pi;
  if (t.size() > 2 && t.ends_with("pi")) return sign * plain_number(t.substr(0, t.size() - 2)) * std::numbers::pi;
  return sign * plain_number(t);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  // Integers may be written as powers of two, e.g. 2^12.
  if (t.find('^') != std::string::npos) {
    const double v = factor(t);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) bad_value(key, value);
    return static_cast<std::size_t>(v);
  }
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) bad_value(key, value);
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct KeyHandler {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
KeyHandler real_key(T ExperimentConfig::*field) {
  return {[field](ExperimentConfig& c, const std::string& v) { c.*field = parse_real_expression(v); },
          [field](const ExperimentConfig& c) { return format_real(c.*field); }};
}

KeyHandler count_key(const std::string& name, std::size_t ExperimentConfig::*field) {
  return {[field, name](ExperimentConfig& c, const std::string& v) { c.*field = parse_count(name, v); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

KeyHandler string_key(std::string ExperimentConfig::*field) {
  return {[field](ExperimentConfig& c, const std::string& v) { c.*field = trim(v); },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

const std::map<std::string, KeyHandler>& handlers() {
  static const std::map<std::string, KeyHandler> h = [] {
    std::map<std::string, KeyHandler> t;
    t["family"] = string_key(&ExperimentConfig::family);
    t["alpha"] = real_key(&ExperimentConfig::alpha);
    t["m"] = count_key("m", &ExperimentConfig::m);
    t["offset"] = real_key(&ExperimentConfig::offset);
    t["M"] = count_key("M", &ExperimentConfig::M);
    t["scheme"] = string_key(&ExperimentConfig::scheme);
    t["tau"] = real_key(&ExperimentConfig::tau);
    t["T"] = real_key(&ExperimentConfig::T);
    t["initial"] = string_key(&ExperimentConfig::initial);
    t["sampler"] = string_key(&ExperimentConfig::sampler);
    t["N"] = count_key("N", &ExperimentConfig::N);
    t["R"] = count_key("R", &ExperimentConfig::R);
    t["seed"] = {[](ExperimentConfig& c, const std::string& v) { c.seed = parse_count("seed", v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
    t["generator"] = string_key(&ExperimentConfig::generator);
    t["p"] = {[](ExperimentConfig& c, const std::string& v) {
                const std::string s = trim(v);
                if (s == "auto" || s.empty()) c.p.reset();
                else c.p = parse_real_expression(s);
              },
              [](const ExperimentConfig& c) { return c.p ? format_real(*c.p) : std::string("auto"); }};
    t["delta"] = real_key(&ExperimentConfig::delta);
    t["order_cap"] = count_key("order_cap", &ExperimentConfig::order_cap);
    t["observable"] = string_key(&ExperimentConfig::observable);
    t["functional"] = string_key(&ExperimentConfig::functional);
    t["x0"] = real_key(&ExperimentConfig::x0);
    t["ref_tau"] = real_key(&ExperimentConfig::ref_tau);
    t["ref_M"] = count_key("ref_M", &ExperimentConfig::ref_M);
    t["ref_nodes"] = count_key("ref_nodes", &ExperimentConfig::ref_nodes);
    t["ref_prune"] = real_key(&ExperimentConfig::ref_prune);
    t["n_ladder"] = {[](ExperimentConfig& c, const std::string& v) {
                       c.n_ladder.clear();
                       for (const auto& item : split_list(v)) c.n_ladder.push_back(parse_count("n_ladder", item));
                     },
                     [](const ExperimentConfig& c) {
                       std::string s;
                       for (std::size_t i = 0; i < c.n_ladder.size(); ++i) {
                         s += (i ? "," : "") + std::to_string(c.n_ladder[i]);
                       }
                       return s;
                     }};
    t["tau_ladder"] = {[](ExperimentConfig& c, const std::string& v) {
                         c.tau_ladder.clear();
                         for (const auto& item : split_list(v)) c.tau_ladder.push_back(parse_real_expression(item));
                       },
                       [](const ExperimentConfig& c) {
                         std::string s;
                         for (std::size_t i = 0; i < c.tau_ladder.size(); ++i) {
                           s += (i ? "," : "") + format_real(c.tau_ladder[i]);
                         }
                         return s;
                       }};
    t["fit_window"] = count_key("fit_window", &ExperimentConfig::fit_window);
    t["study_mode"] = string_key(&ExperimentConfig::study_mode);
    t["output"] = string_key(&ExperimentConfig::output);
    return t;
  }();
  return h;
}

}  // namespace

double parse_real_expression(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  double v = 0.0;
  if (slash == std::string::npos) {
    v = factor(t);
  } else {
    const double den = factor(t.substr(slash + 1));
    if (den == 0.0) fail(ErrorCategory::config, "division by zero in '" + text + "'");
    v = factor(t.substr(0, slash)) / den;
  }
  if (!std::isfinite(v)) fail(ErrorCategory::config, "non-finite value '" + text + "'");
  return v;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "family",    "alpha",      "m",         "offset",   "M",          "scheme",   "tau",
      "T",         "initial",    "sampler",   "N",        "R",          "seed",     "generator",
      "p",         "delta",      "order_cap", "observable", "functional", "x0",     "ref_tau",
      "ref_M",     "ref_nodes",  "ref_prune", "n_ladder", "tau_ladder", "fit_window", "study_mode",
      "output"};
  return keys;
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = handlers().find(key);
  if (it == handlers().end()) fail(ErrorCategory::config, "unknown configuration key '" + key + "'");
  try {
    it->second.set(cfg, value);
  } catch (const Error& e) {
    fail(ErrorCategory::config, "key '" + key + "': " + e.what());
  }
}

std::string get_key(const ExperimentConfig& cfg, const std::string& key) {
  const auto it = handlers().find(key);
  if (it == handlers().end()) fail(ErrorCategory::config, "unknown configuration key '" + key + "'");
  return it->second.get(cfg);
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::config, "line " + std::to_string(lineno) + ": expected key = value");
    }
    set_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += k + " = " + get_key(cfg, k) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::string text;
  // The output location does not affect results.
  for (const auto& k : config_keys()) {
    if (k != "output") text += k + " = " + get_key(cfg, k) + "\n";
  }
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t ExperimentConfig::nsteps() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCategory::config, "tau must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) fail(ErrorCategory::config, "T must be nonnegative");
  const double n = std::round(T / tau);
  if (std::abs(T - tau * n) > 1e-12 * std::max(1.0, T)) {
    fail(ErrorCategory::config, "T / tau is not an integer (T = " + format_real(T) +
                                    ", tau = " + format_real(tau) + ")");
  }
  return static_cast<std::size_t>(n);
}

void ExperimentConfig::validate() const {
  if (family != "cosine") fail(ErrorCategory::config, "unknown potential family '" + family + "'");
  if (!(alpha > 1.0)) fail(ErrorCategory::config, "alpha must exceed 1");
  if (!std::isfinite(offset)) fail(ErrorCategory::config, "offset must be finite");
  if (M < 2 || (M & (M - 1)) != 0) fail(ErrorCategory::config, "M must be a power of two >= 2");
  (void)nsteps();
  if (sampler != "qmc" && sampler != "mc") fail(ErrorCategory::config, "sampler must be qmc or mc");
  if (N < 1) fail(ErrorCategory::config, "N must be at least 1");
  if (R < 1) fail(ErrorCategory::config, "R must be at least 1");
  if (generator != "cbc" && !generator.starts_with("file:")) {
    fail(ErrorCategory::config, "generator must be cbc or file:<path>");
  }
  if (p && !(*p > 0.0 && *p <= 1.0)) fail(ErrorCategory::config, "p must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 0.5)) fail(ErrorCategory::config, "delta must lie in (0, 1/2]");
  (void)parse_kind(observable);
  if (functional != "field" && functional != "point") {
    fail(ErrorCategory::config, "functional must be field or point");
  }
  if (!std::isfinite(x0)) fail(ErrorCategory::config, "x0 must be finite");
  if (!(ref_tau > 0.0)) fail(ErrorCategory::config, "ref_tau must be positive");
  if (ref_M < M || (ref_M & (ref_M - 1)) != 0) {
    fail(ErrorCategory::config, "ref_M must be a power of two >= M");
  }
  if (ref_nodes < 1) fail(ErrorCategory::config, "ref_nodes must be at least 1");
  if (!(ref_prune >= 0.0 && ref_prune < 1.0)) fail(ErrorCategory::config, "ref_prune must lie in [0, 1)");
  if (fit_window < 2) fail(ErrorCategory::config, "fit_window must be at least 2");
  if (study_mode != "l2" && study_mode != "se") fail(ErrorCategory::config, "study_mode must be l2 or se");
  if (initial != "gaussian" && !initial.starts_with("plane:")) {
    fail(ErrorCategory::config, "initial must be gaussian or plane:<k>");
  }
  (void)SplittingScheme::by_name(scheme);
  (void)make_initial(*this);
}

KLPotential make_potential(const ExperimentConfig& cfg) {
  return build_cosine_potential(cfg.alpha, cfg.m, cfg.offset);
}

InitialData make_initial(const ExperimentConfig& cfg) {
  if (cfg.initial == "gaussian") return GaussianPacket{};
  if (cfg.initial.starts_with("plane:")) {
    const std::string k = cfg.initial.substr(6);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), v);
    if (ec != std::errc{} || ptr != k.data() + k.size()) {
      fail(ErrorCategory::config, "malformed plane-wave number '" + k + "'");
    }
    return PlaneWave{v};
  }
  fail(ErrorCategory::config, "unknown initial data '" + cfg.initial + "'");
}

Problem make_problem(const ExperimentConfig& cfg) {
  TorusGrid grid(cfg.M);
  return Problem{make_potential(cfg), grid, SplittingScheme::by_name(cfg.scheme),
                 sample_initial(grid, make_initial(cfg)), cfg.tau, cfg.nsteps()};
}

double effective_p(const ExperimentConfig& cfg, const DecayReport& decay) {
  if (cfg.p) return *cfg.p;
  const auto r = fitted_decay_rate(decay.b);
  if (!r || !(*r > 0.0)) return 1.0;
  return std::min(1.0, 1.05 / *r);
}

}  // namespace qmcts
