#include "qmcts/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmcts/error.hpp"
#include "qmcts/random.hpp"

namespace qmcts {

namespace {

void ensure_parent(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorCategory::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) fail(ErrorCategory::io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string build_version() { return QMCTS_VERSION; }
std::string build_git_describe() { return QMCTS_GIT_DESCRIBE; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) fail(ErrorCategory::io, "table row width differs from header");
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCategory::io, "CSV has no header");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        fail(ErrorCategory::io, "CSV line " + std::to_string(lineno) + ": malformed number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) {
      fail(ErrorCategory::io, "CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                                  " fields, header has " + std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const Table& table, const std::filesystem::path& path) { write_text(to_csv(table), path); }

Table read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const Error& e) {
    fail(ErrorCategory::io, path.string() + ": " + e.what());
  }
}

void write_field_csv(const ObservableField& field, const std::filesystem::path& path) {
  Table t{{"x", "value"}, {}};
  for (std::size_t k = 0; k < field.values.size(); ++k) t.rows.push_back({field.grid.node(k), field.values[k]});
  write_csv(t, path);
}

nlohmann::ordered_json manifest_base(const ExperimentConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["tool"] = "qmcts";
  doc["version"] = build_version();
  doc["git_describe"] = build_git_describe();
  nlohmann::ordered_json config;
  for (const auto& k : config_keys()) {
    if (k != "output") config[k] = get_key(cfg, k);
  }
  doc["config"] = config;
  doc["config_hash"] = config_hash(cfg);
  doc["seed"] = cfg.seed;
  doc["rng"] = kRngId;
  return doc;
}

nlohmann::ordered_json fit_to_json(const RateFit& fit) {
  nlohmann::ordered_json j;
  j["orientation"] = fit.orientation == FitOrientation::samples ? "samples" : "time";
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["window"] = {fit.window_begin, fit.window_end};
  if (fit.expected) j["expected"] = *fit.expected;
  return j;
}

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
  write_text(doc.dump(2) + "\n", path);
}

void write_timing(double seconds, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["wall_time_seconds"] = seconds;
  write_json(j, path);
}

void emit_outputs(const ExperimentConfig& cfg, const EstimatorResult& result, const std::filesystem::path& dir) {
  Table per_shift{{"k", "value"}, {}};
  for (std::size_t k = 0; k < result.per_shift.size(); ++k) {
    per_shift.rows.push_back({static_cast<double>(k + 1), result.per_shift[k]});
  }
  write_csv(per_shift, dir / "estimate.csv");

  const auto& f = result.fields;
  Table field{{"x", "S", "J"}, {}};
  for (std::size_t k = 0; k < f.mean_S.size(); ++k) field.rows.push_back({f.grid.node(k), f.mean_S[k], f.mean_J[k]});
  write_csv(field, dir / "estimate_field.csv");

  auto doc = manifest_base(cfg);
  doc["observable"] = kind_name(result.kind);
  doc["x0"] = result.x0;
  doc["mean"] = result.mean;
  doc["std_error"] = result.std_error;
  doc["per_shift"] = result.per_shift;
  if (result.generating_vector) {
    doc["generating_vector"] = {{"N", result.generating_vector->N}, {"z", result.generating_vector->z}};
  }
  write_json(doc, dir / "estimate.json");
  write_timing(result.wall_time, dir / "estimate.timing.json");
}

void emit_outputs(const ExperimentConfig& cfg, const Study& study, const std::string& name,
                  const std::filesystem::path& dir, double wall_time) {
  write_csv(study.table, dir / (name + ".csv"));
  auto doc = manifest_base(cfg);
  doc["study"] = study.mode;
  if (study.fit_S) doc["fit_S"] = fit_to_json(*study.fit_S);
  if (study.fit_J) doc["fit_J"] = fit_to_json(*study.fit_J);
  if (!study.fit_note.empty()) doc["fit_note"] = study.fit_note;
  if (study.generating_vector) {
    doc["generating_vector"] = {{"N", study.generating_vector->N}, {"z", study.generating_vector->z}};
  }
  write_json(doc, dir / (name + ".json"));
  write_timing(wall_time, dir / (name + ".timing.json"));
}

}  // namespace qmcts
