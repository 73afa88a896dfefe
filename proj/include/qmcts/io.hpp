#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qmcts/config.hpp"
#include "qmcts/estimator.hpp"
#include "qmcts/observables.hpp"
#include "qmcts/studies.hpp"

namespace qmcts {

/// Version and `git describe` of the build.
std::string build_version();
std::string build_git_describe();

/// Shortest round-trip formatting (%.17g).
std::string format_double(double v);

/// CSV with a header row; values round-trip bit-for-bit through read_csv.
void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);
std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

/// Columns x, value.
void write_field_csv(const ObservableField& field, const std::filesystem::path& path);

/// Everything that determines a run: config (without the output location),
/// its hash, seed, generator id and build identification. Contains no
/// timings, so identical runs produce identical manifests.
nlohmann::ordered_json manifest_base(const ExperimentConfig& cfg);
nlohmann::ordered_json fit_to_json(const RateFit& fit);

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

/// Wall-clock time goes to a separate <stem>.timing.json file.
void write_timing(double seconds, const std::filesystem::path& path);

/// estimate.csv (per-shift values), estimate_field.csv (x, S, J means),
/// estimate.json, estimate.timing.json under `dir`.
void emit_outputs(const ExperimentConfig& cfg, const EstimatorResult& result, const std::filesystem::path& dir);

/// <name>.csv and <name>.json (and timing) under `dir`.
void emit_outputs(const ExperimentConfig& cfg, const Study& study, const std::string& name,
                  const std::filesystem::path& dir, double wall_time);

}  // namespace qmcts
