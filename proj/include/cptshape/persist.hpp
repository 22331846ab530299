#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "cptshape/diagnostics.hpp"
#include "cptshape/direct_solver.hpp"

namespace cpt {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Writes `content` to a temporary sibling and renames it over `path`.
/// Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/*
 * One snapshot as tab-separated text: a header row, then per tau point
 * tau, re/im g_p, re/im g_c, re/im a1, a2, a3, theta, V, |rho21|, every
 * value with 17 significant digits.
 */
std::string snapshot_table(const Snapshot& snapshot, const TauGrid& grid,
                           const MediumSpec& medium);

nlohmann::json metrics_to_json(const DiagnosticsReport& report);

struct PersistOptions
{
    bool emit_plots = false;
    nlohmann::json config_echo;  // stored in the manifest
    nlohmann::json extra_metrics = nlohmann::json::object();
};

/*
 * Writes snapshot_NNNN.tsv files, metrics.json, manifest.json (config
 * echo, grids, snapshot list, SHA-256 of every file) and run_info.json
 * (wall time; not hashed, so the manifest is reproducible). With
 * emit_plots, gnuplot scripts are written alongside. Returns the manifest path.
 */
std::filesystem::path persist_result(const SimulationResult& result,
                                     const DiagnosticsReport& report,
                                     const std::filesystem::path& directory,
                                     const PersistOptions& options = {});

/// Reads back a directory written by persist_result. Throws IoError or
/// ParseError.
SimulationResult load_result(const std::filesystem::path& directory);

} // namespace cpt
