#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "cptshape/shaping.hpp"

namespace cpt {

enum class SolverChoice { Direct, Adiabatic, Both };

std::string_view solver_choice_name(SolverChoice s);

/// Fully explicit run description (the alternative to a named scenario).
struct ExplicitSetup
{
    EnvelopeSpec probe;
    EnvelopeSpec coupling;
    MediumSpec medium;
    TauGrid tau_grid;
    ZetaGrid zeta_grid;
    SolverConfig solver;

    bool operator==(const ExplicitSetup&) const = default;
};

/*
 * Run configuration, schema version 1 (JSON):
 *
 *   {
 *     "version": 1,
 *     "scenario": "fig2_gaussians",         -- or "explicit": {...}
 *     "output_dir": "out",
 *     "emit_plots": false,
 *     "solver": "direct" | "adiabatic" | "both",
 *     "design": {"target": <envelope>, "baseline_v": <envelope>,
 *                "depth": 600}              -- optional
 *   }
 *
 * "explicit" holds "probe", "coupling" (envelopes), "medium"
 * {"kappa_p", "kappa_c"}, "tau_grid" {"tau_min", "tau_max", "n_tau"},
 * "zeta_grid" {"zeta_max", "n_zeta", "snapshot_stride"} and
 * "solver_config" {"atom_substeps", "unitarity_tol", "max_field"}.
 * Envelopes are objects tagged by "type": gaussian, supergaussian,
 * linear_ramp, tanh_step, tabulated, sum. Unknown keys are rejected.
 */
struct RunConfig
{
    int version = 1;
    std::optional<std::string> scenario;
    std::optional<ExplicitSetup> explicit_setup;
    std::string output_dir = "out";
    bool emit_plots = false;
    SolverChoice solver = SolverChoice::Direct;
    std::optional<DesignTarget> design;

    bool operator==(const RunConfig&) const = default;
};

/// Throws ParseError (with line and column) or ValidationError (with the
/// offending key path).
RunConfig parse_config(std::string_view text);

/// Normal form: every field written out explicitly.
nlohmann::json to_json(const RunConfig& config);
std::string serialize_config(const RunConfig& config);

nlohmann::json envelope_to_json(const EnvelopeSpec& spec);
EnvelopeSpec envelope_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json medium_to_json(const MediumSpec& m);
nlohmann::json tau_grid_to_json(const TauGrid& g);
nlohmann::json zeta_grid_to_json(const ZetaGrid& g);
nlohmann::json solver_config_to_json(const SolverConfig& c);
MediumSpec medium_from_json(const nlohmann::json& j, const std::string& path);
TauGrid tau_grid_from_json(const nlohmann::json& j, const std::string& path);
ZetaGrid zeta_grid_from_json(const nlohmann::json& j, const std::string& path);
SolverConfig solver_config_from_json(const nlohmann::json& j,
                                     const std::string& path);

/// The scenario a configuration runs: the named built-in or the explicit
/// setup (named "explicit"), with the config's design target if any.
Scenario resolve_scenario(const RunConfig& config);

} // namespace cpt
