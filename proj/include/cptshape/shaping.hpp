#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cptshape/adiabatic.hpp"
#include "cptshape/direct_solver.hpp"
#include "cptshape/envelope.hpp"

namespace cpt {

enum class Outcome {
    Depletion,
    Adiabaton,
    SharpenTrailing,
    SharpenLeading,
    Compress,
    FlatTop,
    TwoPeak,
};

std::string_view outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

/// Inverse-design request: probe shape wanted at depth `depth` for a
/// prescribed photon-flux profile V(tau).
struct DesignTarget
{
    EnvelopeSpec target;
    EnvelopeSpec baseline_v;
    double depth = 0.0;

    bool operator==(const DesignTarget&) const = default;
};

struct Scenario
{
    std::string name;
    std::string description;
    EnvelopeSpec probe;
    EnvelopeSpec coupling;
    MediumSpec medium;
    TauGrid tau_grid;
    ZetaGrid zeta_grid;
    SolverConfig solver;
    Outcome expected = Outcome::Depletion;
    std::optional<DesignTarget> design;
};

std::vector<Scenario> builtin_scenarios();

/// Throws UnknownScenario.
Scenario find_scenario(std::string_view name);

/*
 * Mixing angle whose adiabatic probe amplitude
 * sqrt(kappa_p kappa_c V / K(theta)) sin(theta) equals gp_target.
 * sin^2/K is strictly increasing on [0, pi/2], so bisection converges to
 * the unique root. Throws Infeasible when gp_target^2 >= kappa_p V.
 */
double theta_from_probe(double gp_target, double v, const MediumSpec& medium);

/// Adiabatic probe amplitude for a given mixing angle (inverse of the above).
double probe_from_theta(double theta, double v, const MediumSpec& medium);

struct DesignResult
{
    EnvelopeSpec probe_in;     // tabulated on the design grid
    EnvelopeSpec coupling_in;  // tabulated on the design grid
    FieldState input;
    std::vector<double> theta_in;
    FieldState predicted_output;  // adiabatic reconstruction at the depth
    double feasibility_margin = 0.0;
    std::optional<ShockInfo> shock;
};

/*
 * Entry envelopes that transport into `target` at depth `depth` for the
 * photon-flux profile `baseline_v`. Every output point is traced back
 * along its characteristic (theta is constant along it, so its slope is
 * known from the target), the entry angles are interpolated onto the grid
 * with theta = 0 where no characteristic lands, and the envelopes follow
 * from theta and V. Throws Infeasible, CrossedCharacteristics or
 * WindowExceeded.
 */
DesignResult design_coupling(const EnvelopeSpec& target,
                             const EnvelopeSpec& baseline_v,
                             const MediumSpec& medium, double depth,
                             const TauGrid& grid);

struct CompressionReport
{
    double fwhm_in = 0.0;
    double fwhm_out = 0.0;
    double compression_factor = 1.0;
    double energy_ratio = 1.0;
};

/// Probe FWHM and energy at the first vs last snapshot.
CompressionReport compression_report(const SimulationResult& result);

/*
 * Lag, in grid spacings, of the peak of the cross-correlation between the
 * probe intensity and the coupling deficit kappa_c V_entry - |g_c|^2.
 * Zero when the probe and the coupling dip it carves travel together.
 */
long copropagation_lag(const FieldState& fields,
                       const std::vector<double>& v_entry,
                       const MediumSpec& medium);

} // namespace cpt
