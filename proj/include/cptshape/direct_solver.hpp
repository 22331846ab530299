#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cptshape/types.hpp"

namespace cpt {

struct SolverConfig
{
    int atom_substeps = 4;        // RK4 sub-steps per tau interval
    double unitarity_tol = 1e-6;  // max | |a|^2 - 1 |
    double max_field = 1e6;       // blow-up guard on |g|

    void validate() const;

    bool operator==(const SolverConfig&) const = default;
};

struct SnapshotDiagnostics
{
    double conservation_residual = 0.0;
    double adiabaticity_max = 0.0;
    double unitarity_residual = 0.0;
};

struct Snapshot
{
    FieldState fields;
    AtomState atoms;
    SnapshotDiagnostics diag;
};

struct RunManifest
{
    std::string solver;  // "direct" or "adiabatic"
    std::string version = CPTSHAPE_VERSION;
    SolverConfig config;
    double wall_time_s = 0.0;
    std::size_t steps_taken = 0;
};

struct SimulationResult
{
    TauGrid tau_grid;
    ZetaGrid zeta_grid;
    MediumSpec medium;
    std::vector<Snapshot> snapshots;
    RunManifest manifest;

    bool valid = true;
    ErrorCode failure = ErrorCode::NonFinite;  // meaningful only if !valid
    std::string failure_message;

    /// Rethrows the recorded failure of a partial run.
    void throw_if_invalid() const;
};

/*
 * Integrates da/dtau = i M(tau) a from a = (1, 0, 0) at tau_min with the
 * Hermitian coupling matrix
 *
 *     M = | 0    0    g_p* |
 *         | 0    0    g_c* |
 *         | g_p  g_c  0    |
 *
 * using classic RK4 with `atom_substeps` steps per grid interval and
 * Catmull-Rom interpolated envelopes. Throws NonUnitary when the norm drifts
 * past config.unitarity_tol, NonFinite on overflow.
 */
AtomState evolve_atoms(const FieldState& fields, const TauGrid& grid,
                       const SolverConfig& config);

/// d g / d zeta = (i kappa_p a1* a3, i kappa_c a2* a3).
std::pair<std::vector<cplx>, std::vector<cplx>>
field_rhs(const AtomState& atoms, const MediumSpec& medium);

/// One Heun (predictor-corrector) step in depth.
FieldState step_zeta(const FieldState& fields, const TauGrid& grid,
                     double dzeta, const MediumSpec& medium,
                     const SolverConfig& config);

/// Throws WindowTooSmall unless both envelopes are < 1e-6 * peak at the
/// window edges.
void check_window(const FieldState& input);

/*
 * Marches from zeta = 0 to zeta_max, recording a snapshot every
 * snapshot_stride steps plus the final state. Precondition violations
 * throw; failures during the march return the partial result with
 * valid == false.
 */
SimulationResult propagate(const FieldState& input, const TauGrid& tau_grid,
                           const MediumSpec& medium, const ZetaGrid& zeta_grid,
                           const SolverConfig& config = {});

/// Snapshot diagnostics relative to the entry photon invariant.
SnapshotDiagnostics snapshot_diagnostics(const FieldState& fields,
                                         const AtomState& atoms,
                                         const std::vector<double>& v_entry,
                                         const TauGrid& grid,
                                         const MediumSpec& medium);

} // namespace cpt
