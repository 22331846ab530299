#pragma once

#include <optional>
#include <vector>

#include "cptshape/adiabatic.hpp"
#include "cptshape/direct_solver.hpp"
#include "cptshape/envelope.hpp"

namespace cpt {

/// max over snapshots and tau of |V(tau, zeta) - V(tau, 0)| / max V(tau, 0).
double conservation_residual(const SimulationResult& result);

/// Largest | |a|^2 - 1 | recorded in any snapshot.
double unitarity_residual_max(const SimulationResult& result);

/// Largest snapshot adiabaticity_max.
double adiabaticity_max(const SimulationResult& result);

struct CrossValidation
{
    double zeta = 0.0;
    double probe_l2 = 0.0;
    double coupling_l2 = 0.0;
    bool post_shock = false;  // characteristics crossed; errors not computed
};

/*
 * Relative L2 distance of every direct snapshot from the characteristic
 * reconstruction at the same depth, per envelope, normalised by the direct
 * envelope. Snapshots where the reconstruction is multivalued are flagged
 * instead of compared.
 */
std::vector<CrossValidation> cross_validate(const SimulationResult& direct,
                                            const CharacteristicField& chi);

struct EdgeSlopes
{
    double leading_max_slope = 0.0;
    double trailing_max_slope = 0.0;
};

/// Steepest rise before and steepest fall after the peak of |g_p|.
/// Throws DegeneratePulse unless the probe has exactly one maximum.
EdgeSlopes edge_slopes(const FieldState& fields, const TauGrid& grid);

struct CoherenceMap
{
    std::vector<double> zeta;
    std::vector<std::vector<double>> rho21;  // [snapshot][tau]
    double localization_fraction = 0.0;      // share of cells above 0.01
    double max_value = 0.0;
};

CoherenceMap coherence_map(const SimulationResult& result);

/*
 * Largest |rho21| behind the re-emitted probe: in each snapshot, past the
 * last tau where |g_p| is at least `front_fraction` of that snapshot's
 * probe peak. Snapshots without a probe contribute their whole window.
 */
double coherence_beyond_front(const SimulationResult& result,
                              double front_fraction = 1e-3);

struct ConvergenceLevel
{
    std::size_t n_tau = 0;
    std::size_t n_zeta = 0;
    double difference = 0.0;  // vs the next finer level; 0 for the finest
};

struct ConvergenceReport
{
    std::vector<ConvergenceLevel> levels;
    std::vector<double> orders;  // log2(d_k / d_{k+1})
    bool at_rounding = false;    // differences at round-off level throughout
};

/*
 * Self-convergence of the direct solver under simultaneous halving of both
 * steps. Level k uses n_tau = base_points * 2^k + 1 and n_zeta =
 * base_zeta * 2^k on the window of `tau_grid`, so coarse grid points are
 * nested in every finer grid. Differences of successive final fields are
 * relative L2 on the coarse points. Throws NonConvergent if they fail to
 * decrease (unless all are at round-off level).
 */
ConvergenceReport convergence_study(const EnvelopeSpec& probe,
                                    const EnvelopeSpec& coupling,
                                    const MediumSpec& medium,
                                    const TauGrid& tau_grid, double zeta_max,
                                    std::size_t base_points,
                                    std::size_t base_zeta, int levels,
                                    const SolverConfig& config = {});

struct SnapshotReport
{
    double zeta = 0.0;
    PulseMetrics probe;
    PulseMetrics coupling;
    std::optional<EdgeSlopes> slopes;
    SnapshotDiagnostics diag;
};

struct DiagnosticsReport
{
    double conservation_residual_max = 0.0;
    double unitarity_residual_max = 0.0;
    double adiabaticity_max = 0.0;
    double localization_fraction = 0.0;
    double coherence_max = 0.0;
    std::vector<SnapshotReport> snapshots;
    std::vector<CrossValidation> cross_validation;  // empty without a reference
};

/// Collects every scalar diagnostic; cross-validates against `chi` if given.
DiagnosticsReport build_report(const SimulationResult& result,
                               const CharacteristicField* chi = nullptr);

} // namespace cpt
