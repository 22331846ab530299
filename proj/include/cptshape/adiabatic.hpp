#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cptshape/direct_solver.hpp"
#include "cptshape/types.hpp"

namespace cpt {

/*
 * Input data of the characteristic solution. In the adiabatic regime the
 * mixing angle obeys
 *
 *     d theta/d zeta + K(theta)^2 / (kappa_p kappa_c V) d theta/d tau = 0
 *
 * with V(tau) independent of depth, so the characteristic through tau0 is
 *
 *     W(tau) - W(tau0) = K(theta0(tau0))^2 zeta / (kappa_p kappa_c),
 *
 * W being the running integral of V from the window start.
 */
struct CharacteristicField
{
    TauGrid grid;
    MediumSpec medium;
    std::vector<double> theta0;
    std::vector<double> v;
    std::vector<double> w;

    /// Linear interpolation of W / theta0 at an arbitrary tau in the window.
    double w_at(double tau) const;
    double theta0_at(double tau) const;

    /// Smallest tau with W(tau) >= target (target within [0, W(tau_max)]).
    double invert_w(double target) const;

    double w_total() const { return w.back(); }
};

CharacteristicField build_characteristics(const FieldState& input,
                                          const TauGrid& grid,
                                          const MediumSpec& medium);

/// Where the characteristic entering at tau0 sits at depth zeta.
/// Throws WindowExceeded if it has left the window.
double characteristic_tau(double tau0, double zeta,
                          const CharacteristicField& chi);

/*
 * Entry time tau0 of the characteristic reaching (tau, zeta), by bracketed
 * bisection on [tau_min, tau]. Throws Multivalued if several
 * characteristics reach the point and NoRoot if none does (the point is
 * ahead of the earliest one).
 */
double trace_back(double tau, double zeta, const CharacteristicField& chi);

struct ShockInfo
{
    double zeta = 0.0;  // first depth at which characteristics cross
    double tau0 = 0.0;  // entry time of the crossing pair
};

/// Smallest depth <= zeta_max where the forward map tau0 -> tau stops
/// being monotone, refined to 1% relative; nullopt if none.
std::optional<ShockInfo> detect_crossing(const CharacteristicField& chi,
                                         double zeta_max);

/*
 * Fields and amplitudes at depth zeta from the transported mixing angle:
 * g = sqrt(kappa_p kappa_c V / K(theta)) (sin theta, cos theta),
 * a = (cos theta, -sin theta, i theta'/|g|).
 */
std::pair<FieldState, AtomState> reconstruct(const CharacteristicField& chi,
                                             double zeta);

/// |g_c g_p' - g_p g_c'| / |g|^3 pointwise; 0 where |g| < quiet_floor.
std::vector<double> adiabaticity_ratio(const FieldState& fields,
                                       const TauGrid& grid,
                                       double quiet_floor = 1e-9);

/*
 * Maximum of the ratio over the pulse region, i.e. where |g| is at least
 * 1% of its window maximum. Outside the pulses the ratio compares two
 * vanishing quantities and says nothing about dark-state following.
 */
double adiabaticity_max(const FieldState& fields, const TauGrid& grid);

/// Characteristic solution sampled at the same depths as `propagate`.
SimulationResult solve_adiabatic(const FieldState& input,
                                 const TauGrid& tau_grid,
                                 const MediumSpec& medium,
                                 const ZetaGrid& zeta_grid);

} // namespace cpt
