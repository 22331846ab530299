#pragma once

#include <span>
#include <vector>

#include "cptshape/envelope.hpp"
#include "cptshape/numeric.hpp"
#include "cptshape/types.hpp"

namespace cpt {

/// Builds a FieldState at zeta = 0 from real input envelopes.
FieldState make_input_fields(const EnvelopeSpec& probe,
                             const EnvelopeSpec& coupling,
                             const TauGrid& grid);

/// theta = atan2(|g_p|, |g_c|) in [0, pi/2]; 0 where both fields vanish.
std::vector<double> mixing_angle(const FieldState& fields);

/// V = |g_c|^2 / kappa_c + |g_p|^2 / kappa_p.
std::vector<double> photon_invariant(const FieldState& fields,
                                     const MediumSpec& medium);

/*
 * Shape metrics of a non-negative amplitude profile. The FWHM spans the
 * outermost half-maximum crossings. Maxima are counted with a hysteresis
 * of 0.05 * peak (the signal must rise and then fall by at least that much,
 * with zero padding outside the window), so sub-floor ripple is ignored.
 */
PulseMetrics pulse_metrics(std::span<const double> amplitude,
                           const TauGrid& grid);

/// Integral of |g|^2 over the window.
double pulse_energy(std::span<const cplx> g, const TauGrid& grid);

} // namespace cpt
