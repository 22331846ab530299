#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "cptshape/errors.hpp"

namespace cpt {

using cplx = std::complex<double>;

/*
 * All quantities are dimensionless: retarded time in units of the probe
 * duration T_p, depth in units of 1/(K_p T_p), Rabi envelopes as g = G T_p.
 */

/// Uniform retarded-time grid.
struct TauGrid
{
    double tau_min = -40.0;
    double tau_max = 40.0;
    std::size_t n_tau = 4096;

    /// Throws InvalidGrid unless n_tau >= 16 and tau_max > tau_min.
    void validate() const;

    double step() const { return (tau_max - tau_min) / double(n_tau - 1); }
    double at(std::size_t i) const { return tau_min + double(i) * step(); }
    std::vector<double> points() const;

    bool operator==(const TauGrid&) const = default;
};

/// Uniform depth march: n_zeta steps of zeta_max / n_zeta.
struct ZetaGrid
{
    double zeta_max = 100.0;
    std::size_t n_zeta = 2000;
    std::size_t snapshot_stride = 50;

    void validate() const;

    double step() const { return zeta_max / double(n_zeta); }

    bool operator==(const ZetaGrid&) const = default;
};

/// Propagation constants normalised so that kappa_p == 1.
struct MediumSpec
{
    double kappa_p = 1.0;
    double kappa_c = 1.0;

    static MediumSpec with_ratio(double kappa_c);

    void validate() const;

    /// K(theta) = kappa_p cos^2 theta + kappa_c sin^2 theta.
    double effective_k(double theta) const;

    bool operator==(const MediumSpec&) const = default;
};

/// Probe and coupling envelopes at one depth.
struct FieldState
{
    double zeta = 0.0;
    std::vector<cplx> g_p;
    std::vector<cplx> g_c;

    std::size_t size() const { return g_p.size(); }
};

/// Probability amplitudes of |1>, |2>, |3> on the tau grid.
struct AtomState
{
    std::vector<cplx> a1;
    std::vector<cplx> a2;
    std::vector<cplx> a3;

    std::size_t size() const { return a1.size(); }
};

struct PulseMetrics
{
    double peak = 0.0;
    double fwhm = 0.0;
    double energy = 0.0;
    double centroid = 0.0;
    int n_local_maxima = 0;
    double top_flatness = 0.0;
};

} // namespace cpt
