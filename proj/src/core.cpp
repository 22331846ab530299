#include "cptshape/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cpt {

std::string_view code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidEnvelope: return "INVALID_ENVELOPE";
    case ErrorCode::InvalidGrid: return "INVALID_GRID";
    case ErrorCode::InvalidMedium: return "INVALID_MEDIUM";
    case ErrorCode::DegeneratePulse: return "DEGENERATE_PULSE";
    case ErrorCode::NonUnitary: return "NON_UNITARY";
    case ErrorCode::NonFinite: return "NON_FINITE";
    case ErrorCode::Blowup: return "BLOWUP";
    case ErrorCode::WindowTooSmall: return "WINDOW_TOO_SMALL";
    case ErrorCode::WindowExceeded: return "WINDOW_EXCEEDED";
    case ErrorCode::Multivalued: return "MULTIVALUED";
    case ErrorCode::NoRoot: return "NO_ROOT";
    case ErrorCode::Infeasible: return "INFEASIBLE_TARGET";
    case ErrorCode::CrossedCharacteristics: return "CROSSED_CHARACTERISTICS";
    case ErrorCode::NonConvergent: return "NON_CONVERGENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::UnknownScenario: return "UNKNOWN_SCENARIO";
    }
    return "UNKNOWN";
}

// -- grids and medium -------------------------------------------------------

void TauGrid::validate() const
{
    if (!std::isfinite(tau_min) || !std::isfinite(tau_max) ||
        tau_max <= tau_min)
        throw Error(ErrorCode::InvalidGrid, "tau grid needs tau_max > tau_min");
    if (n_tau < 16)
        throw Error(ErrorCode::InvalidGrid, "tau grid needs n_tau >= 16");
}

std::vector<double> TauGrid::points() const
{
    std::vector<double> p(n_tau);
    for (std::size_t i = 0; i < n_tau; ++i)
        p[i] = at(i);
    return p;
}

void ZetaGrid::validate() const
{
    if (!std::isfinite(zeta_max) || zeta_max <= 0.0)
        throw Error(ErrorCode::InvalidGrid, "zeta grid needs zeta_max > 0");
    if (n_zeta < 1)
        throw Error(ErrorCode::InvalidGrid, "zeta grid needs n_zeta >= 1");
    if (snapshot_stride < 1 || snapshot_stride > n_zeta)
        throw Error(ErrorCode::InvalidGrid,
                    "snapshot_stride must be in [1, n_zeta]");
}

MediumSpec MediumSpec::with_ratio(double kappa_c)
{
    MediumSpec m{1.0, kappa_c};
    m.validate();
    return m;
}

void MediumSpec::validate() const
{
    if (kappa_p != 1.0)
        throw Error(ErrorCode::InvalidMedium, "kappa_p is normalised to 1");
    if (!std::isfinite(kappa_c) || kappa_c <= 0.0)
        throw Error(ErrorCode::InvalidMedium, "kappa_c must be > 0");
}

double MediumSpec::effective_k(double theta) const
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return kappa_p * c * c + kappa_c * s * s;
}

// -- numerics ---------------------------------------------------------------

double interp_linear(std::span<const double> x, std::span<const double> y,
                     double at)
{
    if (at <= x.front())
        return y.front();
    if (at >= x.back())
        return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t hi = std::size_t(it - x.begin());
    const std::size_t lo = hi - 1;
    const double f = (at - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + f * (y[hi] - y[lo]);
}

double trapezoid(std::span<const double> y, double dx)
{
    if (y.size() < 2)
        return 0.0;
    double sum = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        sum += y[i];
    return sum * dx;
}

std::vector<double> cumulative_trapezoid(std::span<const double> y, double dx)
{
    std::vector<double> w(y.size(), 0.0);
    for (std::size_t i = 1; i < y.size(); ++i)
        w[i] = w[i - 1] + 0.5 * dx * (y[i - 1] + y[i]);
    return w;
}

namespace {

template <typename T>
std::vector<T> centered_difference_impl(std::span<const T> y, double dx)
{
    const std::size_t n = y.size();
    std::vector<T> d(n, T{});
    if (n < 3)
        return d;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dx);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);
    return d;
}

} // namespace

std::vector<cplx> centered_difference(std::span<const cplx> y, double dx)
{
    return centered_difference_impl(y, dx);
}

std::vector<double> centered_difference(std::span<const double> y, double dx)
{
    return centered_difference_impl(y, dx);
}

std::vector<double> abs_values(std::span<const cplx> y)
{
    std::vector<double> out(y.size());
    std::transform(y.begin(), y.end(), out.begin(),
                   [](cplx v) { return std::abs(v); });
    return out;
}

double relative_l2(std::span<const cplx> a, std::span<const cplx> reference)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - reference[i]);
        den += std::norm(reference[i]);
    }
    if (den == 0.0)
        return num == 0.0 ? 0.0 : INFINITY;
    return std::sqrt(num / den);
}

double relative_l2(std::span<const double> a,
                   std::span<const double> reference)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - reference[i]) * (a[i] - reference[i]);
        den += reference[i] * reference[i];
    }
    if (den == 0.0)
        return num == 0.0 ? 0.0 : INFINITY;
    return std::sqrt(num / den);
}

// -- pointwise physics -------------------------------------------------------

FieldState make_input_fields(const EnvelopeSpec& probe,
                             const EnvelopeSpec& coupling, const TauGrid& grid)
{
    const auto p = sample_envelope(probe, grid);
    const auto c = sample_envelope(coupling, grid);
    FieldState f;
    f.zeta = 0.0;
    f.g_p.assign(p.begin(), p.end());
    f.g_c.assign(c.begin(), c.end());
    return f;
}

std::vector<double> mixing_angle(const FieldState& fields)
{
    std::vector<double> theta(fields.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double p = std::abs(fields.g_p[i]);
        const double c = std::abs(fields.g_c[i]);
        theta[i] = (p == 0.0 && c == 0.0) ? 0.0 : std::atan2(p, c);
    }
    return theta;
}

std::vector<double> photon_invariant(const FieldState& fields,
                                     const MediumSpec& medium)
{
    std::vector<double> v(fields.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::norm(fields.g_c[i]) / medium.kappa_c +
               std::norm(fields.g_p[i]) / medium.kappa_p;
    return v;
}

double pulse_energy(std::span<const cplx> g, const TauGrid& grid)
{
    std::vector<double> intensity(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        intensity[i] = std::norm(g[i]);
    return trapezoid(intensity, grid.step());
}

PulseMetrics pulse_metrics(std::span<const double> a, const TauGrid& grid)
{
    if (a.size() != grid.n_tau)
        throw Error(ErrorCode::InvalidGrid,
                    "amplitude length does not match the tau grid");
    PulseMetrics m;
    const std::size_t n = a.size();
    const auto peak_it = std::max_element(a.begin(), a.end());
    m.peak = *peak_it;
    if (!(m.peak > 0.0))
        throw Error(ErrorCode::DegeneratePulse, "pulse has zero peak");

    const double dt = grid.step();
    const double half = 0.5 * m.peak;

    // outermost half-maximum crossings
    std::size_t first = 0;
    while (a[first] < half)
        ++first;
    std::size_t last = n - 1;
    while (a[last] < half)
        --last;
    double t_left = grid.at(first);
    if (first > 0) {
        const double f = (half - a[first - 1]) / (a[first] - a[first - 1]);
        t_left = grid.at(first - 1) + f * dt;
    }
    double t_right = grid.at(last);
    if (last + 1 < n) {
        const double f = (a[last] - half) / (a[last] - a[last + 1]);
        t_right = grid.at(last) + f * dt;
    }
    m.fwhm = t_right - t_left;

    std::vector<double> intensity(n);
    std::vector<double> weighted(n);
    for (std::size_t i = 0; i < n; ++i) {
        intensity[i] = a[i] * a[i];
        weighted[i] = grid.at(i) * intensity[i];
    }
    m.energy = trapezoid(intensity, dt);
    m.centroid = trapezoid(weighted, dt) / m.energy;

    // hysteresis peak counter, zero-padded at both ends
    const double floor = 0.05 * m.peak;
    double running_min = 0.0;
    double running_max = 0.0;
    bool rising = false;
    int count = 0;
    auto feed = [&](double v) {
        if (!rising) {
            running_min = std::min(running_min, v);
            if (v - running_min >= floor) {
                rising = true;
                running_max = v;
            }
        } else {
            running_max = std::max(running_max, v);
            if (running_max - v >= floor) {
                ++count;
                rising = false;
                running_min = v;
            }
        }
    };
    for (double v : a)
        feed(v);
    feed(0.0);
    m.n_local_maxima = count;

    double sum = 0.0;
    std::size_t top = 0;
    for (double v : a) {
        if (v >= 0.9 * m.peak) {
            sum += v;
            ++top;
        }
    }
    const double mean = sum / double(top);
    double var = 0.0;
    for (double v : a)
        if (v >= 0.9 * m.peak)
            var += (v - mean) * (v - mean);
    var /= double(top);
    m.top_flatness = std::sqrt(var) / mean;
    return m;
}

} // namespace cpt
