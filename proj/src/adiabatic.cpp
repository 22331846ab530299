#include "cptshape/adiabatic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cptshape/core.hpp"

namespace cpt {

namespace {

constexpr cplx I{0.0, 1.0};

// position of tau in grid units, clamped to the window
double grid_position(const TauGrid& g, double tau)
{
    const double x = (tau - g.tau_min) / g.step();
    return std::clamp(x, 0.0, double(g.n_tau - 1));
}

double sample_at(const std::vector<double>& y, const TauGrid& g, double tau)
{
    const double x = grid_position(g, tau);
    const std::size_t lo = std::min(std::size_t(x), g.n_tau - 2);
    const double f = x - double(lo);
    return y[lo] + f * (y[lo + 1] - y[lo]);
}

double k_squared(const MediumSpec& m, double theta)
{
    const double k = m.effective_k(theta);
    return k * k;
}

} // namespace

double CharacteristicField::w_at(double tau) const
{
    return sample_at(w, grid, tau);
}

double CharacteristicField::theta0_at(double tau) const
{
    return sample_at(theta0, grid, tau);
}

double CharacteristicField::invert_w(double target) const
{
    if (target <= w.front())
        return grid.tau_min;
    if (target >= w.back()) {
        // first grid point where the plateau at W_total starts
        const auto it = std::lower_bound(w.begin(), w.end(), w.back());
        return grid.at(std::size_t(it - w.begin()));
    }
    const auto it = std::lower_bound(w.begin(), w.end(), target);
    const std::size_t hi = std::size_t(it - w.begin());
    const std::size_t lo = hi - 1;
    const double f = (target - w[lo]) / (w[hi] - w[lo]);
    return grid.at(lo) + f * grid.step();
}

CharacteristicField build_characteristics(const FieldState& input,
                                          const TauGrid& grid,
                                          const MediumSpec& medium)
{
    grid.validate();
    medium.validate();
    if (input.size() != grid.n_tau)
        throw Error(ErrorCode::InvalidGrid,
                    "input fields do not match the tau grid");
    CharacteristicField chi;
    chi.grid = grid;
    chi.medium = medium;
    chi.theta0 = mixing_angle(input);
    chi.v = photon_invariant(input, medium);
    chi.w = cumulative_trapezoid(chi.v, grid.step());
    return chi;
}

double characteristic_tau(double tau0, double zeta,
                          const CharacteristicField& chi)
{
    const auto& g = chi.grid;
    if (tau0 < g.tau_min || tau0 > g.tau_max || zeta < 0.0)
        throw Error(ErrorCode::InvalidGrid,
                    "tau0 must lie in the window and zeta >= 0");
    if (zeta == 0.0)
        return tau0;
    const double kk = chi.medium.kappa_p * chi.medium.kappa_c;
    const double target =
        chi.w_at(tau0) + k_squared(chi.medium, chi.theta0_at(tau0)) * zeta / kk;
    if (target > chi.w_total()) {
        std::ostringstream msg;
        msg << "characteristic from tau0=" << tau0 << " leaves the window before zeta="
            << zeta;
        throw Error(ErrorCode::WindowExceeded, msg.str());
    }
    return chi.invert_w(target);
}

namespace {

// F(tau0) = W(tau) - W(tau0) - c K^2(theta0(tau0)), continuous in tau0
struct RootFunction
{
    const CharacteristicField& chi;
    double w_tau;
    double c;

    double operator()(double tau0) const
    {
        return w_tau - chi.w_at(tau0) - c * k_squared(chi.medium, chi.theta0_at(tau0));
    }
};

double bisect(const RootFunction& f, double lo, double hi)
{
    // invariant: f(lo) >= 0 > f(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double trace_back(double tau, double zeta, const CharacteristicField& chi)
{
    const auto& g = chi.grid;
    if (tau < g.tau_min || tau > g.tau_max || zeta < 0.0)
        throw Error(ErrorCode::InvalidGrid,
                    "tau must lie in the window and zeta >= 0");
    if (zeta == 0.0)
        return tau;

    const RootFunction f{chi, chi.w_at(tau),
                         zeta / (chi.medium.kappa_p * chi.medium.kappa_c)};
    const std::size_t last = std::min(
        std::size_t(std::floor(grid_position(g, tau))), g.n_tau - 1);

    // nodes tau_min .. tau_last, then tau itself
    std::vector<double> nodes;
    nodes.reserve(last + 2);
    for (std::size_t j = 0; j <= last; ++j)
        nodes.push_back(g.at(j));
    if (nodes.back() < tau)
        nodes.push_back(tau);

    int changes = 0;
    std::size_t bracket = 0;
    bool prev_pos = f(nodes[0]) >= 0.0;
    for (std::size_t j = 1; j < nodes.size(); ++j) {
        const bool pos = f(nodes[j]) >= 0.0;
        if (pos != prev_pos) {
            ++changes;
            bracket = j - 1;
        }
        prev_pos = pos;
    }
    if (changes == 0) {
        std::ostringstream msg;
        msg << "no characteristic reaches tau=" << tau << " at zeta=" << zeta;
        throw Error(ErrorCode::NoRoot, msg.str());
    }
    if (changes > 1) {
        std::ostringstream msg;
        msg << "characteristics crossed: " << changes
            << " sign changes at tau=" << tau << ", zeta=" << zeta;
        throw Error(ErrorCode::Multivalued, msg.str());
    }
    return bisect(f, nodes[bracket], nodes[bracket + 1]);
}

namespace {

// forward map in W coordinates: A_j = W_j + c K^2(theta0_j)
std::vector<double> forward_w(const CharacteristicField& chi, double zeta)
{
    const double c = zeta / (chi.medium.kappa_p * chi.medium.kappa_c);
    std::vector<double> a(chi.w.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        a[j] = chi.w[j] + c * k_squared(chi.medium, chi.theta0[j]);
    return a;
}

/*
 * Index of the first neighbouring pair whose characteristics have crossed
 * by depth zeta. Only pairs with distinct K(theta) can cross: in quiescent
 * stretches (V ~ 0, theta constant) the map is flat but single-valued.
 * Pairs that have both left the window are ignored.
 */
std::optional<std::size_t> first_crossing(const CharacteristicField& chi,
                                          double zeta)
{
    const double c = zeta / (chi.medium.kappa_p * chi.medium.kappa_c);
    const double w_end = chi.w_total();
    for (std::size_t j = 0; j + 1 < chi.w.size(); ++j) {
        const double dk = k_squared(chi.medium, chi.theta0[j + 1]) -
                          k_squared(chi.medium, chi.theta0[j]);
        if (!(dk < 0.0))
            continue;
        const double a0 = chi.w[j] + c * k_squared(chi.medium, chi.theta0[j]);
        const double a1 = chi.w[j + 1] + c * k_squared(chi.medium, chi.theta0[j + 1]);
        if (std::min(a0, a1) > w_end)
            continue;
        if (a1 - a0 <= 0.0)
            return j;
    }
    return std::nullopt;
}

} // namespace

std::optional<ShockInfo> detect_crossing(const CharacteristicField& chi,
                                         double zeta_max)
{
    if (!(zeta_max > 0.0))
        return std::nullopt;
    // geometric ladder zeta_max * 2^-k, scanned from the shallow end
    constexpr int rungs = 48;
    double lo = 0.0;
    double hi = -1.0;
    for (int k = rungs; k >= 0; --k) {
        const double z = std::ldexp(zeta_max, -k);
        if (first_crossing(chi, z)) {
            hi = z;
            break;
        }
        lo = z;
    }
    if (hi < 0.0)
        return std::nullopt;
    while ((hi - lo) > 0.01 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (first_crossing(chi, mid))
            hi = mid;
        else
            lo = mid;
    }
    const std::size_t j = *first_crossing(chi, hi);
    return ShockInfo{hi, chi.grid.at(j)};
}

std::vector<double> adiabaticity_ratio(const FieldState& fields,
                                       const TauGrid& grid, double quiet_floor)
{
    const std::size_t n = fields.size();
    const auto dp = centered_difference(fields.g_p, grid.step());
    const auto dc = centered_difference(fields.g_c, grid.step());
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double g2 = std::norm(fields.g_p[i]) + std::norm(fields.g_c[i]);
        const double g = std::sqrt(g2);
        if (g < quiet_floor)
            continue;
        r[i] = std::abs(fields.g_c[i] * dp[i] - fields.g_p[i] * dc[i]) /
               (g2 * g);
    }
    return r;
}

double adiabaticity_max(const FieldState& fields, const TauGrid& grid)
{
    double g_max = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i)
        g_max = std::max(g_max, std::sqrt(std::norm(fields.g_p[i]) +
                                          std::norm(fields.g_c[i])));
    const auto r = adiabaticity_ratio(fields, grid, std::max(1e-9, 1e-2 * g_max));
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

std::pair<FieldState, AtomState> reconstruct(const CharacteristicField& chi,
                                             double zeta)
{
    if (zeta < 0.0)
        throw Error(ErrorCode::InvalidGrid, "zeta must be >= 0");
    const auto& g = chi.grid;
    const std::size_t n = g.n_tau;
    std::vector<double> theta(n);

    if (zeta == 0.0) {
        theta = chi.theta0;
    } else {
        const auto a = forward_w(chi, zeta);
        const bool monotone = std::is_sorted(a.begin(), a.end());
        const RootFunction base{chi, 0.0,
                                zeta / (chi.medium.kappa_p * chi.medium.kappa_c)};
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = g.at(i);
            if (!monotone) {
                try {
                    theta[i] = chi.theta0_at(trace_back(tau, zeta, chi));
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::NoRoot)
                        throw;
                    theta[i] = chi.theta0.front();
                }
                continue;
            }
            // F_j = W_i - A_j is non-increasing; root after the last j with A_j <= W_i
            const auto it = std::upper_bound(a.begin(), a.begin() + long(i) + 1, chi.w[i]);
            if (it == a.begin()) {
                theta[i] = chi.theta0.front();  // ahead of every characteristic
                continue;
            }
            const std::size_t j = std::size_t(it - a.begin()) - 1;
            if (a[j] == chi.w[i] || j + 1 > i) {
                theta[i] = chi.theta0[j];
                continue;
            }
            RootFunction f = base;
            f.w_tau = chi.w[i];
            theta[i] = chi.theta0_at(bisect(f, g.at(j), g.at(j + 1)));
        }
    }

    FieldState fields;
    fields.zeta = zeta;
    fields.g_p.resize(n);
    fields.g_c.resize(n);
    const double kk = chi.medium.kappa_p * chi.medium.kappa_c;
    for (std::size_t i = 0; i < n; ++i) {
        const double amp = std::sqrt(kk * chi.v[i] / chi.medium.effective_k(theta[i]));
        fields.g_p[i] = amp * std::sin(theta[i]);
        fields.g_c[i] = amp * std::cos(theta[i]);
    }

    AtomState atoms;
    atoms.a1.resize(n);
    atoms.a2.resize(n);
    atoms.a3.resize(n);
    const auto dp = centered_difference(fields.g_p, g.step());
    const auto dc = centered_difference(fields.g_c, g.step());
    for (std::size_t i = 0; i < n; ++i) {
        atoms.a1[i] = std::cos(theta[i]);
        atoms.a2[i] = -std::sin(theta[i]);
        const double g2 = std::norm(fields.g_p[i]) + std::norm(fields.g_c[i]);
        const double gm = std::sqrt(g2);
        if (gm >= 1e-9) {
            // theta' / |g| = (g_c g_p' - g_p g_c') / |g|^3 for real envelopes
            const double num = std::real(fields.g_c[i] * dp[i] - fields.g_p[i] * dc[i]);
            atoms.a3[i] = I * (num / (g2 * gm));
        }
    }
    return {std::move(fields), std::move(atoms)};
}

SimulationResult solve_adiabatic(const FieldState& input,
                                 const TauGrid& tau_grid,
                                 const MediumSpec& medium,
                                 const ZetaGrid& zeta_grid)
{
    zeta_grid.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto chi = build_characteristics(input, tau_grid, medium);

    SimulationResult result;
    result.tau_grid = tau_grid;
    result.zeta_grid = zeta_grid;
    result.medium = medium;
    result.manifest.solver = "adiabatic";

    const double dz = zeta_grid.step();
    try {
        for (std::size_t k = 0; k <= zeta_grid.n_zeta; ++k) {
            if (k % zeta_grid.snapshot_stride != 0 && k != zeta_grid.n_zeta)
                continue;
            auto [fields, atoms] = reconstruct(chi, dz * double(k));
            auto diag = snapshot_diagnostics(fields, atoms, chi.v, tau_grid, medium);
            result.snapshots.push_back({std::move(fields), std::move(atoms), diag});
            result.manifest.steps_taken = k;
        }
    } catch (const Error& e) {
        result.valid = false;
        result.failure = e.code();
        result.failure_message = e.what();
    }
    result.manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

} // namespace cpt
