#include "cptshape/direct_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cptshape/adiabatic.hpp"
#include "cptshape/core.hpp"

namespace cpt {

void SolverConfig::validate() const
{
    if (atom_substeps < 1)
        throw Error(ErrorCode::InvalidGrid, "atom_substeps must be >= 1");
    if (!(unitarity_tol > 0.0) || !(max_field > 0.0))
        throw Error(ErrorCode::InvalidGrid,
                    "unitarity_tol and max_field must be positive");
}

void SimulationResult::throw_if_invalid() const
{
    if (!valid)
        throw Error(failure, failure_message);
}

namespace {

constexpr cplx I{0.0, 1.0};

struct Amplitudes
{
    cplx a1, a2, a3;
};

inline Amplitudes derivative(const Amplitudes& a, cplx gp, cplx gc)
{
    return {I * std::conj(gp) * a.a3, I * std::conj(gc) * a.a3,
            I * (gp * a.a1 + gc * a.a2)};
}

inline Amplitudes axpy(const Amplitudes& a, double h, const Amplitudes& k)
{
    return {a.a1 + h * k.a1, a.a2 + h * k.a2, a.a3 + h * k.a3};
}

/*
 * Catmull-Rom segment between samples i and i+1 (end samples repeated at
 * the window edges). C1 continuity keeps the quadrature error of the
 * photon-number balance at fourth order in the grid spacing.
 */
struct CubicSegment
{
    cplx y0, y1, y2, y3;

    CubicSegment(const std::vector<cplx>& g, std::size_t i)
    {
        const std::size_t n = g.size();
        y0 = g[i == 0 ? 0 : i - 1];
        y1 = g[i];
        y2 = g[i + 1];
        y3 = g[std::min(i + 2, n - 1)];
    }

    cplx operator()(double t) const
    {
        return y1 + 0.5 * t *
                        ((y2 - y0) +
                         t * ((2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3) +
                              t * (3.0 * (y1 - y2) + y3 - y0)));
    }
};

} // namespace

AtomState evolve_atoms(const FieldState& fields, const TauGrid& grid,
                       const SolverConfig& config)
{
    const std::size_t n = fields.size();
    if (n != grid.n_tau || fields.g_c.size() != n)
        throw Error(ErrorCode::InvalidGrid,
                    "field length does not match the tau grid");

    AtomState out;
    out.a1.resize(n);
    out.a2.resize(n);
    out.a3.resize(n);

    Amplitudes a{1.0, 0.0, 0.0};
    out.a1[0] = a.a1;
    out.a2[0] = a.a2;
    out.a3[0] = a.a3;

    const int m = config.atom_substeps;
    const double h = grid.step() / double(m);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const CubicSegment sp(fields.g_p, i);
        const CubicSegment sc(fields.g_c, i);
        for (int s = 0; s < m; ++s) {
            const double f0 = double(s) / double(m);
            const double fh = (double(s) + 0.5) / double(m);
            const double f1 = double(s + 1) / double(m);
            const cplx gp_a = sp(f0), gc_a = sc(f0);
            const cplx gp_h = sp(fh), gc_h = sc(fh);
            const cplx gp_b = sp(f1), gc_b = sc(f1);

            const Amplitudes k1 = derivative(a, gp_a, gc_a);
            const Amplitudes k2 = derivative(axpy(a, 0.5 * h, k1), gp_h, gc_h);
            const Amplitudes k3 = derivative(axpy(a, 0.5 * h, k2), gp_h, gc_h);
            const Amplitudes k4 = derivative(axpy(a, h, k3), gp_b, gc_b);
            const double w = h / 6.0;
            a.a1 += w * (k1.a1 + 2.0 * (k2.a1 + k3.a1) + k4.a1);
            a.a2 += w * (k1.a2 + 2.0 * (k2.a2 + k3.a2) + k4.a2);
            a.a3 += w * (k1.a3 + 2.0 * (k2.a3 + k3.a3) + k4.a3);
        }
        out.a1[i + 1] = a.a1;
        out.a2[i + 1] = a.a2;
        out.a3[i + 1] = a.a3;

        const double norm = std::norm(a.a1) + std::norm(a.a2) + std::norm(a.a3);
        if (!std::isfinite(norm)) {
            std::ostringstream msg;
            msg << "atomic amplitudes not finite at tau=" << grid.at(i + 1);
            throw Error(ErrorCode::NonFinite, msg.str());
        }
        if (std::abs(norm - 1.0) > config.unitarity_tol) {
            std::ostringstream msg;
            msg << "norm drift " << std::abs(norm - 1.0) << " at tau="
                << grid.at(i + 1) << " exceeds " << config.unitarity_tol
                << "; refine the tau grid or atom_substeps";
            throw Error(ErrorCode::NonUnitary, msg.str());
        }
    }
    return out;
}

std::pair<std::vector<cplx>, std::vector<cplx>>
field_rhs(const AtomState& atoms, const MediumSpec& medium)
{
    const std::size_t n = atoms.size();
    std::vector<cplx> dp(n), dc(n);
    for (std::size_t i = 0; i < n; ++i) {
        dp[i] = I * medium.kappa_p * std::conj(atoms.a1[i]) * atoms.a3[i];
        dc[i] = I * medium.kappa_c * std::conj(atoms.a2[i]) * atoms.a3[i];
    }
    return {std::move(dp), std::move(dc)};
}

namespace {

void check_fields(const FieldState& f, const SolverConfig& config)
{
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double p = std::abs(f.g_p[i]);
        const double c = std::abs(f.g_c[i]);
        if (!std::isfinite(p) || !std::isfinite(c))
            throw Error(ErrorCode::NonFinite, "field became non-finite");
        if (p > config.max_field || c > config.max_field)
            throw Error(ErrorCode::Blowup, "field exceeded max_field");
    }
}

FieldState euler_update(const FieldState& f, double dz,
                        const std::vector<cplx>& dp,
                        const std::vector<cplx>& dc)
{
    FieldState out;
    out.zeta = f.zeta + dz;
    out.g_p.resize(f.size());
    out.g_c.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.g_p[i] = f.g_p[i] + dz * dp[i];
        out.g_c[i] = f.g_c[i] + dz * dc[i];
    }
    return out;
}

// Heun step given atoms already evaluated on `fields`.
FieldState heun(const FieldState& fields, const AtomState& atoms,
                const TauGrid& grid, double dzeta, const MediumSpec& medium,
                const SolverConfig& config)
{
    const auto [dp1, dc1] = field_rhs(atoms, medium);
    const FieldState predicted = euler_update(fields, dzeta, dp1, dc1);
    check_fields(predicted, config);

    const AtomState atoms_pred = evolve_atoms(predicted, grid, config);
    const auto [dp2, dc2] = field_rhs(atoms_pred, medium);

    FieldState out;
    out.zeta = fields.zeta + dzeta;
    out.g_p.resize(fields.size());
    out.g_c.resize(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out.g_p[i] = fields.g_p[i] + 0.5 * dzeta * (dp1[i] + dp2[i]);
        out.g_c[i] = fields.g_c[i] + 0.5 * dzeta * (dc1[i] + dc2[i]);
    }
    check_fields(out, config);
    return out;
}

double max_abs(const std::vector<cplx>& g)
{
    double m = 0.0;
    for (auto v : g)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace

FieldState step_zeta(const FieldState& fields, const TauGrid& grid,
                     double dzeta, const MediumSpec& medium,
                     const SolverConfig& config)
{
    if (!(dzeta > 0.0))
        throw Error(ErrorCode::InvalidGrid, "dzeta must be > 0");
    const AtomState atoms = evolve_atoms(fields, grid, config);
    return heun(fields, atoms, grid, dzeta, medium, config);
}

void check_window(const FieldState& input)
{
    auto check = [](const std::vector<cplx>& g, const char* name) {
        const double peak = max_abs(g);
        const double edge = std::max(std::abs(g.front()), std::abs(g.back()));
        if (edge > 1e-6 * peak) {
            std::ostringstream msg;
            msg << name << " envelope is " << edge / peak
                << " of its peak at the window edge (limit 1e-6)";
            throw Error(ErrorCode::WindowTooSmall, msg.str());
        }
    };
    check(input.g_p, "probe");
    check(input.g_c, "coupling");
}

SnapshotDiagnostics snapshot_diagnostics(const FieldState& fields,
                                         const AtomState& atoms,
                                         const std::vector<double>& v_entry,
                                         const TauGrid& grid,
                                         const MediumSpec& medium)
{
    SnapshotDiagnostics d;
    const auto v = photon_invariant(fields, medium);
    const double v_max = *std::max_element(v_entry.begin(), v_entry.end());
    double dev = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        dev = std::max(dev, std::abs(v[i] - v_entry[i]));
    d.conservation_residual = v_max > 0.0 ? dev / v_max : dev;

    d.adiabaticity_max = adiabaticity_max(fields, grid);

    double u = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double norm = std::norm(atoms.a1[i]) + std::norm(atoms.a2[i]) +
                            std::norm(atoms.a3[i]);
        u = std::max(u, std::abs(norm - 1.0));
    }
    d.unitarity_residual = u;
    return d;
}

SimulationResult propagate(const FieldState& input, const TauGrid& tau_grid,
                           const MediumSpec& medium, const ZetaGrid& zeta_grid,
                           const SolverConfig& config)
{
    tau_grid.validate();
    zeta_grid.validate();
    medium.validate();
    config.validate();
    if (input.size() != tau_grid.n_tau || input.g_c.size() != tau_grid.n_tau)
        throw Error(ErrorCode::InvalidGrid,
                    "input fields do not match the tau grid");
    check_window(input);

    const auto start = std::chrono::steady_clock::now();
    SimulationResult result;
    result.tau_grid = tau_grid;
    result.zeta_grid = zeta_grid;
    result.medium = medium;
    result.manifest.solver = "direct";
    result.manifest.config = config;

    const auto v_entry = photon_invariant(input, medium);
    const double dz = zeta_grid.step();

    FieldState fields = input;
    fields.zeta = 0.0;
    try {
        AtomState atoms = evolve_atoms(fields, tau_grid, config);
        auto record = [&] {
            Snapshot s{fields, atoms,
                       snapshot_diagnostics(fields, atoms, v_entry, tau_grid,
                                            medium)};
            result.snapshots.push_back(std::move(s));
        };
        record();
        for (std::size_t k = 1; k <= zeta_grid.n_zeta; ++k) {
            fields = heun(fields, atoms, tau_grid, dz, medium, config);
            // keep zeta exact instead of accumulated
            fields.zeta = dz * double(k);
            atoms = evolve_atoms(fields, tau_grid, config);
            result.manifest.steps_taken = k;
            if (k % zeta_grid.snapshot_stride == 0 || k == zeta_grid.n_zeta)
                record();
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
