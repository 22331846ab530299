#include "cptshape/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cptshape/core.hpp"

namespace cpt {

double conservation_residual(const SimulationResult& result)
{
    if (result.snapshots.empty())
        return 0.0;
    const auto v0 = photon_invariant(result.snapshots.front().fields, result.medium);
    const double v_max = *std::max_element(v0.begin(), v0.end());
    double dev = 0.0;
    for (const auto& s : result.snapshots) {
        const auto v = photon_invariant(s.fields, result.medium);
        for (std::size_t i = 0; i < v.size(); ++i)
            dev = std::max(dev, std::abs(v[i] - v0[i]));
    }
    return v_max > 0.0 ? dev / v_max : dev;
}

double unitarity_residual_max(const SimulationResult& result)
{
    double u = 0.0;
    for (const auto& s : result.snapshots)
        u = std::max(u, s.diag.unitarity_residual);
    return u;
}

double adiabaticity_max(const SimulationResult& result)
{
    double a = 0.0;
    for (const auto& s : result.snapshots)
        a = std::max(a, s.diag.adiabaticity_max);
    return a;
}

std::vector<CrossValidation> cross_validate(const SimulationResult& direct,
                                            const CharacteristicField& chi)
{
    if (!(direct.tau_grid == chi.grid) || !(direct.medium == chi.medium))
        throw Error(ErrorCode::InvalidGrid,
                    "direct result and characteristics use different grids or media");
    std::vector<CrossValidation> out;
    out.reserve(direct.snapshots.size());
    for (const auto& s : direct.snapshots) {
        CrossValidation cv;
        cv.zeta = s.fields.zeta;
        try {
            const auto ref = reconstruct(chi, cv.zeta).first;
            // normalised by the direct envelope: |ref - direct| / |direct|
            cv.probe_l2 = relative_l2(ref.g_p, s.fields.g_p);
            cv.coupling_l2 = relative_l2(ref.g_c, s.fields.g_c);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Multivalued)
                throw;
            cv.post_shock = true;
            cv.probe_l2 = std::numeric_limits<double>::quiet_NaN();
            cv.coupling_l2 = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(cv);
    }
    return out;
}

EdgeSlopes edge_slopes(const FieldState& fields, const TauGrid& grid)
{
    const auto a = abs_values(fields.g_p);
    const auto m = pulse_metrics(a, grid);
    if (m.n_local_maxima != 1) {
        std::ostringstream msg;
        msg << "edge slopes need a single pulse, found " << m.n_local_maxima
            << " maxima";
        throw Error(ErrorCode::DegeneratePulse, msg.str());
    }
    const auto d = centered_difference(a, grid.step());
    const std::size_t peak =
        std::size_t(std::max_element(a.begin(), a.end()) - a.begin());
    EdgeSlopes e;
    for (std::size_t i = 0; i < peak; ++i)
        e.leading_max_slope = std::max(e.leading_max_slope, std::abs(d[i]));
    for (std::size_t i = peak + 1; i < a.size(); ++i)
        e.trailing_max_slope = std::max(e.trailing_max_slope, std::abs(d[i]));
    return e;
}

CoherenceMap coherence_map(const SimulationResult& result)
{
    CoherenceMap map;
    std::size_t cells = 0;
    std::size_t excited = 0;
    for (const auto& s : result.snapshots) {
        map.zeta.push_back(s.fields.zeta);
        std::vector<double> row(s.atoms.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = std::abs(std::conj(s.atoms.a2[i]) * s.atoms.a1[i]);
            map.max_value = std::max(map.max_value, row[i]);
            excited += row[i] > 0.01 ? 1 : 0;
        }
        cells += row.size();
        map.rho21.push_back(std::move(row));
    }
    map.localization_fraction = cells > 0 ? double(excited) / double(cells) : 0.0;
    return map;
}

double coherence_beyond_front(const SimulationResult& result,
                              double front_fraction)
{
    double worst = 0.0;
    for (const auto& s : result.snapshots) {
        const auto a = abs_values(s.fields.g_p);
        const double peak = a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
        std::size_t start = 0;
        if (peak > 0.0) {
            std::size_t last = a.size() - 1;
            while (last > 0 && a[last] < front_fraction * peak)
                --last;
            start = last + 1;
        }
        for (std::size_t i = start; i < s.atoms.size(); ++i)
            worst = std::max(worst, std::abs(std::conj(s.atoms.a2[i]) * s.atoms.a1[i]));
    }
    return worst;
}

ConvergenceReport convergence_study(const EnvelopeSpec& probe,
                                    const EnvelopeSpec& coupling,
                                    const MediumSpec& medium,
                                    const TauGrid& tau_grid, double zeta_max,
                                    std::size_t base_points,
                                    std::size_t base_zeta, int levels,
                                    const SolverConfig& config)
{
    if (levels < 3)
        throw Error(ErrorCode::InvalidGrid, "convergence study needs >= 3 levels");
    if (base_points < 15 || base_zeta < 1)
        throw Error(ErrorCode::InvalidGrid, "base resolution too small");

    std::vector<FieldState> finals;
    ConvergenceReport report;
    for (int k = 0; k < levels; ++k) {
        const std::size_t scale = std::size_t(1) << k;
        TauGrid tg{tau_grid.tau_min, tau_grid.tau_max, base_points * scale + 1};
        ZetaGrid zg{zeta_max, base_zeta * scale, base_zeta * scale};
        const auto input = make_input_fields(probe, coupling, tg);
        const auto run = propagate(input, tg, medium, zg, config);
        run.throw_if_invalid();
        finals.push_back(run.snapshots.back().fields);
        report.levels.push_back({tg.n_tau, zg.n_zeta, 0.0});
    }

    // level k compared with level k+1 on the level-k points
    std::vector<double> norms;
    for (int k = 0; k + 1 < levels; ++k) {
        const auto& c = finals[std::size_t(k)];
        const auto& f = finals[std::size_t(k) + 1];
        double diff = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            diff += std::norm(c.g_p[i] - f.g_p[2 * i]) + std::norm(c.g_c[i] - f.g_c[2 * i]);
            norm += std::norm(f.g_p[2 * i]) + std::norm(f.g_c[2 * i]);
        }
        report.levels[std::size_t(k)].difference =
            norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
    }

    constexpr double rounding = 1e-12;
    report.at_rounding = true;
    for (int k = 0; k + 1 < levels; ++k)
        report.at_rounding =
            report.at_rounding && report.levels[std::size_t(k)].difference <= rounding;
    for (int k = 0; k + 2 < levels; ++k) {
        const double a = report.levels[std::size_t(k)].difference;
        const double b = report.levels[std::size_t(k) + 1].difference;
        report.orders.push_back(b > 0.0 ? std::log2(a / b)
                                        : std::numeric_limits<double>::infinity());
        if (!report.at_rounding && !(b < a)) {
            std::ostringstream msg;
            msg << "differences do not decrease under refinement (" << a << " -> "
                << b << ")";
            throw Error(ErrorCode::NonConvergent, msg.str());
        }
    }
    return report;
}

DiagnosticsReport build_report(const SimulationResult& result,
                               const CharacteristicField* chi)
{
    DiagnosticsReport r;
    r.conservation_residual_max = conservation_residual(result);
    r.unitarity_residual_max = unitarity_residual_max(result);
    r.adiabaticity_max = adiabaticity_max(result);
    const auto map = coherence_map(result);
    r.localization_fraction = map.localization_fraction;
    r.coherence_max = map.max_value;
    for (const auto& s : result.snapshots) {
        SnapshotReport sr;
        sr.zeta = s.fields.zeta;
        sr.diag = s.diag;
        const auto p = abs_values(s.fields.g_p);
        const auto c = abs_values(s.fields.g_c);
        if (*std::max_element(p.begin(), p.end()) > 0.0) {
            sr.probe = pulse_metrics(p, result.tau_grid);
            if (sr.probe.n_local_maxima == 1)
                sr.slopes = edge_slopes(s.fields, result.tau_grid);
        }
        if (*std::max_element(c.begin(), c.end()) > 0.0)
            sr.coupling = pulse_metrics(c, result.tau_grid);
        r.snapshots.push_back(sr);
    }
    if (chi)
        r.cross_validation = cross_validate(result, *chi);
    return r;
}

} // namespace cpt
