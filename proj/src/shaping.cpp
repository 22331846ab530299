#include "cptshape/shaping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cptshape/core.hpp"

namespace cpt {

namespace {

constexpr std::array<std::pair<Outcome, std::string_view>, 7> outcome_names{{
    {Outcome::Depletion, "depletion"},
    {Outcome::Adiabaton, "adiabaton"},
    {Outcome::SharpenTrailing, "sharpen_trailing"},
    {Outcome::SharpenLeading, "sharpen_leading"},
    {Outcome::Compress, "compress"},
    {Outcome::FlatTop, "flat_top"},
    {Outcome::TwoPeak, "two_peak"},
}};

} // namespace

std::string_view outcome_name(Outcome o)
{
    for (const auto& [k, v] : outcome_names)
        if (k == o)
            return v;
    return "unknown";
}

std::optional<Outcome> outcome_from_name(std::string_view name)
{
    for (const auto& [k, v] : outcome_names)
        if (v == name)
            return k;
    return std::nullopt;
}

double probe_from_theta(double theta, double v, const MediumSpec& medium)
{
    const double kk = medium.kappa_p * medium.kappa_c;
    return std::sqrt(kk * v / medium.effective_k(theta)) * std::sin(theta);
}

double theta_from_probe(double gp_target, double v, const MediumSpec& medium)
{
    medium.validate();
    if (!(gp_target >= 0.0) || !(v >= 0.0) || !std::isfinite(gp_target) ||
        !std::isfinite(v))
        throw Error(ErrorCode::InvalidEnvelope,
                    "probe target and V must be finite and non-negative");
    if (gp_target == 0.0)
        return 0.0;
    if (gp_target * gp_target >= medium.kappa_p * v) {
        std::ostringstream msg;
        msg << "probe amplitude " << gp_target << " needs more than the available"
            << " photon flux (gp^2 >= kappa_p V = " << medium.kappa_p * v << ")";
        throw Error(ErrorCode::Infeasible, msg.str());
    }
    const double target = gp_target * gp_target;
    double lo = 0.0;
    double hi = std::numbers::pi / 2.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double p = probe_from_theta(mid, v, medium);
        if (p * p < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

DesignResult design_coupling(const EnvelopeSpec& target,
                             const EnvelopeSpec& baseline_v,
                             const MediumSpec& medium, double depth,
                             const TauGrid& grid)
{
    grid.validate();
    medium.validate();
    if (!(depth >= 0.0) || !std::isfinite(depth))
        throw Error(ErrorCode::InvalidGrid, "design depth must be >= 0");

    const std::size_t n = grid.n_tau;
    const auto tau = grid.points();
    const auto gp_out = sample_envelope(target, grid);
    const auto v = sample_envelope(baseline_v, grid);

    const double peak = *std::max_element(gp_out.begin(), gp_out.end());
    if (!(peak > 0.0))
        throw Error(ErrorCode::DegeneratePulse, "design target is identically zero");
    if (std::max(gp_out.front(), gp_out.back()) > 1e-6 * peak)
        throw Error(ErrorCode::WindowTooSmall,
                    "design target is not quiescent at the window edges");

    DesignResult out;
    out.feasibility_margin = 1.0;
    std::vector<double> theta_out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > 0.0)
            out.feasibility_margin =
                std::min(out.feasibility_margin,
                         (medium.kappa_p * v[i] - gp_out[i] * gp_out[i]) /
                             (medium.kappa_p * v[i]));
        else if (gp_out[i] > 0.0)
            out.feasibility_margin = std::min(out.feasibility_margin, -1.0);
        if (gp_out[i] > 0.0 && out.feasibility_margin > 0.0)
            theta_out[i] = theta_from_probe(gp_out[i], v[i], medium);
    }
    if (!(out.feasibility_margin > 0.0)) {
        std::ostringstream msg;
        msg << "target exceeds the photon flux (feasibility margin "
            << out.feasibility_margin << ")";
        throw Error(ErrorCode::Infeasible, msg.str());
    }

    // characteristics with V only; theta0 is not used for the inversion
    CharacteristicField chi;
    chi.grid = grid;
    chi.medium = medium;
    chi.theta0.assign(n, 0.0);
    chi.v = v;
    chi.w = cumulative_trapezoid(v, grid.step());

    const double c = depth / (medium.kappa_p * medium.kappa_c);
    std::vector<double> entry_tau;
    std::vector<double> entry_theta;
    entry_tau.reserve(n);
    entry_theta.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = medium.effective_k(theta_out[i]);
        const double w0 = chi.w[i] - c * k * k;
        const bool significant = gp_out[i] > 1e-6 * peak;
        if (w0 < 0.0) {
            if (significant) {
                std::ostringstream msg;
                msg << "target at tau=" << tau[i]
                    << " traces back to before the window start";
                throw Error(ErrorCode::WindowExceeded, msg.str());
            }
            continue;
        }
        const double t0 = chi.invert_w(w0);
        if (!entry_tau.empty() && t0 <= entry_tau.back()) {
            const double tol = 1e-9 * (1.0 + std::abs(t0));
            const bool same_angle = std::abs(theta_out[i] - entry_theta.back()) < 1e-9;
            if (t0 < entry_tau.back() - tol || !same_angle) {
                if (!same_angle || significant) {
                    std::ostringstream msg;
                    msg << "target at tau=" << tau[i]
                        << " would need crossing characteristics (entry time "
                        << t0 << " precedes " << entry_tau.back() << ")";
                    throw Error(ErrorCode::CrossedCharacteristics, msg.str());
                }
            }
            continue;
        }
        entry_tau.push_back(t0);
        entry_theta.push_back(theta_out[i]);
    }

    out.theta_in.assign(n, 0.0);
    if (entry_tau.size() >= 2) {
        for (std::size_t i = 0; i < n; ++i)
            if (tau[i] >= entry_tau.front() && tau[i] <= entry_tau.back())
                out.theta_in[i] = interp_linear(entry_tau, entry_theta, tau[i]);
    }

    std::vector<double> probe(n), coupling(n);
    out.input.zeta = 0.0;
    out.input.g_p.resize(n);
    out.input.g_c.resize(n);
    const double kk = medium.kappa_p * medium.kappa_c;
    for (std::size_t i = 0; i < n; ++i) {
        const double amp =
            std::sqrt(kk * v[i] / medium.effective_k(out.theta_in[i]));
        probe[i] = amp * std::sin(out.theta_in[i]);
        coupling[i] = amp * std::cos(out.theta_in[i]);
        out.input.g_p[i] = probe[i];
        out.input.g_c[i] = coupling[i];
    }
    out.probe_in = tabulate(tau, probe);
    out.coupling_in = tabulate(tau, coupling);

    const auto chi_in = build_characteristics(out.input, grid, medium);
    out.shock = detect_crossing(chi_in, depth);
    if (out.shock) {
        std::ostringstream msg;
        msg << "designed input crosses characteristics at zeta=" << out.shock->zeta
            << " before the design depth " << depth;
        throw Error(ErrorCode::CrossedCharacteristics, msg.str());
    }
    out.predicted_output = reconstruct(chi_in, depth).first;
    return out;
}

CompressionReport compression_report(const SimulationResult& result)
{
    if (result.snapshots.empty())
        throw Error(ErrorCode::InvalidGrid, "result has no snapshots");
    const auto& first = result.snapshots.front().fields;
    const auto& last = result.snapshots.back().fields;
    const auto in = pulse_metrics(abs_values(first.g_p), result.tau_grid);
    const auto out = pulse_metrics(abs_values(last.g_p), result.tau_grid);
    CompressionReport r;
    r.fwhm_in = in.fwhm;
    r.fwhm_out = out.fwhm;
    r.compression_factor = out.fwhm > 0.0 ? in.fwhm / out.fwhm : 0.0;
    r.energy_ratio = in.energy > 0.0 ? out.energy / in.energy : 0.0;
    return r;
}

long copropagation_lag(const FieldState& fields,
                       const std::vector<double>& v_entry,
                       const MediumSpec& medium)
{
    const std::size_t n = fields.size();
    if (v_entry.size() != n)
        throw Error(ErrorCode::InvalidGrid, "V profile does not match the fields");
    std::vector<double> probe(n), dip(n);
    for (std::size_t i = 0; i < n; ++i) {
        probe[i] = std::norm(fields.g_p[i]);
        dip[i] = medium.kappa_c * v_entry[i] - std::norm(fields.g_c[i]);
    }
    const long max_lag = long(n / 8);
    long best = 0;
    double best_val = -1.0;
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (long i = 0; i < long(n); ++i) {
            const long j = i + lag;
            if (j >= 0 && j < long(n))
                s += probe[std::size_t(i)] * dip[std::size_t(j)];
        }
        if (s > best_val || (s == best_val && std::abs(lag) < std::abs(best))) {
            best_val = s;
            best = lag;
        }
    }
    return best;
}

namespace {

constexpr double pedestal_amplitude = 20.0;

Scenario base(std::string name, std::string description, Outcome expected)
{
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.expected = expected;
    return s;
}

/*
 * Weak Gaussian probe riding on a wide flat-top coupling pedestal, with the
 * coupling lowered under the probe so that V is constant across it.
 */
void complementary_inputs(Scenario& s)
{
    const Gaussian probe{10.0, 0.0, 1.0};
    const SuperGaussian pedestal{pedestal_amplitude, 0.0, 30.0, 16};
    const auto tau = s.tau_grid.points();
    std::vector<double> coupling(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double p = envelope_value(pedestal, tau[i]);
        const double g = envelope_value(probe, tau[i]);
        coupling[i] = std::sqrt(std::max(0.0, p * p - g * g));
    }
    s.probe = probe;
    s.coupling = tabulate(tau, coupling);
}

Scenario sharpen(std::string name, double kappa_c, double zeta_max,
                 Outcome expected)
{
    std::ostringstream d;
    d << "complementary probe on a pedestal, kappa_c/kappa_p = " << kappa_c;
    Scenario s = base(std::move(name), d.str(), expected);
    complementary_inputs(s);
    s.medium = MediumSpec::with_ratio(kappa_c);
    s.zeta_grid = {zeta_max, 2000, 250};
    return s;
}

// Coupling that grows linearly through the probe; the tail runs faster
// than the front and the probe shortens.
LinearRamp compression_ramp()
{
    const double ln2 = std::numbers::ln2;
    const double t_half = -std::sqrt(ln2);  // leading half-intensity point
    const double slope = (20.0 * std::numbers::sqrt2 - 20.0) / (2.0 * std::sqrt(ln2));
    const double t_start = -4.0;
    const double t_end = 5.0;
    return LinearRamp{20.0 + slope * (t_start - t_half),
                      20.0 + slope * (t_end - t_half), t_start, t_end, 6.0};
}

// Photon-flux profile shared by the design scenarios.
LinearRamp design_flux()
{
    return LinearRamp{100.0, 1600.0, -6.0, 6.0, 6.0};
}

Scenario designed(std::string name, std::string description, Outcome expected,
                  EnvelopeSpec target, double depth)
{
    Scenario s = base(std::move(name), std::move(description), expected);
    s.design = DesignTarget{std::move(target), design_flux(), depth};
    const auto d = design_coupling(s.design->target, s.design->baseline_v,
                                   s.medium, depth, s.tau_grid);
    s.probe = d.probe_in;
    s.coupling = d.coupling_in;
    s.zeta_grid = {depth, 2000, 250};
    return s;
}

} // namespace

std::vector<Scenario> builtin_scenarios()
{
    std::vector<Scenario> out;

    {
        Scenario s = base("fig2_gaussians",
                          "short strong probe inside a long coupling pulse; "
                          "the probe is absorbed into dark-state coherence",
                          Outcome::Depletion);
        s.probe = Gaussian{20.0, 0.0, 1.0};
        s.coupling = Gaussian{20.0, 0.0, 10.0};
        s.zeta_grid = {100.0, 2000, 50};
        out.push_back(std::move(s));
    }
    {
        Scenario s = base("adiabaton",
                          "complementary probe and coupling with equal "
                          "propagation constants travel without distortion",
                          Outcome::Adiabaton);
        complementary_inputs(s);
        s.zeta_grid = {100.0, 2000, 250};
        out.push_back(std::move(s));
    }
    out.push_back(sharpen("sharpen_1.25", 1.25, 1500.0, Outcome::SharpenTrailing));
    out.push_back(sharpen("sharpen_0.75", 0.75, 1500.0, Outcome::SharpenLeading));
    out.push_back(sharpen("strong_4.0", 4.0, 170.0, Outcome::SharpenTrailing));
    out.push_back(sharpen("strong_0.25", 0.25, 700.0, Outcome::SharpenLeading));
    {
        Scenario s = base("compress_ramp",
                          "coupling rising linearly through the probe "
                          "shortens it at nearly constant energy",
                          Outcome::Compress);
        s.probe = Gaussian{10.0, 0.0, 1.0};
        s.coupling = compression_ramp();
        s.zeta_grid = {1500.0, 2000, 250};
        out.push_back(std::move(s));
    }
    out.push_back(designed("flat_top",
                           "entry pulses designed to emerge as a flat-top probe",
                           Outcome::FlatTop,
                           SuperGaussian{10.0, 1.5, 1.5, 6}, 600.0));
    out.push_back(designed("two_peak",
                           "entry pulses designed to emerge as a double-peaked probe",
                           Outcome::TwoPeak,
                           EnvelopeSum{{Gaussian{10.0, 0.5, 0.6},
                                        Gaussian{10.0, 2.5, 0.6}}},
                           600.0));
    return out;
}

Scenario find_scenario(std::string_view name)
{
    for (auto& s : builtin_scenarios())
        if (s.name == name)
            return s;
    std::ostringstream msg;
    msg << "unknown scenario '" << name << "'";
    throw Error(ErrorCode::UnknownScenario, msg.str());
}

} // namespace cpt
