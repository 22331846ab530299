#include "cptshape/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cptshape/numeric.hpp"

namespace cpt {

bool EnvelopeSum::operator==(const EnvelopeSum& other) const
{
    return parts == other.parts;
}

namespace {

[[noreturn]] void invalid(const std::string& msg)
{
    throw Error(ErrorCode::InvalidEnvelope, msg);
}

bool finite(double x) { return std::isfinite(x); }

struct Validator
{
    void operator()(const Gaussian& g) const
    {
        if (!finite(g.amplitude) || g.amplitude < 0.0)
            invalid("gaussian amplitude must be finite and >= 0");
        if (!finite(g.center))
            invalid("gaussian center must be finite");
        if (!finite(g.width) || g.width <= 0.0)
            invalid("gaussian width must be > 0");
    }
    void operator()(const SuperGaussian& g) const
    {
        if (!finite(g.amplitude) || g.amplitude < 0.0)
            invalid("supergaussian amplitude must be finite and >= 0");
        if (!finite(g.center))
            invalid("supergaussian center must be finite");
        if (!finite(g.width) || g.width <= 0.0)
            invalid("supergaussian width must be > 0");
        if (g.order < 2 || g.order % 2 != 0)
            invalid("supergaussian order must be an even integer >= 2");
    }
    void operator()(const LinearRamp& r) const
    {
        if (!finite(r.g_start) || !finite(r.g_end) || r.g_start < 0.0 ||
            r.g_end < 0.0)
            invalid("linear_ramp amplitudes must be finite and >= 0");
        if (!finite(r.t_start) || !finite(r.t_end) || r.t_end <= r.t_start)
            invalid("linear_ramp requires t_end > t_start");
        if (!finite(r.shoulder) || r.shoulder <= 0.0)
            invalid("linear_ramp shoulder must be > 0");
    }
    void operator()(const TanhStep& s) const
    {
        if (!finite(s.g_low) || !finite(s.g_high) || s.g_low < 0.0 ||
            s.g_high < 0.0)
            invalid("tanh_step levels must be finite and >= 0");
        if (!finite(s.t_mid))
            invalid("tanh_step t_mid must be finite");
        if (!finite(s.rise_time) || s.rise_time <= 0.0)
            invalid("tanh_step rise_time must be > 0");
    }
    void operator()(const Tabulated& t) const
    {
        if (t.tau.size() != t.value.size())
            invalid("tabulated tau and value lengths differ");
        if (t.tau.size() < 2)
            invalid("tabulated envelope needs at least 2 samples");
        for (std::size_t i = 0; i < t.tau.size(); ++i) {
            if (!finite(t.tau[i]) || !finite(t.value[i]))
                invalid("tabulated samples must be finite");
            if (t.value[i] < 0.0)
                invalid("tabulated values must be >= 0");
            if (i > 0 && t.tau[i] <= t.tau[i - 1])
                invalid("tabulated tau must be strictly increasing");
        }
    }
    void operator()(const EnvelopeSum& s) const
    {
        if (s.parts.empty())
            invalid("sum envelope needs at least one part");
        for (const auto& p : s.parts)
            std::visit(*this, p.shape);
    }
};

struct Evaluator
{
    double tau;

    double operator()(const Gaussian& g) const
    {
        const double x = (tau - g.center) / g.width;
        return g.amplitude * std::exp(-x * x);
    }
    double operator()(const SuperGaussian& g) const
    {
        const double x = std::abs((tau - g.center) / g.width);
        return g.amplitude * std::exp(-std::pow(x, g.order));
    }
    double operator()(const LinearRamp& r) const
    {
        if (tau < r.t_start) {
            const double x = (tau - r.t_start) / r.shoulder;
            return r.g_start * std::exp(-x * x);
        }
        if (tau > r.t_end) {
            const double x = (tau - r.t_end) / r.shoulder;
            return r.g_end * std::exp(-x * x);
        }
        const double f = (tau - r.t_start) / (r.t_end - r.t_start);
        return r.g_start + f * (r.g_end - r.g_start);
    }
    double operator()(const TanhStep& s) const
    {
        return s.g_low + (s.g_high - s.g_low) * 0.5 *
                             (1.0 + std::tanh((tau - s.t_mid) / s.rise_time));
    }
    double operator()(const Tabulated& t) const
    {
        if (tau < t.tau.front() || tau > t.tau.back())
            return 0.0;
        return interp_linear(t.tau, t.value, tau);
    }
    double operator()(const EnvelopeSum& s) const
    {
        double sum = 0.0;
        for (const auto& p : s.parts)
            sum += std::visit(*this, p.shape);
        return sum;
    }
};

} // namespace

void validate(const EnvelopeSpec& spec)
{
    std::visit(Validator{}, spec.shape);
}

double envelope_value(const EnvelopeSpec& spec, double tau)
{
    return std::visit(Evaluator{tau}, spec.shape);
}

std::vector<double> sample_envelope(const EnvelopeSpec& spec,
                                    const TauGrid& grid)
{
    validate(spec);
    grid.validate();
    std::vector<double> out(grid.n_tau);
    for (std::size_t i = 0; i < grid.n_tau; ++i) {
        const double v = envelope_value(spec, grid.at(i));
        if (!std::isfinite(v) || v < 0.0) {
            std::ostringstream msg;
            msg << "envelope sample at tau=" << grid.at(i)
                << " is negative or not finite";
            invalid(msg.str());
        }
        out[i] = v;
    }
    return out;
}

EnvelopeSpec tabulate(const std::vector<double>& tau,
                      const std::vector<double>& value)
{
    Tabulated t{tau, value};
    for (auto& v : t.value)
        v = std::max(v, 0.0);
    return EnvelopeSpec{std::move(t)};
}

} // namespace cpt
