#pragma once

#include <variant>
#include <vector>

#include "cptshape/types.hpp"

namespace cpt {

/// g0 * exp(-((tau - center) / width)^2)
struct Gaussian
{
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;

    bool operator==(const Gaussian&) const = default;
};

/// g0 * exp(-|(tau - center) / width|^order), order even and >= 2.
struct SuperGaussian
{
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
    int order = 2;

    bool operator==(const SuperGaussian&) const = default;
};

/*
 * Linear growth from g_start at t_start to g_end at t_end. Outside the
 * ramp the end values fall off as Gaussian shoulders of 1/e width
 * `shoulder`, so the envelope is quiescent far from the ramp.
 */
struct LinearRamp
{
    double g_start = 0.0;
    double g_end = 0.0;
    double t_start = 0.0;
    double t_end = 1.0;
    double shoulder = 1.0;

    bool operator==(const LinearRamp&) const = default;
};

/// g_low + (g_high - g_low) * (1 + tanh((tau - t_mid) / rise_time)) / 2
struct TanhStep
{
    double g_low = 0.0;
    double g_high = 0.0;
    double t_mid = 0.0;
    double rise_time = 1.0;

    bool operator==(const TanhStep&) const = default;
};

/// Linearly interpolated samples, zero outside [tau.front(), tau.back()].
struct Tabulated
{
    std::vector<double> tau;
    std::vector<double> value;

    bool operator==(const Tabulated&) const = default;
};

struct EnvelopeSpec;

struct EnvelopeSum
{
    std::vector<EnvelopeSpec> parts;

    bool operator==(const EnvelopeSum&) const;
};

struct EnvelopeSpec
{
    using Shape = std::variant<Gaussian, SuperGaussian, LinearRamp, TanhStep,
                               Tabulated, EnvelopeSum>;
    Shape shape;

    EnvelopeSpec() : shape(Gaussian{}) {}
    template <typename T>
    EnvelopeSpec(T s) : shape(std::move(s))
    {
    }

    bool operator==(const EnvelopeSpec&) const = default;
};

/// Throws InvalidEnvelope if the parameters cannot produce a valid envelope.
void validate(const EnvelopeSpec& spec);

/// Envelope value at a single retarded time (no validation).
double envelope_value(const EnvelopeSpec& spec, double tau);

/// Samples on every grid point; the result is checked finite and >= 0.
std::vector<double> sample_envelope(const EnvelopeSpec& spec,
                                    const TauGrid& grid);

EnvelopeSpec tabulate(const std::vector<double>& tau,
                      const std::vector<double>& value);

} // namespace cpt
