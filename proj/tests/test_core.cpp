#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cptshape/core.hpp"
#include "helpers.hpp"

using namespace cpt;
using doctest::Approx;

TEST_SUITE("lambda-core")
{
    TEST_CASE("gaussian samples")
    {
        const Gaussian g{20.0, 0.0, 10.0};
        CHECK(envelope_value(g, 0.0) == 20.0);
        CHECK(envelope_value(g, 10.0) == Approx(20.0 / std::exp(1.0)).epsilon(1e-14));
        CHECK(envelope_value(g, 10.0) == Approx(7.3576).epsilon(1e-4));
    }

    TEST_CASE("sum of two gaussians at the midpoint")
    {
        const EnvelopeSum s{{Gaussian{5.0, -3.0, 1.0}, Gaussian{5.0, 3.0, 1.0}}};
        CHECK(envelope_value(s, 0.0) == Approx(10.0 * std::exp(-9.0)).epsilon(1e-14));
        CHECK(envelope_value(s, 0.0) == Approx(0.001234).epsilon(1e-3));
    }

    TEST_CASE("tabulated envelope interpolates and vanishes outside")
    {
        const Tabulated t{{-1.0, 0.0, 2.0}, {0.0, 4.0, 2.0}};
        CHECK(envelope_value(t, -0.5) == Approx(2.0));
        CHECK(envelope_value(t, 1.0) == Approx(3.0));
        CHECK(envelope_value(t, -1.5) == 0.0);
        CHECK(envelope_value(t, 2.5) == 0.0);
    }

    TEST_CASE("linear ramp is continuous with gaussian shoulders")
    {
        const LinearRamp r{2.0, 8.0, -1.0, 2.0, 3.0};
        CHECK(envelope_value(r, -1.0) == Approx(2.0));
        CHECK(envelope_value(r, 2.0) == Approx(8.0));
        CHECK(envelope_value(r, 0.5) == Approx(5.0));
        CHECK(envelope_value(r, -4.0) == Approx(2.0 / std::exp(1.0)));
        CHECK(envelope_value(r, 5.0) == Approx(8.0 / std::exp(1.0)));
    }

    TEST_CASE("tanh step midpoint and limits")
    {
        const TanhStep s{1.0, 3.0, 0.5, 0.2};
        CHECK(envelope_value(s, 0.5) == Approx(2.0));
        CHECK(envelope_value(s, -20.0) == Approx(1.0));
        CHECK(envelope_value(s, 20.0) == Approx(3.0));
    }

    TEST_CASE("invalid envelopes are rejected")
    {
        const TauGrid grid{-10.0, 10.0, 64};
        auto code = [&](const EnvelopeSpec& e) {
            try {
                sample_envelope(e, grid);
            } catch (const Error& err) {
                return err.code();
            }
            return ErrorCode::NonFinite;
        };
        CHECK(code(SuperGaussian{1.0, 0.0, 1.0, 3}) == ErrorCode::InvalidEnvelope);
        CHECK(code(Gaussian{-1.0, 0.0, 1.0}) == ErrorCode::InvalidEnvelope);
        CHECK(code(Gaussian{1.0, 0.0, 0.0}) == ErrorCode::InvalidEnvelope);
        CHECK(code(LinearRamp{1.0, 2.0, 1.0, 1.0, 1.0}) == ErrorCode::InvalidEnvelope);
        CHECK(code(Tabulated{{0.0, 0.0}, {1.0, 1.0}}) == ErrorCode::InvalidEnvelope);
        CHECK(code(Tabulated{{0.0, 1.0}, {1.0, NAN}}) == ErrorCode::InvalidEnvelope);
        CHECK(code(EnvelopeSum{}) == ErrorCode::InvalidEnvelope);
    }

    TEST_CASE("grid and medium invariants")
    {
        CHECK_THROWS_AS((TauGrid{0.0, 1.0, 15}.validate()), Error);
        CHECK_THROWS_AS((TauGrid{1.0, 1.0, 64}.validate()), Error);
        CHECK_THROWS_AS((ZetaGrid{0.0, 10, 1}.validate()), Error);
        CHECK_THROWS_AS((ZetaGrid{1.0, 10, 11}.validate()), Error);
        CHECK_THROWS_AS(MediumSpec::with_ratio(-1.0), Error);
        CHECK_THROWS_AS((MediumSpec{2.0, 1.0}.validate()), Error);
        const TauGrid g{-1.0, 1.0, 21};
        CHECK(g.step() == Approx(0.1));
        CHECK(g.at(20) == Approx(1.0));
    }

    TEST_CASE("mixing angle")
    {
        FieldState f;
        f.g_p = {20.0, 0.0, 20.0, 0.0};
        f.g_c = {20.0, 20.0, 0.0, 0.0};
        const auto th = mixing_angle(f);
        CHECK(th[0] == Approx(std::numbers::pi / 4));
        CHECK(th[1] == 0.0);
        CHECK(th[2] == Approx(std::numbers::pi / 2));
        CHECK(th[3] == 0.0);
    }

    TEST_CASE("photon invariant")
    {
        FieldState f;
        f.g_p = {20.0, 0.0};
        f.g_c = {20.0, 10.0};
        const auto v1 = photon_invariant(f, MediumSpec{});
        CHECK(v1[0] == Approx(800.0));
        const auto v2 = photon_invariant(f, MediumSpec::with_ratio(0.75));
        CHECK(v2[1] == Approx(400.0 / 3.0));
    }

    TEST_CASE("pulse metrics of a gaussian")
    {
        const TauGrid grid{-40.0, 40.0, 4096};
        const auto a = sample_envelope(Gaussian{20.0, 0.0, 10.0}, grid);
        const auto m = pulse_metrics(a, grid);
        CHECK(m.peak == Approx(20.0).epsilon(1e-3));
        CHECK(m.fwhm == Approx(2.0 * 10.0 * std::sqrt(std::log(2.0))).epsilon(1e-4));
        CHECK(m.fwhm == Approx(16.651).epsilon(1e-4));
        CHECK(m.energy == Approx(400.0 * 10.0 * std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-6));
        CHECK(m.centroid == Approx(0.0).epsilon(1e-9));
        CHECK(m.n_local_maxima == 1);
    }

    TEST_CASE("pulse metrics of a constant and of two peaks")
    {
        const TauGrid grid{-10.0, 10.0, 512};
        const std::vector<double> c(grid.n_tau, 5.0);
        const auto mc = pulse_metrics(c, grid);
        CHECK(mc.n_local_maxima == 1);
        CHECK(mc.top_flatness == 0.0);

        const EnvelopeSum two{{Gaussian{5.0, -3.0, 1.0}, Gaussian{5.0, 3.0, 1.0}}};
        const auto m2 = pulse_metrics(sample_envelope(two, grid), grid);
        CHECK(m2.n_local_maxima == 2);

        const std::vector<double> zero(grid.n_tau, 0.0);
        CHECK_THROWS_AS(pulse_metrics(zero, grid), Error);
    }

    TEST_CASE("numerics")
    {
        const std::vector<double> x{0.0, 1.0, 3.0};
        const std::vector<double> y{1.0, 3.0, -1.0};
        CHECK(interp_linear(x, y, -1.0) == 1.0);
        CHECK(interp_linear(x, y, 2.0) == Approx(1.0));
        CHECK(interp_linear(x, y, 9.0) == -1.0);

        // trapezoid is exact for a linear function
        std::vector<double> lin(11);
        for (std::size_t i = 0; i < lin.size(); ++i)
            lin[i] = 2.0 + 0.5 * double(i);
        CHECK(trapezoid(lin, 0.1) == Approx(2.0 * 1.0 + 0.5 * 10.0 * 1.0 / 2.0));
        const auto w = cumulative_trapezoid(lin, 0.1);
        CHECK(w.front() == 0.0);
        CHECK(w.back() == Approx(trapezoid(lin, 0.1)));

        // centred differences are exact for a quadratic, including the ends
        std::vector<double> q(9);
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] = double(i) * double(i);
        const auto d = centered_difference(q, 1.0);
        for (std::size_t i = 0; i < q.size(); ++i)
            CHECK(d[i] == Approx(2.0 * double(i)));
    }

    TEST_CASE("property: swapping the envelopes reflects the mixing angle")
    {
        for (int trial = 0; trial < 200; ++trial) {
            FieldState f, s;
            const double gp = testing::uniform(0.0, 30.0);
            const double gc = testing::uniform(1e-3, 30.0);
            f.g_p = {gp};
            f.g_c = {gc};
            s.g_p = {gc};
            s.g_c = {gp};
            CHECK(mixing_angle(s)[0] ==
                  Approx(std::numbers::pi / 2 - mixing_angle(f)[0]).epsilon(1e-12));
        }
    }

    TEST_CASE("property: photon invariant under the full relabeling")
    {
        for (int trial = 0; trial < 200; ++trial) {
            const double gp = testing::uniform(0.0, 30.0);
            const double gc = testing::uniform(0.0, 30.0);
            const double kc = testing::uniform(0.1, 5.0);
            FieldState f, s;
            f.g_p = {gp};
            f.g_c = {gc};
            s.g_p = {gc};
            s.g_c = {gp};
            // MediumSpec is a plain value here; no normalisation is applied
            const MediumSpec m{1.0, kc};
            const MediumSpec swapped{kc, 1.0};
            CHECK(photon_invariant(s, swapped)[0] ==
                  Approx(photon_invariant(f, m)[0]).epsilon(1e-14));
        }
    }

    TEST_CASE("property: sampling is linear over sums")
    {
        const TauGrid grid{-20.0, 20.0, 257};
        for (int trial = 0; trial < 50; ++trial) {
            const Gaussian a{testing::uniform(0.0, 10.0), testing::uniform(-5.0, 5.0),
                             testing::uniform(0.2, 4.0)};
            const SuperGaussian b{testing::uniform(0.0, 10.0),
                                  testing::uniform(-5.0, 5.0),
                                  testing::uniform(0.5, 4.0), 4};
            const auto sa = sample_envelope(a, grid);
            const auto sb = sample_envelope(b, grid);
            const auto ss = sample_envelope(EnvelopeSum{{a, b}}, grid);
            for (std::size_t i = 0; i < ss.size(); ++i)
                CHECK(ss[i] == sa[i] + sb[i]);
        }
    }

    TEST_CASE("property: energy of well separated pulses is additive")
    {
        const TauGrid grid{-40.0, 40.0, 2048};
        for (int trial = 0; trial < 20; ++trial) {
            const Gaussian a{testing::uniform(1.0, 10.0), -15.0, testing::uniform(0.5, 2.0)};
            const Gaussian b{testing::uniform(1.0, 10.0), 15.0, testing::uniform(0.5, 2.0)};
            const auto ea = pulse_metrics(sample_envelope(a, grid), grid).energy;
            const auto eb = pulse_metrics(sample_envelope(b, grid), grid).energy;
            const auto es =
                pulse_metrics(sample_envelope(EnvelopeSum{{a, b}}, grid), grid).energy;
            CHECK(es == Approx(ea + eb).epsilon(1e-9));
        }
    }
}
