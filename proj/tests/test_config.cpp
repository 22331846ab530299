#include "doctest.h"

#include <string>

#include "cptshape/config.hpp"
#include "helpers.hpp"

using namespace cpt;

namespace {

Error config_error(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error for: " << text);
    return Error(ErrorCode::NonFinite, "");
}

const char* explicit_fig2 = R"({
  "version": 1,
  "explicit": {
    "probe": {"type": "gaussian", "amplitude": 20, "center": 0, "width": 1},
    "coupling": {"type": "gaussian", "amplitude": 20, "center": 0, "width": 10},
    "medium": {"kappa_p": 1, "kappa_c": 1},
    "tau_grid": {"tau_min": -40, "tau_max": 40, "n_tau": 4096},
    "zeta_grid": {"zeta_max": 100, "n_zeta": 2000, "snapshot_stride": 50}
  }
})";

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("a named scenario with defaults")
    {
        const auto c = parse_config(R"({"version": 1, "scenario": "fig2_gaussians"})");
        CHECK(c.scenario == "fig2_gaussians");
        CHECK(c.output_dir == "out");
        CHECK(c.solver == SolverChoice::Direct);
        CHECK_FALSE(c.emit_plots);
        const auto s = resolve_scenario(c);
        CHECK(s.probe == EnvelopeSpec(Gaussian{20.0, 0.0, 1.0}));
        CHECK(s.coupling == EnvelopeSpec(Gaussian{20.0, 0.0, 10.0}));
        CHECK(s.medium.kappa_c == 1.0);
    }

    TEST_CASE("an explicit fig2 setup resolves to the same inputs as the built-in")
    {
        const auto c = parse_config(explicit_fig2);
        REQUIRE(c.explicit_setup.has_value());
        const auto s = resolve_scenario(c);
        const auto b = find_scenario("fig2_gaussians");
        CHECK(s.name == "explicit");
        CHECK(s.probe == b.probe);
        CHECK(s.coupling == b.coupling);
        CHECK(s.tau_grid == b.tau_grid);
        CHECK(s.zeta_grid.zeta_max == 100.0);
    }

    TEST_CASE("validation errors name the offending key")
    {
        std::string bad = explicit_fig2;
        bad.replace(bad.find("\"kappa_c\": 1"), 12, "\"kappa_c\": -1");
        auto e = config_error(bad);
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK(std::string(e.what()).find("explicit.medium") != std::string::npos);

        e = config_error(R"({"version": 1, "scenario": "adiabaton", "colour": "red"})");
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK(std::string(e.what()).find("colour") != std::string::npos);

        std::string both = explicit_fig2;
        both.replace(both.find("\"version\": 1"), 12,
                     "\"version\": 1, \"scenario\": \"adiabaton\"");
        CHECK(config_error(both).code() == ErrorCode::ValidationError);

        CHECK(config_error(R"({"version": 2, "scenario": "adiabaton"})").code() ==
              ErrorCode::ValidationError);
        CHECK(config_error(R"({"version": 1})").code() == ErrorCode::ValidationError);
        CHECK(config_error(R"({"version": 1, "scenario": "adiabaton", "solver": "fast"})").code() ==
              ErrorCode::ValidationError);

        std::string bad_env = explicit_fig2;
        bad_env.replace(bad_env.find("\"gaussian\""), 10, "\"lorentzian\"");
        e = config_error(bad_env);
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK(std::string(e.what()).find("explicit.probe") != std::string::npos);
    }

    TEST_CASE("an unknown scenario is rejected")
    {
        const auto e = config_error(R"({"version": 1, "scenario": "nope"})");
        CHECK(e.code() == ErrorCode::UnknownScenario);
        CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }

    TEST_CASE("parse errors carry a line number")
    {
        const auto e = config_error("{\n  \"version\": 1,\n  \"scenario\": \n}");
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }

    TEST_CASE("property: the normal form is a fixed point")
    {
        std::vector<RunConfig> configs;
        configs.push_back(parse_config(explicit_fig2));
        for (const auto& s : builtin_scenarios()) {
            RunConfig c;
            c.scenario = s.name;
            c.solver = SolverChoice::Both;
            c.emit_plots = true;
            configs.push_back(c);
            RunConfig e;
            e.explicit_setup = ExplicitSetup{s.probe, s.coupling, s.medium,
                                             s.tau_grid, s.zeta_grid, s.solver};
            e.design = s.design;
            e.output_dir = "run/" + s.name;
            configs.push_back(e);
        }
        for (int trial = 0; trial < 50; ++trial) {
            RunConfig c;
            ExplicitSetup x;
            x.probe = SuperGaussian{testing::uniform(0.1, 20.0), testing::uniform(-5.0, 5.0),
                                    testing::uniform(0.5, 3.0), 2 * int(testing::uniform(1.0, 5.0))};
            x.coupling = TanhStep{testing::uniform(0.0, 5.0), testing::uniform(5.0, 20.0),
                                  testing::uniform(-3.0, 3.0), testing::uniform(0.1, 2.0)};
            x.medium = MediumSpec::with_ratio(testing::uniform(0.1, 5.0));
            x.tau_grid = TauGrid{-testing::uniform(10.0, 50.0), testing::uniform(10.0, 50.0), 512};
            x.zeta_grid = ZetaGrid{testing::uniform(1.0, 100.0), 100, 25};
            c.explicit_setup = x;
            configs.push_back(c);
        }
        for (const auto& c : configs) {
            const std::string once = serialize_config(c);
            const auto back = parse_config(once);
            CHECK(back == c);
            CHECK(serialize_config(back) == once);
        }
    }
}
