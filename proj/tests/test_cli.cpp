#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "cptshape/cli.hpp"
#include "cptshape/persist.hpp"

using namespace cpt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome
{
    int status = 0;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int status = run_command(args, out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("cptshape_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string error_code(const Outcome& o)
{
    return json::parse(o.err)["error"]["code"].get<std::string>();
}

} // namespace

TEST_SUITE("cli-io")
{
    TEST_CASE("scenarios listing")
    {
        const auto o = run({"scenarios", "--json"});
        REQUIRE(o.status == 0);
        const auto j = json::parse(o.out);
        CHECK(j.size() == 9);
        CHECK(j[0]["name"] == "fig2_gaussians");
        CHECK(run({"scenarios"}).out.find("compress_ramp") != std::string::npos);
    }

    TEST_CASE("coarse compare on fig2 and metrics reload")
    {
        const auto dir = scratch("compare");
        const auto o = run({"compare", "-s", "fig2_gaussians", "-o", dir.string(),
                            "--n-tau", "1024", "--n-zeta", "500", "--zeta-max", "50"});
        CHECK(o.err.empty());
        REQUIRE(o.status == 0);
        const auto cmp = json::parse(read_file(dir / "compare.json"));
        CHECK(cmp["max_l2"].get<double>() <= 1e-2);
        CHECK(fs::exists(dir / "direct" / "manifest.json"));
        CHECK(fs::exists(dir / "adiabatic" / "manifest.json"));

        const auto m = run({"metrics", (dir / "direct").string()});
        CHECK(m.status == 0);
        CHECK_FALSE(m.out.empty());
        fs::remove_all(dir);
    }

    TEST_CASE("repeated runs give the same manifest")
    {
        const auto a = scratch("det_a");
        const auto b = scratch("det_b");
        const std::vector<std::string> common{"simulate", "-s", "adiabaton", "--n-tau",
                                              "512", "--n-zeta", "40", "--zeta-max", "10"};
        auto args_a = common, args_b = common;
        args_a.insert(args_a.end(), {"-o", a.string()});
        args_b.insert(args_b.end(), {"-o", b.string()});
        REQUIRE(run(args_a).status == 0);
        REQUIRE(run(args_b).status == 0);
        const auto ma = json::parse(read_file(a / "manifest.json"));
        const auto mb = json::parse(read_file(b / "manifest.json"));
        CHECK(ma["files"] == mb["files"]);
        fs::remove_all(a);
        fs::remove_all(b);
    }

    TEST_CASE("a probe wider than the window is rejected")
    {
        const auto dir = scratch("wide");
        fs::create_directories(dir);
        const auto cfg = dir / "wide.json";
        write_file_atomic(cfg, R"({
  "version": 1,
  "output_dir": ")" + (dir / "out").string() + R"(",
  "explicit": {
    "probe": {"type": "gaussian", "amplitude": 1, "center": 0, "width": 5},
    "coupling": {"type": "gaussian", "amplitude": 20, "center": 0, "width": 10},
    "medium": {"kappa_p": 1, "kappa_c": 1},
    "tau_grid": {"tau_min": -10, "tau_max": 10, "n_tau": 256},
    "zeta_grid": {"zeta_max": 1, "n_zeta": 10, "snapshot_stride": 5}
  }
})");
        const auto o = run({"simulate", "-c", cfg.string()});
        CHECK(o.status == 2);
        CHECK(error_code(o) == "WINDOW_TOO_SMALL");
        fs::remove_all(dir);
    }

    TEST_CASE("an infeasible design target is rejected")
    {
        const auto dir = scratch("infeasible");
        fs::create_directories(dir);
        const auto cfg = dir / "design.json";
        write_file_atomic(cfg, R"({
  "version": 1,
  "scenario": "flat_top",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "design": {
    "target": {"type": "gaussian", "amplitude": 50, "center": 0, "width": 1},
    "baseline_v": {"type": "supergaussian", "amplitude": 400, "center": 0, "width": 25, "order": 8},
    "depth": 100
  }
})");
        const auto o = run({"design", "-c", cfg.string(), "--no-verify"});
        CHECK(o.status == 2);
        CHECK(error_code(o) == "INFEASIBLE_TARGET");
        fs::remove_all(dir);
    }

    TEST_CASE("usage and lookup errors")
    {
        auto o = run({"frobnicate"});
        CHECK(o.status == 2);
        CHECK(error_code(o) == "USAGE_ERROR");

        o = run({});
        CHECK(o.status == 2);

        o = run({"simulate", "-s", "nope", "-o", scratch("nope").string()});
        CHECK(o.status == 2);
        CHECK(error_code(o) == "UNKNOWN_SCENARIO");

        o = run({"metrics", scratch("missing").string()});
        CHECK(o.status == 2);
        CHECK(error_code(o) == "IO_ERROR");
    }
}
