#include "cptshape/cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"

#include "cptshape/config.hpp"
#include "cptshape/core.hpp"
#include "cptshape/persist.hpp"

namespace cpt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunOptions
{
    std::string config_path;
    std::string scenario;
    std::string out_dir;
    bool plots = false;
    double zeta_max = 0.0;
    std::size_t n_zeta = 0;
    std::size_t n_tau = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o)
{
    auto* cfg = cmd->add_option("-c,--config", o.config_path, "JSON run configuration");
    auto* sc = cmd->add_option("-s,--scenario", o.scenario, "built-in scenario name");
    cfg->excludes(sc);
    cmd->add_option("-o,--out", o.out_dir, "output directory (overrides the config)");
    cmd->add_flag("--plots", o.plots, "also write gnuplot scripts");
    cmd->add_option("--zeta-max", o.zeta_max, "override the propagation depth")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-zeta", o.n_zeta, "override the number of depth steps")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-tau", o.n_tau, "override the number of tau points")
        ->check(CLI::Range(16, 1 << 22));
}

struct Prepared
{
    RunConfig config;
    Scenario scenario;
    fs::path out_dir;
};

Prepared prepare(const RunOptions& o)
{
    Prepared p;
    if (!o.config_path.empty()) {
        p.config = parse_config(read_file(o.config_path));
    } else if (!o.scenario.empty()) {
        p.config.scenario = o.scenario;
        p.config.output_dir = (fs::path("out") / o.scenario).string();
    } else {
        throw Error(ErrorCode::ValidationError,
                    "config: pass --config FILE or --scenario NAME");
    }
    if (!o.out_dir.empty())
        p.config.output_dir = o.out_dir;
    p.config.emit_plots = p.config.emit_plots || o.plots;
    p.scenario = resolve_scenario(p.config);
    if (o.zeta_max > 0.0)
        p.scenario.zeta_grid.zeta_max = o.zeta_max;
    if (o.n_zeta > 0) {
        p.scenario.zeta_grid.n_zeta = o.n_zeta;
        p.scenario.zeta_grid.snapshot_stride =
            std::min(p.scenario.zeta_grid.snapshot_stride, o.n_zeta);
    }
    if (o.n_tau > 0)
        p.scenario.tau_grid.n_tau = o.n_tau;
    p.scenario.tau_grid.validate();
    p.scenario.zeta_grid.validate();
    p.out_dir = p.config.output_dir;
    return p;
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

// Scenario-level figures of merit stored next to the generic diagnostics.
json scenario_metrics(const Prepared& p, const SimulationResult& r,
                      const std::vector<double>& v_entry)
{
    json j;
    j["scenario"] = p.scenario.name;
    j["expected_outcome"] = std::string(outcome_name(p.scenario.expected));
    j["coherence_beyond_front"] = coherence_beyond_front(r);
    try {
        const auto c = compression_report(r);
        j["compression"] = {{"fwhm_in", c.fwhm_in},
                            {"fwhm_out", c.fwhm_out},
                            {"compression_factor", number_or_null(c.compression_factor)},
                            {"energy_ratio", number_or_null(c.energy_ratio)}};
    } catch (const Error&) {
        j["compression"] = nullptr;
    }
    json lags = json::array();
    for (const auto& s : r.snapshots)
        lags.push_back(copropagation_lag(s.fields, v_entry, r.medium));
    j["copropagation_lag"] = std::move(lags);
    return j;
}

json shock_json(const std::optional<ShockInfo>& s)
{
    if (!s)
        return nullptr;
    return {{"zeta", s->zeta}, {"tau0", s->tau0}};
}

fs::path save(const Prepared& p, const SimulationResult& r,
              const CharacteristicField& chi, const fs::path& dir, json extra,
              bool cross_validate_direct)
{
    const auto report =
        build_report(r, cross_validate_direct && r.manifest.solver == "direct" ? &chi
                                                                                : nullptr);
    PersistOptions opts;
    opts.emit_plots = p.config.emit_plots;
    opts.config_echo = to_json(p.config);
    opts.config_echo["resolved"] = {{"tau_grid", tau_grid_to_json(p.scenario.tau_grid)},
                                    {"zeta_grid", zeta_grid_to_json(p.scenario.zeta_grid)},
                                    {"medium", medium_to_json(p.scenario.medium)}};
    opts.extra_metrics = std::move(extra);
    return persist_result(r, report, dir, opts);
}

void print_summary(std::ostream& out, const SimulationResult& r)
{
    out << r.manifest.solver << ": " << r.snapshots.size() << " snapshots to zeta="
        << (r.snapshots.empty() ? 0.0 : r.snapshots.back().fields.zeta)
        << ", conservation=" << conservation_residual(r)
        << ", unitarity=" << unitarity_residual_max(r)
        << ", adiabaticity=" << adiabaticity_max(r) << "\n";
}

class Failure : public Error
{
public:
    using Error::Error;
};

// Persisting a partial run still reports the failure afterwards.
void raise_if_invalid(const SimulationResult& r)
{
    if (!r.valid)
        throw Failure(r.failure, r.failure_message);
}

int cmd_run(const RunOptions& o, SolverChoice forced, bool use_config_choice,
            std::ostream& out)
{
    const Prepared p = prepare(o);
    const SolverChoice choice = use_config_choice ? p.config.solver : forced;
    const auto& s = p.scenario;
    const auto input = make_input_fields(s.probe, s.coupling, s.tau_grid);
    const auto chi = build_characteristics(input, s.tau_grid, s.medium);
    const auto shock = detect_crossing(chi, s.zeta_grid.zeta_max);

    json extra_base;
    extra_base["shock"] = shock_json(shock);

    std::optional<SimulationResult> direct;
    std::optional<SimulationResult> adiabatic;
    const bool both = choice == SolverChoice::Both;
    if (choice != SolverChoice::Adiabatic) {
        direct = propagate(input, s.tau_grid, s.medium, s.zeta_grid, s.solver);
        json extra = scenario_metrics(p, *direct, chi.v);
        extra.update(extra_base);
        const auto path = save(p, *direct, chi, both ? p.out_dir / "direct" : p.out_dir,
                               extra, both);
        print_summary(out, *direct);
        out << "wrote " << path.string() << "\n";
    }
    if (choice != SolverChoice::Direct) {
        adiabatic = solve_adiabatic(input, s.tau_grid, s.medium, s.zeta_grid);
        json extra = scenario_metrics(p, *adiabatic, chi.v);
        extra.update(extra_base);
        const auto path = save(p, *adiabatic, chi,
                               both ? p.out_dir / "adiabatic" : p.out_dir, extra, false);
        print_summary(out, *adiabatic);
        out << "wrote " << path.string() << "\n";
    }
    if (both && direct) {
        const auto cv = cross_validate(*direct, chi);
        json rows = json::array();
        double worst = 0.0;
        out << "zeta\tprobe_l2\tcoupling_l2\n";
        for (const auto& c : cv) {
            rows.push_back({{"zeta", c.zeta},
                            {"probe_l2", number_or_null(c.probe_l2)},
                            {"coupling_l2", number_or_null(c.coupling_l2)},
                            {"post_shock", c.post_shock}});
            if (!c.post_shock)
                worst = std::max({worst, c.probe_l2, c.coupling_l2});
            out << c.zeta << "\t";
            if (c.post_shock)
                out << "post-shock\tpost-shock\n";
            else
                out << c.probe_l2 << "\t" << c.coupling_l2 << "\n";
        }
        const json doc = {{"scenario", s.name},
                          {"cross_validation", rows},
                          {"max_l2", worst},
                          {"shock", shock_json(shock)}};
        write_file_atomic(p.out_dir / "compare.json", doc.dump(2) + "\n");
        out << "max cross-validation error " << worst << "\n";
    }
    if (direct)
        raise_if_invalid(*direct);
    if (adiabatic)
        raise_if_invalid(*adiabatic);
    return 0;
}

int cmd_design(const RunOptions& o, bool verify, std::ostream& out)
{
    Prepared p = prepare(o);
    const auto& s = p.scenario;
    if (!s.design)
        throw Error(ErrorCode::ValidationError,
                    "design: the configuration has no design target");
    const auto& d = *s.design;
    const auto result = design_coupling(d.target, d.baseline_v, s.medium, d.depth,
                                        s.tau_grid);
    const auto target = sample_envelope(d.target, s.tau_grid);
    const auto predicted = abs_values(result.predicted_output.g_p);

    json doc;
    doc["scenario"] = s.name;
    doc["depth"] = d.depth;
    doc["feasibility_margin"] = result.feasibility_margin;
    doc["shock"] = shock_json(result.shock);
    doc["predicted_l2"] = relative_l2(predicted, target);
    out << "feasibility margin " << result.feasibility_margin
        << ", adiabatic prediction error " << doc["predicted_l2"].get<double>() << "\n";

    std::vector<double> verified(target.size(), std::nan(""));
    std::optional<SimulationResult> run;
    if (verify) {
        ZetaGrid zg = s.zeta_grid;
        zg.zeta_max = d.depth;
        if (d.depth > 0.0) {
            run = propagate(result.input, s.tau_grid, s.medium, zg, s.solver);
            if (run->valid) {
                verified = abs_values(run->snapshots.back().fields.g_p);
                const auto m = pulse_metrics(verified, s.tau_grid);
                doc["verification"] = {{"l2", relative_l2(verified, target)},
                                       {"top_flatness", m.top_flatness},
                                       {"n_local_maxima", m.n_local_maxima},
                                       {"fwhm", m.fwhm}};
                out << "direct verification error "
                    << doc["verification"]["l2"].get<double>() << ", maxima "
                    << m.n_local_maxima << ", flatness " << m.top_flatness << "\n";
            }
            const auto chi = build_characteristics(result.input, s.tau_grid, s.medium);
            json extra = scenario_metrics(p, *run, chi.v);
            save(p, *run, chi, p.out_dir / "verification", extra, true);
        }
    }

    fs::create_directories(p.out_dir);
    std::string table = "tau\tprobe_in\tcoupling_in\ttheta_in\ttarget\tpredicted\tverified\n";
    char buf[256];
    for (std::size_t i = 0; i < target.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\n",
                      s.tau_grid.at(i), result.input.g_p[i].real(),
                      result.input.g_c[i].real(), result.theta_in[i], target[i],
                      predicted[i], verified[i]);
        table += buf;
    }
    write_file_atomic(p.out_dir / "design_profiles.tsv", table);
    doc["files"] = {{"design_profiles.tsv", sha256_hex(table)}};
    write_file_atomic(p.out_dir / "design.json", doc.dump(2) + "\n");
    out << "wrote " << (p.out_dir / "design.json").string() << "\n";
    if (run)
        raise_if_invalid(*run);
    return 0;
}

json envelope_summary(const EnvelopeSpec& e)
{
    if (const auto* t = std::get_if<Tabulated>(&e.shape))
        return {{"type", "tabulated"}, {"points", t->tau.size()}};
    return envelope_to_json(e);
}

int cmd_scenarios(bool as_json, std::ostream& out)
{
    const auto all = builtin_scenarios();
    if (as_json) {
        json arr = json::array();
        for (const auto& s : all) {
            json e = {{"name", s.name},
                      {"description", s.description},
                      {"expected_outcome", std::string(outcome_name(s.expected))},
                      {"probe", envelope_summary(s.probe)},
                      {"coupling", envelope_summary(s.coupling)},
                      {"medium", medium_to_json(s.medium)},
                      {"tau_grid", tau_grid_to_json(s.tau_grid)},
                      {"zeta_grid", zeta_grid_to_json(s.zeta_grid)}};
            if (s.design)
                e["design"] = {{"target", envelope_to_json(s.design->target)},
                               {"baseline_v", envelope_to_json(s.design->baseline_v)},
                               {"depth", s.design->depth}};
            arr.push_back(std::move(e));
        }
        out << arr.dump(2) << "\n";
        return 0;
    }
    for (const auto& s : all) {
        out << std::left << std::setw(16) << s.name << std::setw(18)
            << outcome_name(s.expected) << "kappa_c=" << s.medium.kappa_c
            << " zeta_max=" << s.zeta_grid.zeta_max << " n_tau=" << s.tau_grid.n_tau
            << "  " << s.description << "\n";
    }
    return 0;
}

int cmd_metrics(const std::string& dir, std::ostream& out)
{
    const auto r = load_result(dir);
    std::optional<CharacteristicField> chi;
    if (r.manifest.solver == "direct" && !r.snapshots.empty() &&
        r.snapshots.front().fields.zeta == 0.0)
        chi = build_characteristics(r.snapshots.front().fields, r.tau_grid, r.medium);
    const auto report = build_report(r, chi ? &*chi : nullptr);
    json j = metrics_to_json(report);
    j["solver"] = r.manifest.solver;
    j["valid"] = r.valid;
    try {
        const auto c = compression_report(r);
        j["compression"] = {{"compression_factor", number_or_null(c.compression_factor)},
                            {"energy_ratio", number_or_null(c.energy_ratio)}};
    } catch (const Error&) {
    }
    out << j.dump(2) << "\n";
    return 0;
}

void print_error(std::ostream& err, std::string_view code, const std::string& message)
{
    const json rec = {{"error", {{"code", std::string(code)}, {"message", message}}}};
    err << rec.dump() << "\n";
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err)
{
    CLI::App app{"Pulse propagation and shaping in a three-level Lambda medium"};
    app.name("cptshape");
    app.set_version_flag("--version", std::string(CPTSHAPE_VERSION));
    app.require_subcommand(1);

    RunOptions sim_opts, adi_opts, cmp_opts, des_opts;
    auto* simulate = app.add_subcommand(
        "simulate", "run the solver selected in the config (default: direct)");
    add_run_options(simulate, sim_opts);
    auto* adiabatic = app.add_subcommand("adiabatic", "characteristic solution only");
    add_run_options(adiabatic, adi_opts);
    auto* compare = app.add_subcommand("compare", "both solvers plus cross-validation");
    add_run_options(compare, cmp_opts);
    auto* design = app.add_subcommand("design", "inverse design with forward verification");
    add_run_options(design, des_opts);
    bool no_verify = false;
    design->add_flag("--no-verify", no_verify, "skip the direct-solver verification");
    auto* scenarios = app.add_subcommand("scenarios", "list built-in scenarios");
    bool as_json = false;
    scenarios->add_flag("--json", as_json, "machine-readable listing");
    auto* metrics = app.add_subcommand("metrics", "recompute diagnostics of a saved run");
    std::string metrics_dir;
    metrics->add_option("dir", metrics_dir, "result directory")->required();

    std::vector<std::string> argv_store{"cptshape"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store)
        argv.push_back(a.data());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        print_error(err, "USAGE_ERROR", e.what());
        return 2;
    }

    try {
        if (*simulate)
            return cmd_run(sim_opts, SolverChoice::Direct, true, out);
        if (*adiabatic)
            return cmd_run(adi_opts, SolverChoice::Adiabatic, false, out);
        if (*compare)
            return cmd_run(cmp_opts, SolverChoice::Both, false, out);
        if (*design)
            return cmd_design(des_opts, !no_verify, out);
        if (*scenarios)
            return cmd_scenarios(as_json, out);
        if (*metrics)
            return cmd_metrics(metrics_dir, out);
    } catch (const Failure& e) {
        print_error(err, code_name(e.code()), e.what());
        return 3;
    } catch (const Error& e) {
        print_error(err, code_name(e.code()), e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error(err, "INTERNAL_ERROR", e.what());
        return 1;
    }
    return 0;
}

} // namespace cpt
