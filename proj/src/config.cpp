#include "cptshape/config.hpp"

#include <set>
#include <sstream>

namespace cpt {

using nlohmann::json;

std::string_view solver_choice_name(SolverChoice s)
{
    switch (s) {
    case SolverChoice::Direct: return "direct";
    case SolverChoice::Adiabatic: return "adiabatic";
    case SolverChoice::Both: return "both";
    }
    return "direct";
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what)
{
    throw Error(ErrorCode::ValidationError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

// Strict view of a JSON object: every key must be consumed.
class ObjectReader
{
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            invalid(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& get(const std::string& key)
    {
        if (!j_.contains(key))
            invalid(join(path_, key), "required key is missing");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_number())
            invalid(join(path_, key), "expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback)
    {
        return has(key) ? number(key) : fallback;
    }

    long long integer(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_number_integer())
            invalid(join(path_, key), "expected an integer");
        return v.get<long long>();
    }

    std::size_t count(const std::string& key, std::size_t fallback)
    {
        if (!has(key))
            return fallback;
        const long long v = integer(key);
        if (v < 0)
            invalid(join(path_, key), "must be non-negative");
        return std::size_t(v);
    }

    std::string string(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_string())
            invalid(join(path_, key), "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = get(key);
        if (!v.is_boolean())
            invalid(join(path_, key), "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_array())
            invalid(join(path_, key), "expected an array of numbers");
        std::vector<double> out;
        out.reserve(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                invalid(join(path_, key) + "[" + std::to_string(i) + "]",
                        "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                invalid(join(path_, item.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// runs a validate() and reports failures against the key path
template <typename F>
void check(const std::string& path, F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        invalid(path, e.what());
    }
}

} // namespace

json envelope_to_json(const EnvelopeSpec& spec)
{
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return {{"type", "gaussian"}, {"amplitude", s.amplitude},
                        {"center", s.center}, {"width", s.width}};
            } else if constexpr (std::is_same_v<T, SuperGaussian>) {
                return {{"type", "supergaussian"}, {"amplitude", s.amplitude},
                        {"center", s.center}, {"width", s.width},
                        {"order", s.order}};
            } else if constexpr (std::is_same_v<T, LinearRamp>) {
                return {{"type", "linear_ramp"}, {"g_start", s.g_start},
                        {"g_end", s.g_end}, {"t_start", s.t_start},
                        {"t_end", s.t_end}, {"shoulder", s.shoulder}};
            } else if constexpr (std::is_same_v<T, TanhStep>) {
                return {{"type", "tanh_step"}, {"g_low", s.g_low},
                        {"g_high", s.g_high}, {"t_mid", s.t_mid},
                        {"rise_time", s.rise_time}};
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return {{"type", "tabulated"}, {"tau", s.tau}, {"value", s.value}};
            } else {
                json parts = json::array();
                for (const auto& p : s.parts)
                    parts.push_back(envelope_to_json(p));
                return {{"type", "sum"}, {"parts", parts}};
            }
        },
        spec.shape);
}

EnvelopeSpec envelope_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    const std::string type = r.string("type");
    EnvelopeSpec spec;
    if (type == "gaussian") {
        spec = Gaussian{r.number("amplitude"), r.number("center", 0.0),
                        r.number("width")};
    } else if (type == "supergaussian") {
        const double a = r.number("amplitude");
        const double c = r.number("center", 0.0);
        const double w = r.number("width");
        const long long order = r.integer("order");
        spec = SuperGaussian{a, c, w, int(order)};
    } else if (type == "linear_ramp") {
        spec = LinearRamp{r.number("g_start"), r.number("g_end"),
                          r.number("t_start"), r.number("t_end"),
                          r.number("shoulder")};
    } else if (type == "tanh_step") {
        spec = TanhStep{r.number("g_low"), r.number("g_high"), r.number("t_mid"),
                        r.number("rise_time")};
    } else if (type == "tabulated") {
        spec = Tabulated{r.numbers("tau"), r.numbers("value")};
    } else if (type == "sum") {
        const json& parts = r.get("parts");
        if (!parts.is_array())
            invalid(r.path("parts"), "expected an array of envelopes");
        EnvelopeSum sum;
        for (std::size_t i = 0; i < parts.size(); ++i)
            sum.parts.push_back(envelope_from_json(
                parts[i], r.path("parts") + "[" + std::to_string(i) + "]"));
        spec = std::move(sum);
    } else {
        invalid(r.path("type"), "unknown envelope type '" + type + "'");
    }
    r.finish();
    check(path, [&] { validate(spec); });
    return spec;
}

json medium_to_json(const MediumSpec& m)
{
    return {{"kappa_p", m.kappa_p}, {"kappa_c", m.kappa_c}};
}

json tau_grid_to_json(const TauGrid& g)
{
    return {{"tau_min", g.tau_min}, {"tau_max", g.tau_max}, {"n_tau", g.n_tau}};
}

json zeta_grid_to_json(const ZetaGrid& g)
{
    return {{"zeta_max", g.zeta_max},
            {"n_zeta", g.n_zeta},
            {"snapshot_stride", g.snapshot_stride}};
}

json solver_config_to_json(const SolverConfig& c)
{
    return {{"atom_substeps", c.atom_substeps},
            {"unitarity_tol", c.unitarity_tol},
            {"max_field", c.max_field}};
}

MediumSpec medium_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    MediumSpec m;
    m.kappa_p = r.number("kappa_p", 1.0);
    m.kappa_c = r.number("kappa_c", 1.0);
    r.finish();
    check(path, [&] { m.validate(); });
    return m;
}

TauGrid tau_grid_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    TauGrid g;
    g.tau_min = r.number("tau_min", g.tau_min);
    g.tau_max = r.number("tau_max", g.tau_max);
    g.n_tau = r.count("n_tau", g.n_tau);
    r.finish();
    check(path, [&] { g.validate(); });
    return g;
}

ZetaGrid zeta_grid_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    ZetaGrid g;
    g.zeta_max = r.number("zeta_max", g.zeta_max);
    g.n_zeta = r.count("n_zeta", g.n_zeta);
    g.snapshot_stride = r.count("snapshot_stride", g.snapshot_stride);
    r.finish();
    check(path, [&] { g.validate(); });
    return g;
}

SolverConfig solver_config_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    SolverConfig c;
    if (r.has("atom_substeps"))
        c.atom_substeps = int(r.integer("atom_substeps"));
    c.unitarity_tol = r.number("unitarity_tol", c.unitarity_tol);
    c.max_field = r.number("max_field", c.max_field);
    r.finish();
    check(path, [&] { c.validate(); });
    return c;
}

namespace {

ExplicitSetup explicit_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    ExplicitSetup s;
    s.probe = envelope_from_json(r.get("probe"), r.path("probe"));
    s.coupling = envelope_from_json(r.get("coupling"), r.path("coupling"));
    if (r.has("medium"))
        s.medium = medium_from_json(r.get("medium"), r.path("medium"));
    if (r.has("tau_grid"))
        s.tau_grid = tau_grid_from_json(r.get("tau_grid"), r.path("tau_grid"));
    if (r.has("zeta_grid"))
        s.zeta_grid = zeta_grid_from_json(r.get("zeta_grid"), r.path("zeta_grid"));
    if (r.has("solver_config"))
        s.solver = solver_config_from_json(r.get("solver_config"),
                                           r.path("solver_config"));
    r.finish();
    return s;
}

DesignTarget design_from_json(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    DesignTarget d;
    d.target = envelope_from_json(r.get("target"), r.path("target"));
    d.baseline_v = envelope_from_json(r.get("baseline_v"), r.path("baseline_v"));
    d.depth = r.number("depth");
    if (!(d.depth >= 0.0))
        invalid(r.path("depth"), "must be >= 0");
    r.finish();
    return d;
}

// 1-based line and column of a byte offset
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

RunConfig parse_config(std::string_view text)
{
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte);
        std::ostringstream msg;
        msg << "line " << line << ", column " << col << ": " << e.what();
        throw Error(ErrorCode::ParseError, msg.str());
    }

    ObjectReader r(j, "");
    RunConfig c;
    if (r.has("version")) {
        const long long v = r.integer("version");
        if (v != 1)
            invalid("version", "unsupported schema version " + std::to_string(v));
    }
    if (r.has("scenario") == r.has("explicit"))
        invalid("scenario", "exactly one of 'scenario' and 'explicit' is required");
    if (r.has("scenario")) {
        c.scenario = r.string("scenario");
        bool known = false;
        for (const auto& s : builtin_scenarios())
            known = known || s.name == *c.scenario;
        if (!known)
            throw Error(ErrorCode::UnknownScenario,
                        "scenario: unknown scenario '" + *c.scenario + "'");
    } else {
        c.explicit_setup = explicit_from_json(r.get("explicit"), "explicit");
    }
    if (r.has("output_dir"))
        c.output_dir = r.string("output_dir");
    c.emit_plots = r.boolean("emit_plots", false);
    if (r.has("solver")) {
        const std::string s = r.string("solver");
        if (s == "direct")
            c.solver = SolverChoice::Direct;
        else if (s == "adiabatic")
            c.solver = SolverChoice::Adiabatic;
        else if (s == "both")
            c.solver = SolverChoice::Both;
        else
            invalid("solver", "expected direct, adiabatic or both");
    }
    if (r.has("design"))
        c.design = design_from_json(r.get("design"), "design");
    r.finish();
    return c;
}

json to_json(const RunConfig& c)
{
    json j;
    j["version"] = c.version;
    if (c.scenario)
        j["scenario"] = *c.scenario;
    if (c.explicit_setup) {
        const auto& s = *c.explicit_setup;
        j["explicit"] = {{"probe", envelope_to_json(s.probe)},
                         {"coupling", envelope_to_json(s.coupling)},
                         {"medium", medium_to_json(s.medium)},
                         {"tau_grid", tau_grid_to_json(s.tau_grid)},
                         {"zeta_grid", zeta_grid_to_json(s.zeta_grid)},
                         {"solver_config", solver_config_to_json(s.solver)}};
    }
    j["output_dir"] = c.output_dir;
    j["emit_plots"] = c.emit_plots;
    j["solver"] = std::string(solver_choice_name(c.solver));
    if (c.design)
        j["design"] = {{"target", envelope_to_json(c.design->target)},
                       {"baseline_v", envelope_to_json(c.design->baseline_v)},
                       {"depth", c.design->depth}};
    return j;
}

std::string serialize_config(const RunConfig& config)
{
    return to_json(config).dump(2) + "\n";
}

Scenario resolve_scenario(const RunConfig& config)
{
    Scenario s;
    if (config.scenario) {
        s = find_scenario(*config.scenario);
    } else if (config.explicit_setup) {
        const auto& e = *config.explicit_setup;
        s.name = "explicit";
        s.description = "explicit configuration";
        s.probe = e.probe;
        s.coupling = e.coupling;
        s.medium = e.medium;
        s.tau_grid = e.tau_grid;
        s.zeta_grid = e.zeta_grid;
        s.solver = e.solver;
    } else {
        throw Error(ErrorCode::ValidationError,
                    "scenario: configuration names no scenario");
    }
    if (config.design)
        s.design = config.design;
    return s;
}

} // namespace cpt
