#include "cptshape/persist.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cptshape/core.hpp"

namespace cpt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* table_header =
    "tau\tre_gp\tim_gp\tre_gc\tim_gc\tre_a1\tim_a1\tre_a2\tim_a2\tre_a3\tim_a3"
    "\ttheta\tV\trho21_abs";
constexpr std::size_t table_columns = 14;

void append_number(std::string& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

std::string snapshot_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%04zu.tsv", k);
    return buf;
}

ErrorCode code_from_name(const std::string& name)
{
    for (int c = 0; c <= int(ErrorCode::UnknownScenario); ++c)
        if (code_name(ErrorCode(c)) == name)
            return ErrorCode(c);
    throw Error(ErrorCode::ParseError, "unknown error code '" + name + "'");
}

json diag_to_json(const SnapshotDiagnostics& d)
{
    return {{"conservation_residual", d.conservation_residual},
            {"adiabaticity_max", d.adiabaticity_max},
            {"unitarity_residual", d.unitarity_residual}};
}

json pulse_to_json(const PulseMetrics& m)
{
    return {{"peak", m.peak},
            {"fwhm", m.fwhm},
            {"energy", m.energy},
            {"centroid", m.centroid},
            {"n_local_maxima", m.n_local_maxima},
            {"top_flatness", m.top_flatness}};
}

std::string plot_envelopes(const std::vector<std::string>& files)
{
    std::ostringstream s;
    s << "# |g_p| and |g_c| versus retarded time at every recorded depth\n"
      << "set terminal pngcairo size 1000,800\n"
      << "set output 'envelopes.png'\n"
      << "set multiplot layout 2,1\n"
      << "set xlabel 'tau'\n"
      << "files = \"";
    for (std::size_t i = 0; i < files.size(); ++i)
        s << (i ? " " : "") << files[i];
    s << "\"\n"
      << "set ylabel '|g_p|'\n"
      << "plot for [f in files] f every ::1 using 1:(sqrt($2**2+$3**2)) "
         "with lines notitle\n"
      << "set ylabel '|g_c|'\n"
      << "plot for [f in files] f every ::1 using 1:(sqrt($4**2+$5**2)) "
         "with lines notitle\n"
      << "unset multiplot\n";
    return s.str();
}

std::string plot_surface(const std::vector<std::string>& files,
                         const std::vector<double>& zeta, int column,
                         const std::string& label, const std::string& output)
{
    std::ostringstream s;
    s << "# " << label << " over (tau, zeta)\n"
      << "set terminal pngcairo size 1000,700\n"
      << "set output '" << output << "'\n"
      << "set xlabel 'tau'\nset ylabel 'zeta'\nset zlabel '" << label << "'\n"
      << "set hidden3d\nset view 60,30\n"
      << "splot \\\n";
    for (std::size_t i = 0; i < files.size(); ++i) {
        char z[32];
        std::snprintf(z, sizeof z, "%.17g", zeta[i]);
        s << "  '" << files[i] << "' every 4::1 using 1:(" << z << "):" << column
          << " with lines notitle" << (i + 1 < files.size() ? ", \\\n" : "\n");
    }
    return s.str();
}

} // namespace

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_file_atomic(const fs::path& path, std::string_view content)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        f.write(content.data(), std::streamsize(content.size()));
        if (!f)
            throw Error(ErrorCode::IoError, "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::IoError,
                    "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string snapshot_table(const Snapshot& snap, const TauGrid& grid,
                           const MediumSpec& medium)
{
    const auto& f = snap.fields;
    const auto& a = snap.atoms;
    const auto theta = mixing_angle(f);
    const auto v = photon_invariant(f, medium);
    std::string out = table_header;
    out += '\n';
    out.reserve(f.size() * table_columns * 25);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double row[table_columns] = {
            grid.at(i),      f.g_p[i].real(), f.g_p[i].imag(), f.g_c[i].real(),
            f.g_c[i].imag(), a.a1[i].real(),  a.a1[i].imag(),  a.a2[i].real(),
            a.a2[i].imag(),  a.a3[i].real(),  a.a3[i].imag(),  theta[i],
            v[i],            std::abs(std::conj(a.a2[i]) * a.a1[i])};
        for (std::size_t c = 0; c < table_columns; ++c) {
            if (c)
                out += '\t';
            append_number(out, row[c]);
        }
        out += '\n';
    }
    return out;
}

json metrics_to_json(const DiagnosticsReport& r)
{
    json j;
    j["conservation_residual_max"] = r.conservation_residual_max;
    j["unitarity_residual_max"] = r.unitarity_residual_max;
    j["adiabaticity_max"] = r.adiabaticity_max;
    j["coherence"] = {{"localization_fraction", r.localization_fraction},
                      {"max", r.coherence_max}};
    json snaps = json::array();
    for (const auto& s : r.snapshots) {
        json e = {{"zeta", s.zeta},
                  {"probe", pulse_to_json(s.probe)},
                  {"coupling", pulse_to_json(s.coupling)},
                  {"diagnostics", diag_to_json(s.diag)}};
        if (s.slopes)
            e["edge_slopes"] = {{"leading_max_slope", s.slopes->leading_max_slope},
                                {"trailing_max_slope", s.slopes->trailing_max_slope}};
        snaps.push_back(std::move(e));
    }
    j["snapshots"] = std::move(snaps);
    if (!r.cross_validation.empty()) {
        json cv = json::array();
        for (const auto& c : r.cross_validation)
            cv.push_back({{"zeta", c.zeta},
                          {"probe_l2", c.post_shock ? json(nullptr) : json(c.probe_l2)},
                          {"coupling_l2",
                           c.post_shock ? json(nullptr) : json(c.coupling_l2)},
                          {"post_shock", c.post_shock}});
        j["cross_validation"] = std::move(cv);
    }
    return j;
}

fs::path persist_result(const SimulationResult& result,
                        const DiagnosticsReport& report, const fs::path& dir,
                        const PersistOptions& options)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::IoError,
                    "cannot create " + dir.string() + ": " + ec.message());

    json manifest;
    manifest["format"] = "cptshape-result";
    manifest["format_version"] = 1;
    manifest["tool_version"] = result.manifest.version;
    manifest["solver"] = result.manifest.solver;
    manifest["config"] = options.config_echo;
    manifest["tau_grid"] = {{"tau_min", result.tau_grid.tau_min},
                            {"tau_max", result.tau_grid.tau_max},
                            {"n_tau", result.tau_grid.n_tau}};
    manifest["zeta_grid"] = {{"zeta_max", result.zeta_grid.zeta_max},
                             {"n_zeta", result.zeta_grid.n_zeta},
                             {"snapshot_stride", result.zeta_grid.snapshot_stride}};
    manifest["medium"] = {{"kappa_p", result.medium.kappa_p},
                          {"kappa_c", result.medium.kappa_c}};
    manifest["solver_config"] = {{"atom_substeps", result.manifest.config.atom_substeps},
                                 {"unitarity_tol", result.manifest.config.unitarity_tol},
                                 {"max_field", result.manifest.config.max_field}};
    manifest["valid"] = result.valid;
    if (!result.valid) {
        manifest["failure"] = std::string(code_name(result.failure));
        manifest["failure_message"] = result.failure_message;
    }
    manifest["steps_taken"] = result.manifest.steps_taken;

    std::vector<std::string> files;
    std::vector<double> zeta;
    json snaps = json::array();
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
        const auto& s = result.snapshots[k];
        const std::string name = snapshot_name(k);
        const std::string table = snapshot_table(s, result.tau_grid, result.medium);
        write_file_atomic(dir / name, table);
        snaps.push_back({{"file", name},
                         {"zeta", s.fields.zeta},
                         {"sha256", sha256_hex(table)},
                         {"diagnostics", diag_to_json(s.diag)}});
        files.push_back(name);
        zeta.push_back(s.fields.zeta);
    }
    manifest["snapshots"] = std::move(snaps);

    json metrics = metrics_to_json(report);
    for (const auto& item : options.extra_metrics.items())
        metrics[item.key()] = item.value();
    const std::string metrics_text = metrics.dump(2) + "\n";
    write_file_atomic(dir / "metrics.json", metrics_text);
    json hashes = {{"metrics.json", sha256_hex(metrics_text)}};

    if (options.emit_plots && !files.empty()) {
        const std::pair<std::string, std::string> scripts[] = {
            {"plot_envelopes.gp", plot_envelopes(files)},
            {"plot_coherence.gp",
             plot_surface(files, zeta, 14, "|rho21|", "coherence.png")},
            {"plot_angle.gp", plot_surface(files, zeta, 12, "theta", "angle.png")},
        };
        for (const auto& [name, text] : scripts) {
            write_file_atomic(dir / name, text);
            hashes[name] = sha256_hex(text);
        }
    }
    manifest["files"] = std::move(hashes);

    const fs::path manifest_path = dir / "manifest.json";
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    const json info = {{"wall_time_s", result.manifest.wall_time_s}};
    write_file_atomic(dir / "run_info.json", info.dump(2) + "\n");
    return manifest_path;
}

namespace {

json load_json(const fs::path& path)
{
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

Snapshot parse_table(const std::string& text, const std::string& name)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != table_header)
        throw Error(ErrorCode::ParseError, name + ": unexpected header");
    Snapshot s;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty())
            continue;
        double v[table_columns];
        const char* p = line.c_str();
        for (std::size_t c = 0; c < table_columns; ++c) {
            char* end = nullptr;
            v[c] = std::strtod(p, &end);
            if (end == p)
                throw Error(ErrorCode::ParseError,
                            name + ": bad number on line " + std::to_string(row));
            p = end;
        }
        s.fields.g_p.emplace_back(v[1], v[2]);
        s.fields.g_c.emplace_back(v[3], v[4]);
        s.atoms.a1.emplace_back(v[5], v[6]);
        s.atoms.a2.emplace_back(v[7], v[8]);
        s.atoms.a3.emplace_back(v[9], v[10]);
    }
    return s;
}

} // namespace

SimulationResult load_result(const fs::path& dir)
{
    const json m = load_json(dir / "manifest.json");
    SimulationResult r;
    try {
        if (m.at("format") != "cptshape-result")
            throw Error(ErrorCode::ParseError, "not a result manifest");
        const auto& tg = m.at("tau_grid");
        r.tau_grid = {tg.at("tau_min").get<double>(), tg.at("tau_max").get<double>(),
                      tg.at("n_tau").get<std::size_t>()};
        const auto& zg = m.at("zeta_grid");
        r.zeta_grid = {zg.at("zeta_max").get<double>(), zg.at("n_zeta").get<std::size_t>(),
                       zg.at("snapshot_stride").get<std::size_t>()};
        r.medium = {m.at("medium").at("kappa_p").get<double>(),
                    m.at("medium").at("kappa_c").get<double>()};
        const auto& sc = m.at("solver_config");
        r.manifest.config = {sc.at("atom_substeps").get<int>(),
                             sc.at("unitarity_tol").get<double>(),
                             sc.at("max_field").get<double>()};
        r.manifest.solver = m.at("solver").get<std::string>();
        r.manifest.version = m.at("tool_version").get<std::string>();
        r.manifest.steps_taken = m.at("steps_taken").get<std::size_t>();
        r.valid = m.at("valid").get<bool>();
        if (!r.valid) {
            r.failure = code_from_name(m.at("failure").get<std::string>());
            r.failure_message = m.at("failure_message").get<std::string>();
        }
        for (const auto& e : m.at("snapshots")) {
            const std::string name = e.at("file").get<std::string>();
            const std::string text = read_file(dir / name);
            if (sha256_hex(text) != e.at("sha256").get<std::string>())
                throw Error(ErrorCode::IoError, name + ": content hash mismatch");
            Snapshot s = parse_table(text, name);
            if (s.fields.size() != r.tau_grid.n_tau)
                throw Error(ErrorCode::ParseError, name + ": row count mismatch");
            s.fields.zeta = e.at("zeta").get<double>();
            const auto& d = e.at("diagnostics");
            s.diag.conservation_residual = d.at("conservation_residual").get<double>();
            s.diag.adiabaticity_max = d.at("adiabaticity_max").get<double>();
            s.diag.unitarity_residual = d.at("unitarity_residual").get<double>();
            r.snapshots.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, "manifest: " + std::string(e.what()));
    }
    const fs::path info = dir / "run_info.json";
    if (fs::exists(info)) {
        try {
            r.manifest.wall_time_s = load_json(info).at("wall_time_s").get<double>();
        } catch (const json::exception&) {
        }
    }
    return r;
}

} // namespace cpt
