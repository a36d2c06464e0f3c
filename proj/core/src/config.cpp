#include "qbm/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

namespace qbm {

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
    std::string msg = "configuration has " + std::to_string(vs.size()) +
                      (vs.size() == 1 ? " problem:" : " problems:");
    for (const auto& v : vs) {
        msg += "\n  ";
        if (v.line > 0) msg += "line " + std::to_string(v.line) + " ";
        msg += "[" + v.key + "]: " + v.message;
    }
    return msg;
}

} // namespace

ConfigError::ConfigError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct RawEntry {
    long line = 0;
    std::string value;
};

struct ParsedFile {
    // section -> key -> all occurrences in file order
    std::map<std::string, std::map<std::string, std::vector<RawEntry>>> data;
    std::map<std::string, long> section_line; // first header occurrence
};

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"coefficients",
         {"m", "hbar", "p", "q", "r", "s", "omega2", "gamma", "h", "f"}},
        {"grid",
         {"x_min", "x_max", "x_n", "y_min", "y_max", "y_n", "w_min", "w_max",
          "w_n"}},
        {"solver", {"dt", "t_end", "snapshot_stride", "cfl_safety"}},
        {"initial", {"x0", "y0", "sx", "sy", "rho", "amp"}},
        {"output", {"directory", "write_snapshots"}},
        {"map",
         {"mass", "tau0_re", "tau0_im", "kind", "k", "sigma0", "wave_amp"}},
        {"reduced", {"S", "R", "qt", "u_sigma", "u_amp"}},
    };
    return k;
}

ParsedFile read_raw(const std::string& path, std::vector<Violation>& out) {
    ParsedFile pf;
    std::ifstream in(path);
    if (!in) {
        out.push_back({0, path, "cannot open configuration file"});
        return pf;
    }

    const auto& known = known_keys();
    std::string section;
    bool section_known = false;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;

        if (s.front() == '[') {
            if (s.back() != ']') {
                out.push_back({line_no, s, "malformed section header"});
                section.clear();
                section_known = false;
                continue;
            }
            section = trim(s.substr(1, s.size() - 2));
            section_known = known.count(section) > 0;
            if (!section_known)
                out.push_back({line_no, section, "unknown section"});
            if (pf.section_line.find(section) == pf.section_line.end())
                pf.section_line[section] = line_no;
            continue;
        }

        const size_t eq = s.find('=');
        if (eq == std::string::npos) {
            out.push_back({line_no, s, "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) {
            out.push_back({line_no, s, "empty key"});
            continue;
        }
        if (section.empty()) {
            out.push_back({line_no, key, "key outside any [section]"});
            continue;
        }
        if (!section_known) continue; // section already reported once
        if (!known.at(section).count(key)) {
            out.push_back({line_no, section + "." + key, "unknown key"});
            continue;
        }
        pf.data[section][key].push_back({line_no, value});
    }

    for (const auto& [sec, keys] : pf.data)
        for (const auto& [key, occ] : keys)
            for (size_t i = 1; i < occ.size(); ++i)
                out.push_back({occ[i].line, sec + "." + key,
                               "duplicate key (first defined at line " +
                                   std::to_string(occ[0].line) + ")"});
    return pf;
}

// Accumulating typed access on the raw table.
class Extractor {
  public:
    Extractor(const ParsedFile& pf, std::string base_dir,
              std::vector<Violation>& out)
        : pf_(pf), base_dir_(std::move(base_dir)), out_(out) {}

    bool has(const std::string& sec, const std::string& key) const {
        auto s = pf_.data.find(sec);
        if (s == pf_.data.end()) return false;
        return s->second.find(key) != s->second.end();
    }

    long section_line(const std::string& sec) const {
        auto it = pf_.section_line.find(sec);
        return it == pf_.section_line.end() ? 0 : it->second;
    }

    double number(const std::string& sec, const std::string& key,
                  std::optional<double> def) {
        const RawEntry* e = find(sec, key, def.has_value());
        if (!e) return def.value_or(0.0);
        char* end = nullptr;
        const double v = std::strtod(e->value.c_str(), &end);
        if (end == e->value.c_str() || *end != '\0') {
            fail(e->line, sec, key, "expected a number, got '" + e->value + "'");
            return def.value_or(0.0);
        }
        return v;
    }

    long integer(const std::string& sec, const std::string& key,
                 std::optional<long> def) {
        const RawEntry* e = find(sec, key, def.has_value());
        if (!e) return def.value_or(0);
        char* end = nullptr;
        const long v = std::strtol(e->value.c_str(), &end, 10);
        if (end == e->value.c_str() || *end != '\0') {
            fail(e->line, sec, key,
                 "expected an integer, got '" + e->value + "'");
            return def.value_or(0);
        }
        return v;
    }

    bool boolean(const std::string& sec, const std::string& key, bool def) {
        const RawEntry* e = find(sec, key, true);
        if (!e) return def;
        if (e->value == "true" || e->value == "1") return true;
        if (e->value == "false" || e->value == "0") return false;
        fail(e->line, sec, key,
             "expected true/false/1/0, got '" + e->value + "'");
        return def;
    }

    std::string text(const std::string& sec, const std::string& key,
                     const std::string& def) {
        const RawEntry* e = find(sec, key, true);
        return e ? e->value : def;
    }

    Profile profile(const std::string& sec, const std::string& key,
                    bool required) {
        const RawEntry* e = find(sec, key, !required);
        if (!e) return Profile::constant(0.0);
        try {
            return parse_profile_spec(e->value, base_dir_);
        } catch (const Error& err) {
            fail(e->line, sec, key, err.what());
            return Profile::constant(0.0);
        }
    }

    void fail(long line, const std::string& sec, const std::string& key,
              const std::string& message) {
        out_.push_back({line, sec + "." + key, message});
    }

  private:
    const RawEntry* find(const std::string& sec, const std::string& key,
                         bool optional) {
        auto s = pf_.data.find(sec);
        if (s != pf_.data.end()) {
            auto k = s->second.find(key);
            if (k != s->second.end()) return &k->second.front();
        }
        if (!optional)
            out_.push_back({section_line(sec), sec + "." + key,
                            "missing required key"});
        return nullptr;
    }

    const ParsedFile& pf_;
    std::string base_dir_;
    std::vector<Violation>& out_;
};

std::string dir_of(const std::string& path) {
    const size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".")
                                      : path.substr(0, slash);
}

} // namespace

RunConfig parse_config(const std::string& path) {
    std::vector<Violation> out;
    const ParsedFile pf = read_raw(path, out);
    if (!out.empty() && pf.data.empty()) throw ConfigError(std::move(out));

    Extractor ex(pf, dir_of(path), out);
    RunConfig rc;

    // --- coefficients -------------------------------------------------
    const double m = ex.number("coefficients", "m", 1.0);
    const double hbar = ex.number("coefficients", "hbar", 1.0);
    const bool direct = ex.has("coefficients", "p") ||
                        ex.has("coefficients", "q") ||
                        ex.has("coefficients", "r") || ex.has("coefficients", "s");
    const bool physical =
        ex.has("coefficients", "omega2") || ex.has("coefficients", "gamma") ||
        ex.has("coefficients", "h") || ex.has("coefficients", "f");
    if (direct && physical) {
        ex.fail(ex.section_line("coefficients"), "coefficients", "p",
                "mixes direct profiles (p,q,r,s) with physical inputs "
                "(omega2,gamma,h,f); give exactly one family");
    } else if (physical) {
        const Profile omega2 = ex.profile("coefficients", "omega2", true);
        const Profile gamma = ex.profile("coefficients", "gamma", true);
        const Profile h = ex.profile("coefficients", "h", true);
        const Profile f = ex.profile("coefficients", "f", true);
        try {
            rc.cs = from_physical(m, hbar, omega2, gamma, h, f);
        } catch (const Error& err) {
            ex.fail(ex.section_line("coefficients"), "coefficients", "m",
                    err.what());
        }
    } else {
        // Direct family (also the path taken when nothing is given, so the
        // four missing-key violations name coefficients.p .. coefficients.s).
        const Profile p = ex.profile("coefficients", "p", true);
        const Profile q = ex.profile("coefficients", "q", true);
        const Profile r = ex.profile("coefficients", "r", true);
        const Profile s = ex.profile("coefficients", "s", true);
        try {
            rc.cs = make_coefficients(m, hbar, p, q, r, s);
        } catch (const Error& err) {
            ex.fail(ex.section_line("coefficients"), "coefficients", "m",
                    err.what());
        }
    }

    // --- grid ----------------------------------------------------------
    {
        const double xmin = ex.number("grid", "x_min", std::nullopt);
        const double xmax = ex.number("grid", "x_max", std::nullopt);
        const long xn = ex.integer("grid", "x_n", std::nullopt);
        const double ymin = ex.number("grid", "y_min", std::nullopt);
        const double ymax = ex.number("grid", "y_max", std::nullopt);
        const long yn = ex.integer("grid", "y_n", std::nullopt);
        try {
            rc.grid = make_grid2d({xmin, xmax, int(xn)}, {ymin, ymax, int(yn)});
        } catch (const Error& err) {
            ex.fail(ex.section_line("grid"), "grid", "x_min", err.what());
        }
        const double wmin = ex.number("grid", "w_min", -8.0);
        const double wmax = ex.number("grid", "w_max", 8.0);
        const long wn = ex.integer("grid", "w_n", 161);
        try {
            rc.wgrid = make_grid1d(wmin, wmax, int(wn));
        } catch (const Error& err) {
            ex.fail(ex.section_line("grid"), "grid", "w_min", err.what());
        }
    }

    // --- solver ----------------------------------------------------------
    rc.solver.dt = ex.number("solver", "dt", std::nullopt);
    rc.solver.t_end = ex.number("solver", "t_end", std::nullopt);
    rc.solver.snapshot_stride = int(ex.integer("solver", "snapshot_stride", 10));
    rc.solver.cfl_safety = ex.number("solver", "cfl_safety", 0.4);

    // --- initial -----------------------------------------------------------
    rc.initial.x0 = ex.number("initial", "x0", 0.0);
    rc.initial.y0 = ex.number("initial", "y0", 0.0);
    rc.initial.sx = ex.number("initial", "sx", 1.0);
    rc.initial.sy = ex.number("initial", "sy", 1.0);
    rc.initial.rho = ex.number("initial", "rho", 0.0);
    rc.initial.amp = ex.number("initial", "amp", 1.0);

    // --- output ------------------------------------------------------------
    rc.out_dir = ex.text("output", "directory", "out");
    rc.write_snapshots = ex.boolean("output", "write_snapshots", true);

    // --- map -----------------------------------------------------------------
    rc.map_mass = ex.number("map", "mass", 1.0);
    rc.tau0 = {ex.number("map", "tau0_re", 0.0), ex.number("map", "tau0_im", 0.0)};
    const std::string kind = ex.text("map", "kind", "plane-wave");
    if (kind == "plane-wave") {
        rc.wave.kind = WaveKind::PlaneWave;
    } else if (kind == "gaussian-packet") {
        rc.wave.kind = WaveKind::GaussianPacket;
    } else if (ex.has("map", "kind")) {
        ex.fail(0, "map", "kind",
                "expected plane-wave or gaussian-packet, got '" + kind + "'");
    }
    rc.wave.k = ex.number("map", "k", 1.0);
    rc.wave.sigma0 = ex.number("map", "sigma0", 1.0);
    rc.wave.amp = ex.number("map", "wave_amp", 1.0);

    // --- reduced ------------------------------------------------------------
    const bool any_reduced =
        ex.has("reduced", "S") || ex.has("reduced", "R") || ex.has("reduced", "qt");
    if (any_reduced) {
        ReducedCoefficients ur;
        ur.S = ex.profile("reduced", "S", true);
        ur.R = ex.profile("reduced", "R", true);
        ur.qt = ex.profile("reduced", "qt", true);
        rc.user_reduced = std::move(ur);
    }
    rc.u_sigma = ex.number("reduced", "u_sigma", 1.0);
    rc.u_amp = ex.number("reduced", "u_amp", 1.0);

    if (!out.empty()) throw ConfigError(std::move(out));
    return rc;
}

} // namespace qbm
