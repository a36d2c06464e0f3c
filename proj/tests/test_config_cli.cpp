#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qbm/cli.hpp"
#include "qbm/config.hpp"

using namespace qbm;
namespace fs = std::filesystem;

#ifndef QBM_SOURCE_DIR
#error "QBM_SOURCE_DIR must point at the repository root"
#endif

namespace {

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string minimal_config() {
    return "[coefficients]\n"
           "p = const:1.0\n"
           "q = const:0.0\n"
           "r = const:0.05\n"
           "s = const:0.02\n"
           "\n"
           "[grid]\n"
           "x_min = -6\nx_max = 6\nx_n = 41\n"
           "y_min = -6\ny_max = 6\ny_n = 41\n"
           "\n"
           "[solver]\n"
           "dt = 0.005\n"
           "t_end = 0.02\n"
           "snapshot_stride = 2\n";
}

std::vector<Violation> violations_of(const std::string& cfg_path) {
    try {
        (void)parse_config(cfg_path);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    FAIL("expected ConfigError");
    return {};
}

bool any_violation(const std::vector<Violation>& vs,
                   const std::string& needle) {
    for (const auto& v : vs)
        if (v.key.find(needle) != std::string::npos ||
            v.message.find(needle) != std::string::npos)
            return true;
    return false;
}

// The published envelope contract, driven by the shipped schema document so
// the two cannot drift apart silently.
struct EnvelopeSchema {
    std::vector<std::string> required;
    std::vector<std::string> verdicts;
    std::regex tool_pattern;
};

EnvelopeSchema load_schema() {
    const fs::path p =
        fs::path(QBM_SOURCE_DIR) / "schemas" / "report.schema.json";
    const nlohmann::json schema = nlohmann::json::parse(slurp(p));
    CHECK(schema.at("type") == "object");
    CHECK(schema.at("additionalProperties") == false);
    EnvelopeSchema out;
    for (const auto& k : schema.at("required"))
        out.required.push_back(k.get<std::string>());
    for (const auto& v : schema.at("properties").at("verdict").at("enum"))
        out.verdicts.push_back(v.get<std::string>());
    out.tool_pattern = std::regex(
        schema.at("properties").at("tool").at("pattern").get<std::string>());
    return out;
}

void check_envelope(const fs::path& json_path, const EnvelopeSchema& schema) {
    INFO("report file: " << json_path.string());
    const nlohmann::json j = nlohmann::json::parse(slurp(json_path));
    REQUIRE(j.is_object());
    for (const auto& key : schema.required) REQUIRE(j.contains(key));
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& key : schema.required)
            if (item.key() == key) known = true;
        CHECK(known);
    }
    CHECK(j.at("report").is_string());
    CHECK(!j.at("report").get<std::string>().empty());
    CHECK(std::regex_match(j.at("tool").get<std::string>(),
                           schema.tool_pattern));
    bool verdict_ok = false;
    for (const auto& v : schema.verdicts)
        if (j.at("verdict") == v) verdict_ok = true;
    CHECK(verdict_ok);
    CHECK(j.at("data").is_object());
}

void check_all_reports(const fs::path& dir, const EnvelopeSchema& schema) {
    int seen = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") {
            check_envelope(e.path(), schema);
            ++seen;
        }
    CHECK(seen > 0);
}

} // namespace

TEST_CASE("a minimal configuration parses with documented defaults") {
    const fs::path dir = "test_tmp/cfg_minimal";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config());

    const RunConfig rc = parse_config(cfg.string());
    CHECK(rc.cs.m == 1.0);
    CHECK(rc.cs.hbar == 1.0);
    CHECK(rc.cs.p.eval(0.0) == 1.0);
    CHECK(rc.grid.x.n == 41);
    CHECK(rc.grid.y.min == -6.0);
    CHECK(rc.wgrid.min == -8.0);
    CHECK(rc.wgrid.max == 8.0);
    CHECK(rc.wgrid.n == 161);
    CHECK(rc.solver.dt == 0.005);
    CHECK(rc.solver.t_end == 0.02);
    CHECK(rc.solver.snapshot_stride == 2);
    CHECK(rc.initial.amp == 1.0);
    CHECK(rc.initial.rho == 0.0);
    CHECK(rc.out_dir == "out");
    CHECK(rc.write_snapshots);
    CHECK(rc.map_mass == 1.0);
    CHECK(rc.wave.kind == WaveKind::PlaneWave);
    CHECK(!rc.user_reduced.has_value());
}

TEST_CASE("every optional section lands in the parsed structure") {
    const fs::path dir = "test_tmp/cfg_full";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config() +
                        "\n[grid]\n" // reopening a section is allowed
                        "w_min = -5\nw_max = 5\nw_n = 201\n"
                        "\n[initial]\n"
                        "x0 = 0.4\ny0 = -0.3\nsx = 1.1\nsy = 0.9\n"
                        "rho = 0.2\namp = 2\n"
                        "\n[output]\n"
                        "directory = artifacts\nwrite_snapshots = false\n"
                        "\n[map]\n"
                        "mass = 1.5\ntau0_re = 0.1\ntau0_im = -0.2\n"
                        "kind = gaussian-packet\nk = 2\nsigma0 = 0.8\n"
                        "wave_amp = 1.1\n"
                        "\n[reduced]\n"
                        "S = const:1.0\nR = const:0.0\nqt = const:0.3\n"
                        "u_sigma = 1.2\nu_amp = 0.7\n");

    const RunConfig rc = parse_config(cfg.string());
    CHECK(rc.wgrid.n == 201);
    CHECK(rc.wgrid.min == -5.0);
    CHECK(rc.initial.x0 == 0.4);
    CHECK(rc.initial.rho == 0.2);
    CHECK(rc.initial.amp == 2.0);
    CHECK(rc.out_dir == "artifacts");
    CHECK_FALSE(rc.write_snapshots);
    CHECK(rc.map_mass == 1.5);
    CHECK(rc.tau0 == std::complex<double>(0.1, -0.2));
    CHECK(rc.wave.kind == WaveKind::GaussianPacket);
    CHECK(rc.wave.k == 2.0);
    CHECK(rc.wave.sigma0 == 0.8);
    CHECK(rc.wave.amp == 1.1);
    REQUIRE(rc.user_reduced.has_value());
    CHECK(rc.user_reduced->S.eval(0.0) == 1.0);
    CHECK(rc.user_reduced->qt.eval(0.0) == 0.3);
    CHECK(rc.u_sigma == 1.2);
    CHECK(rc.u_amp == 0.7);
}

TEST_CASE("the physical coefficient family routes through from_physical") {
    const fs::path dir = "test_tmp/cfg_physical";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, "[coefficients]\n"
                    "m = 2\nhbar = 1.5\n"
                    "omega2 = const:2.0\ngamma = const:0.5\n"
                    "h = const:0.1\nf = const:0.05\n"
                    "[grid]\n"
                    "x_min = -6\nx_max = 6\nx_n = 41\n"
                    "y_min = -6\ny_max = 6\ny_n = 41\n"
                    "[solver]\ndt = 0.005\nt_end = 0.02\n");
    const RunConfig rc = parse_config(cfg.string());
    const CoefficientSet want = from_physical(
        2.0, 1.5, Profile::constant(2.0), Profile::constant(0.5),
        Profile::constant(0.1), Profile::constant(0.05));
    for (double t : {0.0, 0.7}) {
        CHECK(rc.cs.p.eval(t) == want.p.eval(t));
        CHECK(rc.cs.q.eval(t) == want.q.eval(t));
        CHECK(rc.cs.r.eval(t) == want.r.eval(t));
        CHECK(rc.cs.s.eval(t) == want.s.eval(t));
    }
    CHECK(rc.cs.m == 2.0);
    CHECK(rc.cs.hbar == 1.5);
}

TEST_CASE("parsing collects every violation instead of stopping early") {
    const fs::path dir = "test_tmp/cfg_broken";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, "[coefficients]\n"
                    "p = const:1.0\n"
                    // q missing entirely
                    "r = const:0.05\n"
                    "s = quadratic:1\n" // unknown profile form
                    "[grid]\n"
                    "x_min = -6\nx_max = 6\nx_n = 41\n"
                    "y_min = -6\ny_max = 6\ny_n = 41\n"
                    "[solver]\n"
                    "dt = abc\n" // not a number
                    "t_end = 0.02\n"
                    "turbo = on\n"); // unknown key
    const auto vs = violations_of(cfg.string());
    CHECK(vs.size() >= 4);
    CHECK(any_violation(vs, "q"));
    CHECK(any_violation(vs, "quadratic"));
    CHECK(any_violation(vs, "dt"));
    CHECK(any_violation(vs, "turbo"));
}

TEST_CASE("duplicate keys report both line numbers") {
    const fs::path dir = "test_tmp/cfg_dup";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config() + "[solver]\ndt = 0.001\n");
    const auto vs = violations_of(cfg.string());
    REQUIRE(!vs.empty());
    CHECK(any_violation(vs, "first defined"));
    bool has_line = false;
    for (const auto& v : vs)
        if (v.line > 0) has_line = true;
    CHECK(has_line);
    // First occurrence wins: verify via a duplicate that would change dt.
}

TEST_CASE("unknown sections and mixed coefficient families are violations") {
    const fs::path dir = "test_tmp/cfg_mixed";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config() + "[turbo]\nlevel = 11\n");
    CHECK(any_violation(violations_of(cfg.string()), "turbo"));

    const fs::path cfg2 = dir / "run2.ini";
    write_text(cfg2, "[coefficients]\n"
                     "p = const:1.0\nq = const:0.0\n"
                     "r = const:0.05\ns = const:0.02\n"
                     "omega2 = const:1.0\n" // mixes the two families
                     "[grid]\n"
                     "x_min = -6\nx_max = 6\nx_n = 41\n"
                     "y_min = -6\ny_max = 6\ny_n = 41\n"
                     "[solver]\ndt = 0.005\nt_end = 0.02\n");
    CHECK(!violations_of(cfg2.string()).empty());

    // A partial [reduced] section (missing qt) is rejected too.
    const fs::path cfg3 = dir / "run3.ini";
    write_text(cfg3, minimal_config() +
                         "[reduced]\nS = const:1.0\nR = const:0.0\n");
    CHECK(any_violation(violations_of(cfg3.string()), "qt"));

    // Bad boolean.
    const fs::path cfg4 = dir / "run4.ini";
    write_text(cfg4, minimal_config() +
                         "[output]\nwrite_snapshots = maybe\n");
    CHECK(any_violation(violations_of(cfg4.string()), "write_snapshots"));
}

TEST_CASE("relative table paths resolve against the configuration file") {
    const fs::path dir = "test_tmp/cfg_table";
    fs::remove_all(dir);
    write_text(dir / "profiles" / "ramp.txt",
               "# doubling ramp\n0 0\n1 2\n2 4\n3 6\n");
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, "[coefficients]\n"
                    "p = table:profiles/ramp.txt\n"
                    "q = const:0.0\nr = const:0.05\ns = const:0.02\n"
                    "[grid]\n"
                    "x_min = -6\nx_max = 6\nx_n = 41\n"
                    "y_min = -6\ny_max = 6\ny_n = 41\n"
                    "[solver]\ndt = 0.005\nt_end = 0.02\n");
    const RunConfig rc = parse_config(cfg.string());
    CHECK(rc.cs.p.eval(1.5) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("the command line maps outcomes onto its exit-code contract") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({"solve2d"}) == 1); // --config is required
    const fs::path dir = "test_tmp/cli_exit";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config());
    CHECK(run({"verify", "--what", "nonsense", "--config", cfg.string()}) ==
          1);
    const fs::path broken = dir / "broken.ini";
    write_text(broken, "[solver]\ndt = 0.005\n");
    CHECK(run({"solve2d", "--config", broken.string()}) == 1);
}

TEST_CASE("solve2d produces a deterministic, schema-valid artifact tree") {
    const EnvelopeSchema schema = load_schema();
    const fs::path dir = "test_tmp/cli_solve";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config());

    const fs::path out_a = dir / "outA", out_b = dir / "outB";
    REQUIRE(run({"solve2d", "--config", cfg.string(), "--out",
                 out_a.string()}) == 0);
    REQUIRE(run({"solve2d", "--config", cfg.string(), "--out",
                 out_b.string()}) == 0);

    CHECK(fs::exists(out_a / "run_manifest.json"));
    CHECK(fs::exists(out_a / "snapshot_0000.csv"));
    CHECK(fs::exists(out_a / "snapshot_0000.json"));
    check_all_reports(out_a, schema);

    // Rerunning the same configuration yields byte-identical artifacts.
    std::map<std::string, std::string> a, b;
    for (const auto& e : fs::recursive_directory_iterator(out_a))
        if (e.is_regular_file())
            a[e.path().filename().string()] = slurp(e.path());
    for (const auto& e : fs::recursive_directory_iterator(out_b))
        if (e.is_regular_file())
            b[e.path().filename().string()] = slurp(e.path());
    REQUIRE(!a.empty());
    REQUIRE(a.size() == b.size());
    for (const auto& [name, content] : a) {
        REQUIRE(b.count(name) == 1);
        CHECK(content == b.at(name));
    }

    // No wall-clock or filesystem provenance may leak into the reports.
    const std::string manifest = slurp(out_a / "run_manifest.json");
    CHECK(manifest.find(fs::absolute(dir).string()) == std::string::npos);
}

TEST_CASE("verify conservation reports both masses and passes") {
    const EnvelopeSchema schema = load_schema();
    const fs::path dir = "test_tmp/cli_cons";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config());
    const fs::path out = dir / "out";
    REQUIRE(run({"verify", "--what", "conservation", "--config", cfg.string(),
                 "--out", out.string()}) == 0);
    const fs::path report = out / "conservation_report.json";
    check_envelope(report, schema);
    const nlohmann::json j = nlohmann::json::parse(slurp(report));
    CHECK(j.at("verdict") == "pass");
    CHECK(j.at("data").contains("initial_mass"));
    CHECK(j.at("data").contains("final_mass"));
}

TEST_CASE("the ermakov command emits the sampled solution and a report") {
    const EnvelopeSchema schema = load_schema();
    const fs::path dir = "test_tmp/cli_ermakov";
    fs::remove_all(dir);
    const fs::path out = dir / "out";
    REQUIRE(run({"ermakov", "--omega2", "const:0", "--K", "1", "--rho0", "1",
                 "--drho0", "0", "--t1", "1", "--dt", "0.001", "--out",
                 out.string()}) == 0);

    const std::string csv = slurp(out / "ermakov_solution.csv");
    CHECK(csv.rfind("T,rho,drho", 0) == 0);
    const fs::path report = out / "ermakov_report.json";
    check_envelope(report, schema);
    const nlohmann::json j = nlohmann::json::parse(slurp(report));
    CHECK(j.at("verdict") == "pass");
    CHECK(j.at("data").at("rho_final").get<double>() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));

    // A start on the pole is a usage error, not a crash.
    CHECK(run({"ermakov", "--omega2", "const:0", "--K", "1", "--rho0", "0",
               "--drho0", "0", "--t1", "1", "--dt", "0.001", "--out",
               out.string()}) == 1);
}

TEST_CASE("the bracket command tabulates the constant-coefficient algebra") {
    const EnvelopeSchema schema = load_schema();
    const fs::path dir = "test_tmp/cli_bracket";
    fs::remove_all(dir);
    const fs::path cfg = dir / "run.ini";
    write_text(cfg, minimal_config());
    const fs::path out = dir / "out";
    REQUIRE(run({"bracket", "--set", "constant", "--config", cfg.string(),
                 "--out", out.string()}) == 0);
    check_envelope(out / "bracket_report.json", schema);
}
