#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "cli.hpp"

namespace fs = std::filesystem;
using bjj::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("bjj_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

const std::vector<std::string> kLibration{"--v", "1", "--lambda", "5", "--delta-e", "0", "--z0", "0.3", "--phi0", "0"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    for (double x : {0.3, -1.0 / 3.0, 1e-300, 2.683300160991706, 6.02214076e23}) {
        CHECK(std::stod(bjj::cli::format_number(x)) == x);
    }
    CHECK(bjj::cli::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(bjj::cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("simulate: closed orbit") {
    const fs::path dir = scratch("simulate");
    const Result r = invoke(with({"simulate", "--until-period", "--out", dir.string()}, kLibration));
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "trajectory.csv");
    REQUIRE(rows.size() > 10);
    CHECK(rows[0] == std::vector<std::string>{"t", "z", "phi", "alpha", "H", "A_d", "A_s"});
    const auto& first = rows[1];
    const auto& last = rows.back();
    CHECK(std::abs(std::stod(last[1]) - std::stod(first[1])) < 1e-6);
    CHECK(std::abs(std::stod(last[2]) - std::stod(first[2])) < 1e-6);
    CHECK(std::stod(first[1]) == 0.3);
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.find('\r') == std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(dir / "simulate_manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["params"]["lambda"] == 5.0);
    CHECK(manifest["outputs"].size() == 2);
    for (const auto& f : manifest["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
    CHECK(manifest["input_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("simulate: fixed point and stride") {
    const fs::path dir = scratch("fixed");
    REQUIRE(invoke({"simulate", "--z0", "0", "--phi0", "0", "--delta-e", "0", "--lambda", "2", "--t-end", "1",
                    "--stride", "100", "--out", dir.string()})
                .code == 0);
    const auto rows = read_csv(dir / "trajectory.csv");
    CHECK(rows.size() == 12);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] == "0");
        CHECK(rows[i][2] == "0");
    }
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    const Result pole = invoke({"simulate", "--z0", "0.99999999999", "--out", dir.string()});
    CHECK(pole.code == 3);
    CHECK(pole.err.find("PoleProximity") != std::string::npos);
    CHECK(invoke({"simulate", "--bogus"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"simulate", "--v", "-1", "--out", dir.string()}).code == 2);
    CHECK(invoke({"simulate", "--method", "euler"}).code == 2);
    CHECK(invoke({"simulate", "--t-end", "1", "--until-period"}).code == 2);
    CHECK(invoke({"portrait", "--n-z", "1", "--out", dir.string()}).code == 2);
    CHECK(invoke({"portrait", "--z-min", "0.5", "--z-max", "0.1", "--out", dir.string()}).code == 2);
    CHECK(invoke({"map-hyperfine", "--gamma0", "1", "--out", dir.string()}).code == 2);
    CHECK(invoke({"phase", "--v", "0", "--lambda", "0", "--delta-e", "1", "--z0", "0", "--phi0", "0", "--t-end",
                  "3.141592653589793", "--points", "3", "--out", dir.string()})
              .code == 4);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("phase: summary and stationary input") {
    const fs::path dir = scratch("phase");
    REQUIRE(invoke(with({"phase", "--until-period", "--points", "50", "--out", dir.string()}, kLibration)).code == 0);
    const auto rows = read_csv(dir / "phase.csv");
    CHECK(rows[0] == std::vector<std::string>{"t", "phi_g", "delta", "phi_d_gaugefree", "gamma_g"});
    CHECK(rows.size() == 51);
    const auto s = nlohmann::json::parse(slurp(dir / "phase_summary.json"));
    CHECK(s["cyclic"] == true);
    CHECK(s["T_m"].get<double>() > 0);
    CHECK(std::abs(s["phi_g_T_m"].get<double>() + 0.5 * s["omega"].get<double>()) < 1e-5);
    CHECK(s["gamma_g_residual"].get<double>() < 1e-12);
    CHECK(std::stod(rows.back()[1]) == s["phi_g_final"].get<double>());

    const fs::path still = scratch("phase_still");
    REQUIRE(invoke({"phase", "--lambda", "5", "--z0", "0", "--phi0", "0", "--until-period", "--points", "7", "--out",
                    still.string()})
                .code == 0);
    for (const auto& row : read_csv(still / "phase.csv")) {
        if (row[0] == "t") continue;
        for (std::size_t c = 1; c < row.size(); ++c) CHECK(std::stod(row[c]) == 0.0);
    }
}

TEST_CASE("portrait: regimes") {
    const fs::path weak = scratch("portrait_weak");
    REQUIRE(invoke({"portrait", "--lambda", "0.5", "--n-phi", "60", "--n-z", "60", "--out", weak.string()}).code == 0);
    auto j = nlohmann::json::parse(slurp(weak / "portrait.json"));
    CHECK(j["fixed_points"].size() == 2);
    for (const auto& f : j["fixed_points"]) CHECK(f["stability"] == "center");
    CHECK(j["separatrix_energy"].is_null());
    const auto grid = read_csv(weak / "portrait_grid.csv");
    CHECK(grid[0] == std::vector<std::string>{"phi", "z", "H"});
    CHECK(grid.size() == 1 + 60 * 60);

    const fs::path mid = scratch("portrait_mid");
    REQUIRE(invoke({"portrait", "--lambda", "1.3", "--n-phi", "60", "--n-z", "60", "--out", mid.string()}).code == 0);
    j = nlohmann::json::parse(slurp(mid / "portrait.json"));
    int pi_centres = 0;
    for (const auto& f : j["fixed_points"]) {
        if (f["stability"] == "center" && std::abs(std::abs(f["z"].get<double>()) - 0.638971) < 1e-6) ++pi_centres;
    }
    CHECK(pi_centres == 2);

    const fs::path asym = scratch("portrait_asym");
    REQUIRE(invoke({"portrait", "--lambda", "0", "--delta-e", "1", "--n-phi", "40", "--n-z", "40", "--seed", "0.3,0",
                    "--out", asym.string()})
                .code == 0);
    j = nlohmann::json::parse(slurp(asym / "portrait.json"));
    for (const auto& f : j["fixed_points"]) CHECK(std::abs(std::abs(f["z"].get<double>()) - std::sqrt(0.5)) < 1e-9);
    CHECK(j["contours"].size() == 1);
    CHECK(invoke({"portrait", "--seed", "bad", "--out", asym.string()}).code == 2);
}

TEST_CASE("curve: sentinels, helix and finite-difference check") {
    const fs::path dir = scratch("curve");
    REQUIRE(invoke(with({"curve", "--until-period", "--fd-check", "--out", dir.string()}, kLibration)).code == 0);
    const auto rows = read_csv(dir / "curve.csv");
    CHECK(rows[0] == std::vector<std::string>{"t", "K", "tau", "alpha1", "alpha2", "alpha3", "beta_F", "arclength"});
    const auto s = nlohmann::json::parse(slurp(dir / "curve_summary.json"));
    CHECK(s["fd_check"]["passed"] == true);
    CHECK(std::abs(s["gamma_g"].get<double>() + 2 * s["phi_g"].get<double>()) < 1e-12);

    const fs::path helix = scratch("curve_helix");
    REQUIRE(invoke({"curve", "--v", "0", "--lambda", "5", "--z0", "0.5", "--t-end", "2", "--out", helix.string()}).code == 0);
    for (const auto& row : read_csv(helix / "curve.csv")) {
        if (row[0] == "t") continue;
        CHECK(std::abs(std::stod(row[1]) - 2.5 * std::sqrt(0.75)) < 1e-9);
        CHECK(std::abs(std::stod(row[2]) - 1.25) < 1e-9);
    }

    const fs::path still = scratch("curve_still");
    REQUIRE(invoke({"curve", "--lambda", "5", "--z0", "0", "--phi0", "0", "--t-end", "0.01", "--out", still.string()}).code == 0);
    const auto flat = read_csv(still / "curve.csv");
    CHECK(flat[1][2].empty());
    CHECK(flat[1][6].empty());
}

TEST_CASE("fixed-points and map-hyperfine print JSON") {
    const fs::path dir = scratch("json");
    const Result fp = invoke({"fixed-points", "--lambda", "1.3", "--out", dir.string()});
    REQUIRE(fp.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "fixed_points.json"));
    CHECK(j["fixed_points"].size() == 4);
    CHECK(j["separatrix_energy"].get<double>() == doctest::Approx(1.0));

    REQUIRE(invoke({"map-hyperfine", "--alpha0", "0", "--beta0", "2.5", "--gamma0", "-1", "--out", dir.string()}).code == 0);
    const auto p = nlohmann::json::parse(slurp(dir / "params.json"));
    CHECK(p["v"] == 1.0);
    CHECK(p["lambda"] == 5.0);
    CHECK(p["delta_e"] == 0.0);
    REQUIRE(invoke({"map-hyperfine", "--gamma0", "-1", "--out", dir.string()}).code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "params.json"))["v"] == 1.0);
}

TEST_CASE("units of V, config files and replay") {
    const fs::path dir = scratch("units");
    REQUIRE(invoke({"fixed-points", "--v", "2", "--lambda", "2.6", "--units-of-v", "--out", dir.string()}).code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "fixed_points.json"));
    CHECK(j["params"]["lambda"].get<double>() == doctest::Approx(1.3));
    CHECK(j["params"]["v"] == 1.0);

    const fs::path cfg_dir = scratch("config");
    fs::create_directories(cfg_dir);
    {
        std::ofstream cfg(cfg_dir / "run.toml");
        cfg << "v = 1\nlambda = 5\nz0 = 0.9\nphi0 = 0.0\nuntil-period = true\n";
    }
    REQUIRE(invoke({"phase", "--config", (cfg_dir / "run.toml").string(), "--z0", "0.3", "--out",
                    (cfg_dir / "a").string()})
                .code == 0);
    REQUIRE(invoke(with({"phase", "--until-period", "--out", (cfg_dir / "b").string()}, kLibration)).code == 0);
    CHECK(slurp(cfg_dir / "a" / "phase.csv") == slurp(cfg_dir / "b" / "phase.csv"));

    const auto manifest = nlohmann::json::parse(slurp(cfg_dir / "b" / "phase_manifest.json"));
    {
        std::ofstream replay(cfg_dir / "replay.ini");
        replay << manifest["config"].get<std::string>();
    }
    REQUIRE(invoke({"phase", "--config", (cfg_dir / "replay.ini").string(), "--out", (cfg_dir / "c").string()}).code == 0);
    CHECK(slurp(cfg_dir / "b" / "phase.csv") == slurp(cfg_dir / "c" / "phase.csv"));
}

TEST_CASE("output directory from the environment") {
    const fs::path dir = scratch("env");
    ::setenv("BJJ_OUT_DIR", dir.string().c_str(), 1);
    const Result r = invoke({"map-hyperfine", "--gamma0", "-2"});
    ::unsetenv("BJJ_OUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "params.json"));
}

TEST_CASE("determinism") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const fs::path& d : {a, b}) {
        REQUIRE(invoke(with({"curve", "--until-period", "--out", d.string()}, kLibration)).code == 0);
    }
    CHECK(slurp(a / "curve.csv") == slurp(b / "curve.csv"));
    CHECK(slurp(a / "curve_summary.json") == slurp(b / "curve_summary.json"));
}
