#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "bjj/dynamics.hpp"
#include "bjj/errors.hpp"
#include "bjj/geomphase.hpp"
#include "bjj/model.hpp"
#include "bjj/portrait.hpp"
#include "bjj/spacecurve.hpp"

#ifndef BJJ_VERSION
#define BJJ_VERSION "0.0.0"
#endif

namespace bjj::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

namespace {

constexpr const char* kOutDirEnv = "BJJ_OUT_DIR";

struct Options {
    TrapParams params;
    bool units_of_v = false;
    State s0;
    std::optional<double> t_end;
    bool until_period = false;
    int periods = 1;
    std::string method = "adaptive";
    IntegratorConfig cfg;
    std::string out_dir;

    std::size_t points = 201;
    GridSpec grid;
    std::vector<std::string> seeds;
    bool fd_check = false;
    HyperfineParams hyperfine;
};

// Trajectory plus what the run learned about it.
struct Run {
    Trajectory traj;
    std::optional<double> period;
    std::optional<OrbitClass> orbit;  ///< unknown when the run is shorter than one period
};

class Writer {
public:
    Writer(fs::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

    void file(const std::string& name, const std::string& contents) {
        fs::create_directories(dir_);
        const fs::path path = dir_ / name;
        std::ofstream f(path, std::ios::binary);
        f << contents;
        if (!f) throw std::runtime_error("cannot write " + path.string());
        files_.push_back(name);
        out_ << path.string() << '\n';
    }

    const std::vector<std::string>& files() const { return files_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::ostream& out_;
    std::vector<std::string> files_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string row;
    for (const std::string& c : cells) {
        if (!row.empty()) row += ',';
        row += c;
    }
    row += '\n';
    return row;
}

std::string num(double x) { return format_number(x); }

ordered_json params_json(const TrapParams& p) { return {{"v", p.v}, {"lambda", p.lambda}, {"delta_e", p.delta_e}}; }

ordered_json config_json(const Options& o) {
    return {{"method", o.method},
            {"dt", o.cfg.dt},
            {"rel_tol", o.cfg.rel_tol},
            {"abs_tol", o.cfg.abs_tol},
            {"max_time", dynamics::resolved_max_time(o.params, o.cfg)},
            {"output_dt", o.cfg.output_dt},
            {"sample_stride", o.cfg.sample_stride}};
}

ordered_json orbit_json(const std::optional<OrbitClass>& c) {
    if (!c) return nullptr;
    return {{"kind", to_string(c->kind)}, {"trapped", c->trapped}, {"pi_type", c->pi_type}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

bool is_stationary(const TrapParams& p, const State& s) {
    const Velocity v = model::rhs(p, s);
    return std::hypot(v.first, v.phi) <= 1e-10;
}

Run acquire(const Options& o) {
    if (o.until_period) {
        if (is_stationary(o.params, o.s0)) {
            // A fixed point returns to itself at every time; report it over t_end.
            Trajectory traj = dynamics::integrate(o.params, o.s0, o.cfg, o.t_end.value_or(10.0));
            OrbitClass c = dynamics::classify_over(traj, 0.0);
            return {std::move(traj), std::nullopt, c};
        }
        PeriodResult r = dynamics::find_period(o.params, o.s0, o.cfg);
        if (o.periods == 1) return {std::move(r.trajectory), r.period, r.orbit};
        Trajectory traj = dynamics::integrate(o.params, o.s0, o.cfg, o.periods * r.period);
        return {std::move(traj), r.period, r.orbit};
    }
    Trajectory traj = dynamics::integrate(o.params, o.s0, o.cfg, o.t_end.value_or(10.0));
    std::optional<OrbitClass> c;
    try {
        c = dynamics::classify_orbit(traj);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientSpan) throw;
    }
    return {std::move(traj), std::nullopt, c};
}

std::vector<std::size_t> emitted_rows(const Trajectory& traj, std::size_t stride) {
    std::vector<std::size_t> rows;
    const std::size_t n = traj.samples().size();
    for (std::size_t i = 0; i < n; i += stride) rows.push_back(i);
    if (rows.back() != n - 1) rows.push_back(n - 1);
    return rows;
}

ordered_json run_summary(const Run& r) {
    ordered_json j;
    j["t_end"] = r.traj.t_end();
    j["period"] = r.period ? ordered_json(*r.period) : ordered_json(nullptr);
    j["orbit"] = orbit_json(r.orbit);
    j["energy0"] = r.traj.energy0();
    j["energy_drift"] = dynamics::energy_drift(r.traj);
    return j;
}

ordered_json cmd_simulate(const Options& o, Writer& w) {
    const Run r = acquire(o);
    std::string csv = csv_row({"t", "z", "phi", "alpha", "H", "A_d", "A_s"});
    for (const std::size_t i : emitted_rows(r.traj, o.cfg.sample_stride)) {
        const Sample& s = r.traj.samples()[i];
        csv += csv_row({num(s.t), num(s.z), num(s.phi), num(s.state().alpha()),
                        num(model::hamiltonian(o.params, s.state())), num(s.a_d), num(s.a_s)});
    }
    w.file("trajectory.csv", csv);
    return run_summary(r);
}

ordered_json cmd_phase(const Options& o, Writer& w) {
    const Run r = acquire(o);
    const auto reports = geomphase::phase_series(r.traj, o.points);
    std::string csv = csv_row({"t", "phi_g", "delta", "phi_d_gaugefree", "gamma_g"});
    double residual = 0.0;
    for (const PhaseReport& rep : reports) {
        const double gamma_g = spacecurve::gamma_phases(r.traj, rep.t).gamma_g;
        residual = std::max(residual, std::abs(gamma_g + 2.0 * rep.phi_g));
        csv += csv_row({num(rep.t), num(rep.phi_g), num(rep.delta), num(rep.phi_d_gaugefree), num(gamma_g)});
    }
    w.file("phase.csv", csv);

    ordered_json s;
    s["params"] = params_json(o.params);
    s["initial_state"] = {{"z", o.s0.z}, {"phi", o.s0.phi}};
    s["cyclic"] = reports.back().cyclic;
    s["T_m"] = r.period ? ordered_json(*r.period) : ordered_json(nullptr);
    s["periods"] = r.period ? o.periods : 0;
    s["orbit"] = orbit_json(r.orbit);
    if (r.period) {
        const PhaseReport one = geomphase::geometric_phase(r.traj, *r.period);
        s["omega"] = one.omega_solid;
        s["phi_g_T_m"] = one.phi_g;
        s["delta_T_m"] = one.delta;
    } else {
        s["omega"] = reports.back().cyclic ? ordered_json(reports.back().omega_solid) : ordered_json(nullptr);
        s["phi_g_T_m"] = nullptr;
        s["delta_T_m"] = nullptr;
    }
    s["phi_g_final"] = reports.back().phi_g;
    s["gamma_g_residual"] = residual;
    w.file("phase_summary.json", dump(s));
    return run_summary(r);
}

State parse_seed(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::InvalidArgument, "seed must read \"z,phi\": " + text);
    try {
        std::size_t used_z = 0, used_phi = 0;
        const std::string zs = text.substr(0, comma), ps = text.substr(comma + 1);
        const double z = std::stod(zs, &used_z);
        const double phi = std::stod(ps, &used_phi);
        if (used_z != zs.size() || used_phi != ps.size()) throw std::invalid_argument(text);
        if (std::abs(z) > 1.0) throw Error(ErrorKind::InvalidArgument, "seed z must lie in [-1, 1]: " + text);
        return {z, phi};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidArgument, "seed must read \"z,phi\": " + text);
    }
}

ordered_json cmd_portrait(const Options& o, Writer& w) {
    std::vector<State> seeds;
    for (const std::string& s : o.seeds) seeds.push_back(parse_seed(s));
    const HamiltonianGrid grid = portrait::hamiltonian_grid(o.params, o.grid);

    std::string csv = csv_row({"phi", "z", "H"});
    for (std::size_t i = 0; i < grid.grid.n_z; ++i) {
        for (std::size_t j = 0; j < grid.grid.n_phi; ++j) {
            csv += csv_row({num(grid.grid.phi_at(j)), num(grid.grid.z_at(i)), num(grid.value(i, j))});
        }
    }
    w.file("portrait_grid.csv", csv);

    ordered_json j;
    j["params"] = params_json(o.params);
    j["grid"] = {{"phi_min", o.grid.phi_min}, {"phi_max", o.grid.phi_max}, {"z_min", o.grid.z_min},
                 {"z_max", o.grid.z_max},     {"n_phi", o.grid.n_phi},     {"n_z", o.grid.n_z},
                 {"layout", "row-major, z outer, phi inner"}};
    ordered_json pts = ordered_json::array();
    for (const FixedPoint& f : model::fixed_points(o.params)) {
        pts.push_back({{"z", f.state.z},
                       {"phi", f.state.phi},
                       {"stability", to_string(f.stability)},
                       {"energy", model::hamiltonian(o.params, f.state)}});
    }
    j["fixed_points"] = pts;
    const auto sep = portrait::separatrix_energy(o.params);
    j["separatrix_energy"] = sep ? ordered_json(*sep) : ordered_json(nullptr);
    j["rotational_levels"] = portrait::has_rotational_levels(o.params, grid);
    ordered_json contours = ordered_json::array();
    for (const State& s : seeds) {
        const OrbitLevel lvl = portrait::orbit_level(o.params, s, grid);
        ordered_json poly = ordered_json::array();
        for (const State& v : lvl.contour.points) poly.push_back({v.phi, v.z});
        contours.push_back({{"seed", {{"z", s.z}, {"phi", s.phi}}},
                            {"energy", lvl.energy},
                            {"closed", lvl.contour.closed},
                            {"rotational", lvl.contour.rotational},
                            {"points", poly}});
    }
    j["contours"] = contours;
    w.file("portrait.json", dump(j));
    return {{"fixed_points", pts.size()}, {"contours", contours.size()}};
}

// Largest relative deviations between closed forms and central differences of the Bloch path.
struct FdCheck {
    double curvature = 0.0;
    double torsion = 0.0;
    std::size_t points = 0;
};

FdCheck finite_difference_check(const TrapParams& p, const Trajectory& traj) {
    FdCheck out;
    const double h = 1e-3;
    const double t_end = traj.t_end();
    for (double t = 2 * h; t <= t_end - 2 * h; t += std::max(h, t_end / 500.0)) {
        const Eigen::Vector3d m = geomphase::bloch_vector(traj.at(t - h).state());
        const Eigen::Vector3d c = geomphase::bloch_vector(traj.at(t).state());
        const Eigen::Vector3d q = geomphase::bloch_vector(traj.at(t + h).state());
        const Eigen::Vector3d d1 = (q - m) / (2 * h);
        const Eigen::Vector3d d2 = (q - 2 * c + m) / (h * h);
        const State s = traj.at(t).state();
        const double k = spacecurve::curvature(p, s);
        if (k <= spacecurve::kMinCurvature) continue;
        out.curvature = std::max(out.curvature, std::abs(d1.norm() - k) / k);
        if (k >= 0.1) {
            const double tau = spacecurve::torsion_at(p, s);
            const double tau_fd = c.dot(d1.cross(d2)) / d1.squaredNorm();
            out.torsion = std::max(out.torsion, std::abs(tau_fd - tau) / std::max(std::abs(tau), 1e-300));
        }
        ++out.points;
    }
    return out;
}

ordered_json cmd_curve(const Options& o, Writer& w) {
    const Run r = acquire(o);
    std::string csv = csv_row({"t", "K", "tau", "alpha1", "alpha2", "alpha3", "beta_F", "arclength"});
    double k_min = INFINITY, k_max = 0, tau_min = INFINITY, tau_max = -INFINITY;
    for (const std::size_t i : emitted_rows(r.traj, o.cfg.sample_stride)) {
        const Sample& s = r.traj.samples()[i];
        const State st = s.state();
        const double k = spacecurve::curvature(o.params, st);
        const FrameCoefficients c = spacecurve::frame_coefficients(o.params, st, 0.0, 0.0);
        std::string tau_cell, beta_cell;
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
        if (k >= spacecurve::kMinCurvature) {
            const double tau = spacecurve::torsion_at(o.params, st);
            tau_min = std::min(tau_min, tau);
            tau_max = std::max(tau_max, tau);
            tau_cell = num(tau);
            beta_cell = num(spacecurve::frenet_gauge(o.params, st));
        }
        csv += csv_row({num(s.t), num(k), tau_cell, num(c.alpha1), num(c.alpha2), num(c.alpha3), beta_cell,
                        num(s.a_s)});
    }
    w.file("curve.csv", csv);

    const GammaPhases g = spacecurve::gamma_phases(r.traj, r.traj.t_end());
    ordered_json s;
    s["params"] = params_json(o.params);
    s["t_end"] = r.traj.t_end();
    s["period"] = r.period ? ordered_json(*r.period) : ordered_json(nullptr);
    s["gamma_p"] = g.gamma_p;
    s["gamma_d"] = g.gamma_d;
    s["gamma_g"] = g.gamma_g;
    s["phi_g"] = geomphase::geometric_phase(r.traj, r.traj.t_end()).phi_g;
    s["arclength"] = spacecurve::fubini_study_length(r.traj, r.traj.t_end());
    s["curvature_range"] = {k_min, k_max};
    s["torsion_range"] = std::isfinite(tau_min) ? ordered_json{tau_min, tau_max} : ordered_json(nullptr);
    bool fd_ok = true;
    if (o.fd_check) {
        const FdCheck fd = finite_difference_check(o.params, r.traj);
        fd_ok = fd.curvature < 1e-4 && fd.torsion < 1e-3;
        s["fd_check"] = {{"curvature_rel_err", fd.curvature},
                         {"torsion_rel_err", fd.torsion},
                         {"points", fd.points},
                         {"passed", fd_ok}};
    }
    w.file("curve_summary.json", dump(s));
    if (!fd_ok) throw Error(ErrorKind::StepFailure, "finite-difference cross-check exceeded its tolerance");
    return run_summary(r);
}

ordered_json cmd_fixed_points(const Options& o, Writer& w, std::ostream& out) {
    ordered_json pts = ordered_json::array();
    for (const FixedPoint& f : model::fixed_points(o.params)) {
        pts.push_back({{"z", f.state.z},
                       {"phi", f.state.phi},
                       {"stability", to_string(f.stability)},
                       {"energy", model::hamiltonian(o.params, f.state)}});
    }
    const auto sep = portrait::separatrix_energy(o.params);
    ordered_json j{{"params", params_json(o.params)},
                   {"fixed_points", pts},
                   {"separatrix_energy", sep ? ordered_json(*sep) : ordered_json(nullptr)}};
    w.file("fixed_points.json", dump(j));
    out << dump(j);
    return {{"fixed_points", pts.size()}};
}

ordered_json cmd_map_hyperfine(const Options& o, Writer& w, std::ostream& out) {
    const TrapParams p = model::map_hyperfine(o.hyperfine);
    const ordered_json j = params_json(p);
    w.file("params.json", dump(j));
    out << dump(j);
    return j;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::NegativeCoupling:
            return kUsage;
        case ErrorKind::UndefinedPhase:
            return kUndefinedPhase;
        default:
            return kNumerical;
    }
}

void add_shared(CLI::App& app, Options& o) {
    app.add_option("--v", o.params.v, "Tunneling amplitude V (>= 0)")->capture_default_str();
    app.add_option("--lambda", o.params.lambda, "Interaction parameter Lambda")->capture_default_str();
    app.add_option("--delta-e", o.params.delta_e, "Well asymmetry Delta E")->capture_default_str();
    app.add_flag("--units-of-v", o.units_of_v, "Divide Lambda and Delta E by V and set V = 1");
    app.add_option("--z0", o.s0.z, "Initial population imbalance")->capture_default_str();
    app.add_option("--phi0", o.s0.phi, "Initial relative phase")->capture_default_str();
    auto* t_end = app.add_option("--t-end", o.t_end, "Integration time (default 10)");
    auto* until = app.add_flag("--until-period", o.until_period, "Integrate exactly one detected period");
    t_end->excludes(until);
    app.add_option("--periods", o.periods, "Number of periods with --until-period")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--method", o.method, "Integrator")
        ->check(CLI::IsMember({"adaptive", "rk4"}))
        ->capture_default_str();
    app.add_option("--dt", o.cfg.dt, "Fixed step (rk4) or initial step (adaptive)")->capture_default_str();
    app.add_option("--rtol", o.cfg.rel_tol, "Adaptive relative tolerance")->capture_default_str();
    app.add_option("--atol", o.cfg.abs_tol, "Adaptive absolute tolerance")->capture_default_str();
    app.add_option("--max-time", o.cfg.max_time, "Period-search cap (default 200/V)");
    app.add_option("--output-dt", o.cfg.output_dt, "Sample spacing of adaptive runs")->capture_default_str();
    app.add_option("--stride", o.cfg.sample_stride, "Write every n-th sample")->capture_default_str();
    app.add_option("--out", o.out_dir, "Output directory (default $BJJ_OUT_DIR or .)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();

    Options o;
    CLI::App app{"Two-mode Bose Josephson junction dynamics and geometric phases", "bjj"};
    app.set_version_flag("--version", BJJ_VERSION);
    app.set_config("--config", "", "Read options from a TOML/INI file; flags on the command line win");
    app.require_subcommand(1);
    app.fallthrough();
    add_shared(app, o);

    auto* simulate = app.add_subcommand("simulate", "Integrate an orbit and write t,z,phi,alpha,H,A_d,A_s");
    auto* phase = app.add_subcommand("phase", "Geometric-phase series along an orbit");
    phase->add_option("--points", o.points, "Number of evenly spaced report times")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
        ->capture_default_str();
    auto* portrait_cmd = app.add_subcommand("portrait", "Hamiltonian grid, fixed points and level sets");
    portrait_cmd->add_option("--phi-min", o.grid.phi_min)->capture_default_str();
    portrait_cmd->add_option("--phi-max", o.grid.phi_max)->capture_default_str();
    portrait_cmd->add_option("--z-min", o.grid.z_min)->capture_default_str();
    portrait_cmd->add_option("--z-max", o.grid.z_max)->capture_default_str();
    portrait_cmd->add_option("--n-phi", o.grid.n_phi)->capture_default_str();
    portrait_cmd->add_option("--n-z", o.grid.n_z)->capture_default_str();
    portrait_cmd->add_option("--seed", o.seeds, "Trace the level set through \"z,phi\" (repeatable)");
    auto* curve = app.add_subcommand("curve", "Curvature, torsion and frame coefficients along an orbit");
    curve->add_flag("--fd-check", o.fd_check, "Cross-check K and tau by finite differences");
    auto* fixed = app.add_subcommand("fixed-points", "List stationary states with their stability");
    auto* hyper = app.add_subcommand("map-hyperfine", "Map hyperfine coefficients to (V, Lambda, Delta E)");
    hyper->add_option("--alpha0", o.hyperfine.alpha0)->capture_default_str();
    hyper->add_option("--beta0", o.hyperfine.beta0)->capture_default_str();
    hyper->add_option("--gamma0", o.hyperfine.gamma0)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (o.units_of_v) o.params = model::in_units_of_v(o.params);
        model::validate(o.params);
        o.cfg.method = o.method == "rk4" ? Method::Rk4 : Method::Adaptive;
        o.cfg.validate();
        if (o.out_dir.empty()) {
            const char* env = std::getenv(kOutDirEnv);
            o.out_dir = env && *env ? env : ".";
        }
        Writer w(o.out_dir, out);

        std::string command;
        ordered_json results;
        if (*simulate) {
            command = "simulate";
            results = cmd_simulate(o, w);
        } else if (*phase) {
            command = "phase";
            results = cmd_phase(o, w);
        } else if (*portrait_cmd) {
            command = "portrait";
            results = cmd_portrait(o, w);
        } else if (*curve) {
            command = "curve";
            results = cmd_curve(o, w);
        } else if (*fixed) {
            command = "fixed-points";
            results = cmd_fixed_points(o, w, out);
        } else {
            command = "map-hyperfine";
            results = cmd_map_hyperfine(o, w, out);
        }

        ordered_json inputs{{"command", command},
                            {"params", params_json(o.params)},
                            {"initial_state", {{"z", o.s0.z}, {"phi", o.s0.phi}}},
                            {"integrator", config_json(o)},
                            {"t_end", o.t_end ? ordered_json(*o.t_end) : ordered_json(nullptr)},
                            {"until_period", o.until_period},
                            {"periods", o.periods},
                            {"points", o.points},
                            {"grid", {o.grid.phi_min, o.grid.phi_max, o.grid.z_min, o.grid.z_max,
                                      o.grid.n_phi, o.grid.n_z}},
                            {"seeds", o.seeds},
                            {"fd_check", o.fd_check},
                            {"hyperfine", {o.hyperfine.alpha0, o.hyperfine.beta0, o.hyperfine.gamma0}}};
        ordered_json m;
        m["tool"] = "bjj";
        m["version"] = BJJ_VERSION;
        m["command"] = command;
        m["argv"] = args;
        m["config"] = app.config_to_str(false, false);
        m["units_of_v"] = o.units_of_v;
        for (const char* key : {"params", "initial_state", "integrator"}) m[key] = inputs[key];
        ordered_json options = inputs;
        for (const char* key : {"command", "params", "initial_state", "integrator"}) options.erase(key);
        m["options"] = options;
        m["input_hash"] = "fnv1a64:" + fnv1a_hex(inputs.dump());
        m["started_at"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(started)));
        m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m["outputs"] = w.files();
        m["results"] = results;
        const std::string manifest_name = command + "_manifest.json";
        m["outputs"].push_back(manifest_name);
        w.file(manifest_name, dump(m));
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace bjj::cli
