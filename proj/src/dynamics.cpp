#include "bjj/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "bjj/errors.hpp"
#include "bjj/spacecurve.hpp"

namespace odeint = boost::numeric::odeint;

namespace bjj {

const char* to_string(OrbitKind k) {
    switch (k) {
        case OrbitKind::Libration: return "libration";
        case OrbitKind::Rotation: return "rotation";
        case OrbitKind::Stationary: return "stationary";
    }
    return "unknown";
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "tolerances must be > 0");
    }
    if (!(output_dt > 0.0) || !std::isfinite(output_dt)) {
        throw Error(ErrorKind::InvalidArgument, "output_dt must be > 0");
    }
    if (std::isnan(max_time)) throw Error(ErrorKind::InvalidArgument, "max_time must be a number");
    if (sample_stride == 0) throw Error(ErrorKind::InvalidArgument, "sample_stride must be >= 1");
}

namespace {

using Vec = std::array<double, 5>;  // z, phi, a_d, a_s, a_h

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Sample to_sample(double t, const Vec& x) { return {t, x[0], x[1], x[2], x[3], x[4]}; }

struct System {
    TrapParams p;
    void operator()(const Vec& x, Vec& dxdt, double /*t*/) const {
        const Sample d = dynamics::derivative(p, {0.0, x[0], x[1], x[2], x[3], x[4]});
        dxdt = {d.z, d.phi, d.a_d, d.a_s, d.a_h};
    }
};

void check_accepted(const Vec& x, double t) {
    for (const double v : x) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::StepFailure, "non-finite state at t = " + std::to_string(t));
        }
    }
    if (std::abs(x[0]) > 1.0 - kPoleEpsilon) {
        throw Error(ErrorKind::PoleProximity, "orbit reached |z| > 1 - 1e-9 at t = " + std::to_string(t));
    }
}

void check_initial(const TrapParams& p, const State& s0) {
    model::validate(p);
    if (!std::isfinite(s0.z) || !std::isfinite(s0.phi)) {
        throw Error(ErrorKind::InvalidArgument, "initial state must be finite");
    }
    if (std::abs(s0.z) > 1.0 - kPoleEpsilon) {
        throw Error(ErrorKind::PoleProximity, "initial |z| exceeds 1 - 1e-9");
    }
}

auto make_dense(const IntegratorConfig& cfg) {
    return odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_dopri5<Vec>());
}

template <class Dense>
void advance(Dense& stepper, const System& sys) {
    try {
        stepper.do_step(sys);
    } catch (const odeint::step_adjustment_error& e) {
        throw Error(ErrorKind::StepFailure, e.what());
    }
    const double t = stepper.current_time();
    check_accepted(stepper.current_state(), t);
    if (!(stepper.current_time_step() > 1e-14 * std::max(1.0, std::abs(t)))) {
        throw Error(ErrorKind::StepFailure, "step size underflow at t = " + std::to_string(t));
    }
}

double wrapped(double dphi) { return std::remainder(dphi, kTwoPi); }

double distance2(const State& s0, double z, double phi) {
    const double dz = z - s0.z;
    const double dp = wrapped(phi - s0.phi);
    return dz * dz + dp * dp;
}

bool is_fixed_point(const TrapParams& p, const State& s) {
    const Velocity v = model::rhs(p, s);
    return std::hypot(v.first, v.phi) <= 1e-10;
}

}  // namespace

Trajectory::Trajectory(TrapParams params, std::vector<Sample> samples)
    : params_(params), samples_(std::move(samples)) {
    if (samples_.empty()) throw Error(ErrorKind::InvalidArgument, "trajectory needs at least one sample");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (!(samples_[i].t > samples_[i - 1].t)) {
            throw Error(ErrorKind::InvalidArgument, "sample times must be strictly increasing");
        }
    }
    energy0_ = model::hamiltonian(params_, samples_.front().state());
}

Sample Trajectory::at(double t) const {
    if (!(t >= samples_.front().t && t <= samples_.back().t)) {
        throw Error(ErrorKind::OutOfRange, "t = " + std::to_string(t) + " outside trajectory span");
    }
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const Sample& s, double v) { return s.t < v; });
    if (it->t == t) return *it;
    const Sample& b = *it;
    const Sample& a = *(it - 1);
    const double h = b.t - a.t;
    const double u = (t - a.t) / h;
    const Sample da = dynamics::derivative(params_, a);
    const Sample db = dynamics::derivative(params_, b);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    auto mix = [&](double ya, double yb, double dya, double dyb) {
        return h00 * ya + h10 * h * dya + h01 * yb + h11 * h * dyb;
    };
    return {t,
            mix(a.z, b.z, da.z, db.z),
            mix(a.phi, b.phi, da.phi, db.phi),
            mix(a.a_d, b.a_d, da.a_d, db.a_d),
            mix(a.a_s, b.a_s, da.a_s, db.a_s),
            mix(a.a_h, b.a_h, da.a_h, db.a_h)};
}

Trajectory Trajectory::truncated(double t) const {
    const Sample last = at(t);
    std::vector<Sample> out;
    for (const Sample& s : samples_) {
        if (s.t >= t) break;
        out.push_back(s);
    }
    if (out.empty() || last.t > out.back().t) out.push_back(last);
    return Trajectory(params_, std::move(out));
}

namespace dynamics {

Sample derivative(const TrapParams& p, const Sample& s) {
    const State st{s.z, s.phi};
    const Velocity v = model::rhs_unchecked(p, st);
    const double half_sin = std::sin(0.5 * std::acos(std::clamp(s.z, -1.0, 1.0)));
    return {1.0,
            v.first,
            v.phi,
            half_sin * half_sin * v.phi,
            spacecurve::curvature(p, st),
            0.5 * (s.z - 1.0) * v.phi};
}

double resolved_max_time(const TrapParams& p, const IntegratorConfig& cfg) {
    if (cfg.max_time > 0.0) return cfg.max_time;
    if (p.v > 0.0) return 200.0 / p.v;
    const double rate = std::abs(p.lambda) + std::abs(p.delta_e);
    return rate > 0.0 ? 200.0 / rate : 200.0;
}

Trajectory integrate(const TrapParams& p, const State& s0, const IntegratorConfig& cfg, double t_end) {
    check_initial(p, s0);
    cfg.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorKind::InvalidArgument, "t_end must be > 0");
    }
    const System sys{p};
    Vec x{s0.z, s0.phi, 0.0, 0.0, 0.0};
    std::vector<Sample> samples{to_sample(0.0, x)};

    if (cfg.method == Method::Rk4) {
        const auto steps = static_cast<std::size_t>(std::ceil(t_end / cfg.dt - 1e-9));
        const double h = t_end / static_cast<double>(steps);
        samples.reserve(steps + 1);
        odeint::runge_kutta4<Vec> rk4;
        for (std::size_t k = 1; k <= steps; ++k) {
            const double t0 = h * static_cast<double>(k - 1);
            rk4.do_step(sys, x, t0, h);
            const double t = k == steps ? t_end : h * static_cast<double>(k);
            check_accepted(x, t);
            samples.push_back(to_sample(t, x));
        }
        return Trajectory(p, std::move(samples));
    }

    auto stepper = make_dense(cfg);
    stepper.initialize(x, 0.0, std::min(cfg.dt, t_end));
    const auto n_grid = static_cast<std::size_t>(std::floor(t_end / cfg.output_dt));
    samples.reserve(n_grid + 2);
    auto emit = [&](double t) {
        while (stepper.current_time() < t) advance(stepper, sys);
        Vec out;
        stepper.calc_state(t, out);
        samples.push_back(to_sample(t, out));
    };
    for (std::size_t k = 1; k <= n_grid; ++k) {
        const double t = cfg.output_dt * static_cast<double>(k);
        if (t_end - t <= 1e-9 * cfg.output_dt) break;
        emit(t);
    }
    emit(t_end);
    return Trajectory(p, std::move(samples));
}

OrbitClass classify_over(const Trajectory& traj, double period) {
    const TrapParams& p = traj.params();
    const State s0 = traj.front().state();
    OrbitClass out;
    if (is_fixed_point(p, s0)) {
        out.kind = OrbitKind::Stationary;
        out.trapped = std::abs(s0.z) > 1e-12;
        out.pi_type = std::cos(s0.phi) < 0.0;
        return out;
    }
    if (!(period <= traj.t_end() * (1.0 + 1e-12))) {
        throw Error(ErrorKind::InsufficientSpan, "trajectory shorter than its period");
    }
    const Sample end = traj.at(std::min(period, traj.t_end()));
    const double winding = end.phi - s0.phi;
    double zmin = s0.z, zmax = s0.z, mean_cos = 0.0, mean_sin = 0.0;
    std::size_t n = 0;
    for (const Sample& s : traj.samples()) {
        if (s.t > period) break;
        zmin = std::min(zmin, s.z);
        zmax = std::max(zmax, s.z);
        mean_cos += std::cos(s.phi);
        mean_sin += std::sin(s.phi);
        ++n;
    }
    out.kind = std::abs(winding) > std::numbers::pi ? OrbitKind::Rotation : OrbitKind::Libration;
    out.trapped = zmin * zmax > 0.0;
    out.pi_type = out.kind == OrbitKind::Libration && n > 0 &&
                  std::cos(std::atan2(mean_sin, mean_cos)) < 0.0;
    return out;
}

OrbitClass classify_orbit(const Trajectory& traj) {
    const TrapParams& p = traj.params();
    const State s0 = traj.front().state();
    if (is_fixed_point(p, s0)) return classify_over(traj, 0.0);

    // First local minimum of the distance to s0 that follows a local maximum
    // and is small relative to the largest excursion seen.
    const auto& samples = traj.samples();
    double d2max = 0.0;
    bool passed_max = false;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const double dm = distance2(s0, samples[i - 1].z, samples[i - 1].phi);
        const double d = distance2(s0, samples[i].z, samples[i].phi);
        const double dp = distance2(s0, samples[i + 1].z, samples[i + 1].phi);
        d2max = std::max(d2max, d);
        if (d >= dm && d > dp) passed_max = true;
        if (passed_max && d <= dm && d < dp && d < std::min(1e-4, 1e-3 * d2max)) {
            return classify_over(traj, samples[i].t);
        }
    }
    throw Error(ErrorKind::InsufficientSpan, "no recurrence to the initial state within the trajectory");
}

PeriodResult find_period(const TrapParams& p, const State& s0, const IntegratorConfig& cfg) {
    check_initial(p, s0);
    cfg.validate();
    if (is_fixed_point(p, s0)) {
        throw Error(ErrorKind::FixedPointInput, "initial state is stationary");
    }
    const double max_time = resolved_max_time(p, cfg);
    const System sys{p};
    auto stepper = make_dense(cfg);
    stepper.initialize(Vec{s0.z, s0.phi, 0.0, 0.0, 0.0}, 0.0, cfg.dt);

    // g is half the time derivative of the squared distance to s0.
    auto eval = [&](double t, double& d2) {
        Vec x;
        stepper.calc_state(t, x);
        const Velocity v = model::rhs_unchecked(p, {x[0], x[1]});
        d2 = distance2(s0, x[0], x[1]);
        return (x[0] - s0.z) * v.first + wrapped(x[1] - s0.phi) * v.phi;
    };

    constexpr int kSubsteps = 8;
    double d2max = 0.0;
    bool passed_max = false;
    double t_prev = 0.0;
    double g_prev = 0.0;
    bool have_prev = false;
    while (stepper.current_time() < max_time) {
        advance(stepper, sys);
        const double ta = stepper.previous_time();
        const double tb = stepper.current_time();
        for (int k = 1; k <= kSubsteps; ++k) {
            const double t = ta + (tb - ta) * k / kSubsteps;
            double d2 = 0.0;
            const double g = eval(t, d2);
            d2max = std::max(d2max, d2);
            if (have_prev && g_prev > 0.0 && g <= 0.0) passed_max = true;
            if (have_prev && passed_max && g_prev < 0.0 && g >= 0.0) {
                double lo = t_prev, hi = t;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    double d2m = 0.0;
                    (eval(mid, d2m) < 0.0 ? lo : hi) = mid;
                }
                double d2_lo = 0.0, d2_hi = 0.0;
                eval(lo, d2_lo);
                eval(hi, d2_hi);
                const double t_min = d2_lo <= d2_hi ? lo : hi;
                if (std::min(d2_lo, d2_hi) < std::min(1e-4, 1e-3 * d2max)) {
                    Trajectory traj = integrate(p, s0, cfg, t_min);
                    const OrbitClass orbit = classify_over(traj, t_min);
                    return {t_min, std::move(traj), orbit};
                }
            }
            t_prev = t;
            g_prev = g;
            have_prev = true;
        }
    }
    throw Error(ErrorKind::NoRecurrence, "no return to the initial state within t = " + std::to_string(max_time));
}

double energy_drift(const Trajectory& traj) {
    const double e0 = traj.energy0();
    const double scale = std::max(1.0, std::abs(e0));
    double drift = 0.0;
    for (const Sample& s : traj.samples()) {
        drift = std::max(drift, std::abs(model::hamiltonian(traj.params(), s.state()) - e0) / scale);
    }
    return drift;
}

}  // namespace dynamics
}  // namespace bjj
