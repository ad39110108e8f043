#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "bjj/dynamics.hpp"
#include "bjj/errors.hpp"
#include "bjj/oracles.hpp"

using namespace bjj;
using bjj::test::kPi;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

IntegratorConfig rk4(double dt) {
    IntegratorConfig cfg;
    cfg.method = Method::Rk4;
    cfg.dt = dt;
    return cfg;
}

const TrapParams kLambda5{1, 5, 0};

}  // namespace

TEST_CASE("integrate: fixed point stays put") {
    const Trajectory traj = dynamics::integrate({1, 3, 0}, {0, 0}, {}, 2.0);
    CHECK(traj.front().t == 0.0);
    CHECK(traj.t_end() == 2.0);
    for (const Sample& s : traj.samples()) {
        CHECK(s.z == 0.0);
        CHECK(s.phi == 0.0);
        CHECK(s.a_d == 0.0);
    }
    CHECK(dynamics::energy_drift(traj) == 0.0);
}

TEST_CASE("integrate: initial rate of z") {
    const Trajectory traj = dynamics::integrate({1, 0, 0}, {0, kPi / 2}, {}, 1e-2);
    const Sample s = traj.at(1e-3);
    CHECK(s.z == doctest::Approx(-1e-3).epsilon(1e-6));
    CHECK(traj.back().z < traj.at(5e-3).z);
}

TEST_CASE("integrate: one period returns to the start (fine RK4 reference)") {
    const PeriodResult r = dynamics::find_period(kLambda5, {0.3, 0}, {});
    const Trajectory ref = dynamics::integrate(kLambda5, {0.3, 0}, rk4(1e-5), r.period);
    CHECK(std::abs(ref.back().z - 0.3) < 1e-6);
    CHECK(std::abs(test::wrap(ref.back().phi)) < 1e-6);
    CHECK(std::abs(r.trajectory.back().z - ref.back().z) < 1e-8);
    CHECK(std::abs(r.trajectory.back().phi - ref.back().phi) < 1e-8);
}

TEST_CASE("integrate: error paths") {
    CHECK(kind_of([] { dynamics::integrate(kLambda5, {0.99999999999, 0}, {}, 1.0); }) == ErrorKind::PoleProximity);
    CHECK(kind_of([] { dynamics::integrate(kLambda5, {0.3, 0}, {}, -1.0); }) == ErrorKind::InvalidArgument);
    IntegratorConfig bad;
    bad.dt = 0;
    CHECK(kind_of([&] { dynamics::integrate(kLambda5, {0.3, 0}, bad, 1.0); }) == ErrorKind::InvalidArgument);
    IntegratorConfig tiny;
    tiny.rel_tol = tiny.abs_tol = 1e-300;
    CHECK(kind_of([&] { dynamics::integrate(kLambda5, {0.3, 0}, tiny, 1.0); }) == ErrorKind::StepFailure);
}

TEST_CASE("trajectory interpolation and truncation") {
    const Trajectory traj = dynamics::integrate(kLambda5, {0.3, 0}, {}, 1.0);
    const Sample& s = traj.samples()[100];
    CHECK(traj.at(s.t).z == s.z);
    const Sample mid = traj.at(0.10005);
    const Trajectory fine = dynamics::integrate(kLambda5, {0.3, 0}, [] {
        IntegratorConfig c;
        c.output_dt = 5e-5;
        return c;
    }(), 0.2);
    CHECK(std::abs(mid.z - fine.at(0.10005).z) < 1e-11);
    CHECK(std::abs(mid.a_d - fine.at(0.10005).a_d) < 1e-11);
    CHECK_THROWS_AS(traj.at(1.5), Error);
    const Trajectory cut = traj.truncated(0.4321);
    CHECK(cut.t_end() == 0.4321);
    CHECK(cut.back().z == traj.at(0.4321).z);
    CHECK_THROWS_AS(Trajectory(kLambda5, {}), Error);
    CHECK_THROWS_AS(Trajectory(kLambda5, {Sample{0.0}, Sample{0.0}}), Error);
}

TEST_CASE("find_period: orbit types at Lambda = 5 and 0.5") {
    const PeriodResult lib = dynamics::find_period(kLambda5, {0.3, 0}, {});
    CHECK(lib.period > 0);
    CHECK(lib.orbit.kind == OrbitKind::Libration);
    CHECK_FALSE(lib.orbit.trapped);
    CHECK_FALSE(lib.orbit.pi_type);
    CHECK(lib.trajectory.t_end() == lib.period);

    const PeriodResult rot = dynamics::find_period(kLambda5, {0.9, 0}, {});
    CHECK(rot.orbit.kind == OrbitKind::Rotation);
    CHECK(rot.orbit.trapped);
    CHECK(std::abs(std::abs(rot.trajectory.back().phi) - 2 * kPi) < 1e-6);

    const PeriodResult weak = dynamics::find_period({1, 0.5, 0}, {0.9, 0}, {});
    CHECK(weak.orbit.kind == OrbitKind::Libration);
}

TEST_CASE("find_period: recurrence is tight") {
    for (const State s0 : {State{0.3, 0}, State{0.9, 0}, State{-0.5, 1.0}}) {
        const PeriodResult r = dynamics::find_period(kLambda5, s0, {});
        const Sample end = r.trajectory.back();
        CHECK(std::abs(end.z - s0.z) < 1e-8);
        CHECK(std::abs(test::wrap(end.phi - s0.phi)) < 1e-8);
    }
}

TEST_CASE("find_period: error paths") {
    CHECK(kind_of([] { dynamics::find_period(kLambda5, {0, 0}, {}); }) == ErrorKind::FixedPointInput);
    IntegratorConfig shortcap;
    shortcap.max_time = 0.5;
    CHECK(kind_of([&] { dynamics::find_period(kLambda5, {0.3, 0}, shortcap); }) == ErrorKind::NoRecurrence);
    CHECK(kind_of([] { dynamics::find_period({1, 1.3, 0}, {0, kPi}, {}); }) == ErrorKind::FixedPointInput);
    // On the separatrix through the saddle (0, pi) the period diverges.
    IntegratorConfig cap;
    cap.max_time = 30;
    const double zs = std::sqrt(0.3 / (0.65 * 0.65));
    CHECK(kind_of([&] { dynamics::find_period({1, 1.3, 0}, {zs, kPi}, cap); }) == ErrorKind::NoRecurrence);
}

TEST_CASE("classify_orbit") {
    const TrapParams p{1, 1.3, 0};
    const Trajectory pi_orbit = dynamics::integrate(p, {0.66, kPi}, {}, 20.0);
    const OrbitClass c = dynamics::classify_orbit(pi_orbit);
    CHECK(c.kind == OrbitKind::Libration);
    CHECK(c.trapped);
    CHECK(c.pi_type);

    const Trajectory rot = dynamics::integrate(kLambda5, {0.9, 0}, {}, 5.0);
    const OrbitClass r = dynamics::classify_orbit(rot);
    CHECK(r.kind == OrbitKind::Rotation);
    CHECK(r.trapped);

    const Trajectory fixed = dynamics::integrate(p, {0, 0}, {}, 1.0);
    CHECK(dynamics::classify_orbit(fixed).kind == OrbitKind::Stationary);

    const Trajectory shortrun = dynamics::integrate(kLambda5, {0.3, 0}, {}, 1.0);
    CHECK(kind_of([&] { dynamics::classify_orbit(shortrun); }) == ErrorKind::InsufficientSpan);
}

TEST_CASE("energy drift: adaptive and RK4 order") {
    const PeriodResult r = dynamics::find_period(kLambda5, {0.3, 0}, {});
    CHECK(dynamics::energy_drift(r.trajectory) < 1e-8);
    const double coarse = dynamics::energy_drift(dynamics::integrate(kLambda5, {0.3, 0}, rk4(1e-2), r.period));
    const double fine = dynamics::energy_drift(dynamics::integrate(kLambda5, {0.3, 0}, rk4(5e-3), r.period));
    const double ratio = coarse / fine;
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}

TEST_CASE("property: energy conservation on random orbits") {
    for (int k = 0; k < 20; ++k) {
        const TrapParams p{test::uniform(0.5, 2.0), test::uniform(0.0, 6.0), test::uniform(-0.5, 0.5)};
        const State s0 = test::random_state(0.9);
        const Trajectory traj = dynamics::integrate(p, s0, {}, 10.0 / p.v);
        CHECK(dynamics::energy_drift(traj) < 1e-8);
    }
}

TEST_CASE("property: RK4 global error is fourth order") {
    const double t_end = 2.0;
    const Trajectory ref = dynamics::integrate(kLambda5, {0.3, 0}, test::adaptive(1e-13), t_end);
    const double z_ref = ref.back().z;
    double errs[3];
    const double dts[3] = {1e-2, 5e-3, 2.5e-3};
    for (int i = 0; i < 3; ++i) {
        errs[i] = std::abs(dynamics::integrate(kLambda5, {0.3, 0}, rk4(dts[i]), t_end).back().z - z_ref);
    }
    for (int i = 0; i < 2; ++i) {
        const double ratio = errs[i] / errs[i + 1];
        CHECK(ratio > 8.0);
        CHECK(ratio < 32.0);
    }
}

TEST_CASE("property: time reversal") {
    // (z, phi, t) -> (z, -phi, -t) maps solutions to solutions.
    for (int k = 0; k < 10; ++k) {
        const TrapParams p{test::uniform(0.5, 2.0), test::uniform(0.0, 6.0), test::uniform(-0.5, 0.5)};
        const State s0 = test::random_state(0.8);
        const double t_end = test::uniform(0.5, 3.0);
        const IntegratorConfig cfg = test::adaptive(1e-12);
        const Sample end = dynamics::integrate(p, s0, cfg, t_end).back();
        const Sample back = dynamics::integrate(p, {end.z, -end.phi}, cfg, t_end).back();
        CHECK(std::abs(back.z - s0.z) < 1e-8);
        CHECK(std::abs(-back.phi - s0.phi) < 1e-8);
    }
}

TEST_CASE("property: period consistency over two periods") {
    for (const State s0 : {State{0.3, 0}, State{0.9, 0}}) {
        const PeriodResult r = dynamics::find_period(kLambda5, s0, {});
        const Trajectory two = dynamics::integrate(kLambda5, s0, {}, 2 * r.period);
        const Sample a = two.at(r.period);
        const Sample b = two.back();
        CHECK(std::abs(a.z - b.z) < 1e-6);
        CHECK(std::abs(test::wrap(a.phi - b.phi)) < 1e-6);
    }
}

TEST_CASE("property: agreement with the amplitude-level integrator") {
    for (const State s0 : {State{0.3, 0}, State{0.9, 0}}) {
        const PeriodResult r = dynamics::find_period(kLambda5, s0, {});
        const auto amps = oracles::integrate_amplitudes(kLambda5, s0, 0.5 * r.period, oracles::kAmplitudeStep, 20);
        double worst = 0;
        for (const AmplitudeState& a : amps) {
            const Sample s = r.trajectory.at(std::min(2 * a.t_prime, r.period));
            worst = std::max(worst, std::abs(s.z - a.z()));
            worst = std::max(worst, std::abs(test::wrap(s.phi - a.phase())));
        }
        CHECK(worst < 1e-8);
    }
}
