#include "bjj/geomphase.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "bjj/errors.hpp"

namespace bjj::geomphase {
namespace {

// cos(alpha/2), sin(alpha/2) from z; exact at the poles.
double half_cos(double z) { return std::sqrt(std::max(0.0, 0.5 * (1.0 + z))); }
double half_sin(double z) { return std::sqrt(std::max(0.0, 0.5 * (1.0 - z))); }

constexpr double kOrthogonalOverlap = 1e-12;

std::complex<double> overlap(const State& a, const State& b) {
    // <psi_a | psi_b> for psi = (cos(alpha/2), sin(alpha/2) e^{i phi}).
    const std::complex<double> upper = half_cos(a.z) * half_cos(b.z);
    const std::complex<double> lower =
        half_sin(a.z) * half_sin(b.z) * std::polar(1.0, b.phi - a.phi);
    return upper + lower;
}

double integrand(const TrapParams& p, const Sample& s) {
    return (1.0 - s.z) * model::rhs_unchecked(p, s.state()).phi;
}

double swept(const Trajectory& traj, double t0, double t1) {
    const auto& samples = traj.samples();
    const TrapParams& p = traj.params();
    double total = 0.0;
    auto simpson = [&](const Sample& a, const Sample& b) {
        const Sample m = traj.at(0.5 * (a.t + b.t));
        return (b.t - a.t) / 6.0 * (integrand(p, a) + 4.0 * integrand(p, m) + integrand(p, b));
    };
    Sample prev = traj.at(t0);
    auto it = std::upper_bound(samples.begin(), samples.end(), t0,
                               [](double v, const Sample& s) { return v < s.t; });
    for (; it != samples.end() && it->t < t1; ++it) {
        total += simpson(prev, *it);
        prev = *it;
    }
    if (t1 > prev.t) total += simpson(prev, traj.at(t1));
    return total;
}

}  // namespace

Eigen::Vector3d bloch_vector(const State& s) {
    const double sa = 2.0 * half_sin(s.z) * half_cos(s.z);
    return {sa * std::cos(s.phi), sa * std::sin(s.phi), s.z};
}

double bloch_distance(const State& a, const State& b) { return (bloch_vector(a) - bloch_vector(b)).norm(); }

double delta_term(const State& start, const State& end) {
    const double ss = half_sin(start.z) * half_sin(end.z);
    const double dphi = end.phi - start.phi;
    const double num = ss * std::sin(dphi);
    const double den = half_cos(start.z) * half_cos(end.z) + ss * std::cos(dphi);
    if (std::hypot(num, den) <= kOrthogonalOverlap) {
        throw Error(ErrorKind::UndefinedPhase, "endpoint states are orthogonal");
    }
    const double d = std::atan2(num, den);
    return d == -std::numbers::pi ? std::numbers::pi : d;
}

double dynamical_integral(const Trajectory& traj, double t) { return traj.at(t).a_d - traj.front().a_d; }

PhaseReport geometric_phase(const Trajectory& traj, double t) {
    return geometric_phase(traj, traj.front().t, t);
}

PhaseReport geometric_phase(const Trajectory& traj, double t0, double t1) {
    if (t1 < t0) throw Error(ErrorKind::OutOfRange, "interval end precedes its start");
    const Sample a = traj.at(t0);
    const Sample b = traj.at(t1);
    PhaseReport r;
    r.t = t1;
    r.delta = delta_term(a.state(), b.state());
    r.phi_d_gaugefree = b.a_d - a.a_d;
    r.phi_g = r.delta - r.phi_d_gaugefree;
    r.cyclic = t1 > t0 && bloch_distance(a.state(), b.state()) <= kCyclicTolerance;
    if (r.cyclic) r.omega_solid = swept(traj, t0, t1);
    return r;
}

double pancharatnam_phase(const Trajectory& traj, double t0, double t1) {
    const Sample a = traj.at(t0);
    const Sample b = traj.at(t1);
    // Endpoints in phase fixes theta1(t1) - theta1(t0) = -Delta.
    const double gauge_shift = -delta_term(a.state(), b.state());
    const double phi_d = gauge_shift + (b.a_d - a.a_d);
    return -phi_d;
}

double horizontal_lift_phase(const Trajectory& traj, double t0, double t1) {
    const Sample a = traj.at(t0);
    const Sample b = traj.at(t1);
    // d theta1/dt = -sin^2(alpha/2) dphi/dt removes the dynamical phase.
    const double theta_shift = -(b.a_d - a.a_d);
    const std::complex<double> ov = overlap(a.state(), b.state());
    if (std::abs(ov) <= kOrthogonalOverlap) {
        throw Error(ErrorKind::UndefinedPhase, "endpoint states are orthogonal");
    }
    return theta_shift + std::arg(ov);
}

std::vector<PhaseReport> phase_series(const Trajectory& traj, std::size_t n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "phase series needs at least two points");
    const double t0 = traj.front().t;
    const double span = traj.t_end() - t0;
    std::vector<PhaseReport> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = k + 1 == n ? traj.t_end() : t0 + span * static_cast<double>(k) / static_cast<double>(n - 1);
        out.push_back(geometric_phase(traj, t0, t));
    }
    return out;
}

double swept_area(const Trajectory& traj, double t) { return swept(traj, traj.front().t, t); }

double solid_angle(const Trajectory& traj) {
    const double gap = bloch_distance(traj.front().state(), traj.back().state());
    if (gap > kCyclicTolerance) {
        throw Error(ErrorKind::NotCyclic, "Bloch loop does not close (gap " + std::to_string(gap) + ")");
    }
    return swept(traj, traj.front().t, traj.t_end());
}

}  // namespace bjj::geomphase
