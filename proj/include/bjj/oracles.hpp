#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "bjj/model.hpp"

// Reference solutions that share no integration code with bjj::dynamics.

namespace bjj {

/// Two-well amplitudes (a, b) of the normalized mean-field state.
struct AmplitudeState {
    double t_prime = 0.0;  ///< time before the t -> 2t rescaling
    std::complex<double> a;
    std::complex<double> b;

    double norm2() const { return std::norm(a) + std::norm(b); }
    double z() const { return std::norm(a) - std::norm(b); }
    /// arg b - arg a, reduced to (-pi, pi].
    double phase() const { return std::arg(b * std::conj(a)); }
};

struct HelixSolution {
    State start;
    double phi_rate = 0.0;
    double curvature = 0.0;
    double torsion = 0.0;

    State at(double t) const { return {start.z, start.phi + phi_rate * t}; }
};

struct LinearSolution {
    double omega = 0.0;
    State start;
    double v = 0.0;
    double lambda = 0.0;

    State at(double t) const;
};

namespace oracles {

/// Fixed step (in t') used by integrate_amplitudes when none is given.
inline constexpr double kAmplitudeStep = 2.5e-5;

/// Classical RK4 on i d(a,b)/dt' = M (a,b), M = [[w0, -V], [-V, -w0]] with
/// w0 recomputed from |a|^2 - |b|^2.  Samples every `stride` steps; the last
/// sample lands on t_end_prime.  Throws StepFailure on a non-finite state.
std::vector<AmplitudeState> integrate_amplitudes(const TrapParams& p, const State& s0, double t_end_prime,
                                                 double step = kAmplitudeStep, std::size_t stride = 1);

/// Closed-form V = 0 orbit: z fixed, phi advancing uniformly.  Throws NotApplicable if V != 0.
HelixSolution helix_case(const TrapParams& p, const State& s0);

/// Harmonic solution of the linearized symmetric-trap equations.
/// Requires Delta E = 0 and max(|z0|, |phi0|) <= 1e-2.
LinearSolution linear_limit(const TrapParams& p, const State& s0);

/// Complete elliptic integral of the first kind K(k) by the arithmetic-geometric mean.
double elliptic_k(double k);

/// Pendulum period 4 K(sin(phi_max / 2)) / sqrt(Lambda V).  Requires Delta E = 0,
/// Lambda V > 0, and phi_max in (0, pi).
double pendulum_period(const TrapParams& p, double phi_max);

/// Oriented area of the closed spherical polygon through `loop`, summed over
/// triangles fanned from the north pole with l'Huilier's excess formula.
double spherical_polygon_area(std::span<const Eigen::Vector3d> loop);

/// Oriented area of one spherical triangle (positive when counter-clockwise seen from outside).
double signed_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c);

}  // namespace oracles
}  // namespace bjj
