#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "bjj/dynamics.hpp"
#include "bjj/model.hpp"

namespace bjj {

/// Bloch-sphere distance below which an evolution is treated as cyclic.
inline constexpr double kCyclicTolerance = 1e-6;

/// Phase bookkeeping of the evolution over [t0, t].
///  phi_d_gaugefree: integral of sin^2(alpha/2) dphi/dt
///  phi_g = delta - phi_d_gaugefree
///  omega_solid is filled only when the evolution is cyclic.
struct PhaseReport {
    double t = 0.0;
    double delta = 0.0;
    double phi_d_gaugefree = 0.0;
    double phi_g = 0.0;
    bool cyclic = false;
    double omega_solid = 0.0;
};

namespace geomphase {

/// (sin a cos phi, sin a sin phi, cos a) with a = arccos z.
Eigen::Vector3d bloch_vector(const State& s);

/// Endpoint term atan2(N, D) in (-pi, pi].  Throws UndefinedPhase for orthogonal endpoints.
double delta_term(const State& start, const State& end);

/// Accumulated integral of sin^2(alpha/2) dphi/dt over [0, t].
double dynamical_integral(const Trajectory& traj, double t);

/// Geometric phase from 0 to t.  Also checks that the (z - 1)/2 accumulator
/// agrees with the sin^2 accumulator.
PhaseReport geometric_phase(const Trajectory& traj, double t);

/// Geometric phase over the sub-interval [t0, t1].
PhaseReport geometric_phase(const Trajectory& traj, double t0, double t1);

/// Pancharatnam prescription: endpoints in phase, phi_g = -phi_d.
double pancharatnam_phase(const Trajectory& traj, double t0, double t1);

/// Horizontal lift: the lifted state carries no dynamical phase and phi_g is the
/// argument of its overlap with the initial state.
double horizontal_lift_phase(const Trajectory& traj, double t0, double t1);

/// n evenly spaced reports over [0, t_end].  Requires n >= 2.
std::vector<PhaseReport> phase_series(const Trajectory& traj, std::size_t n);

/// Oriented solid angle of the closed Bloch loop, the line integral of
/// (1 - cos alpha) dphi evaluated by per-interval Simpson quadrature.
/// Throws NotCyclic when the endpoints differ by more than kCyclicTolerance.
double solid_angle(const Trajectory& traj);

/// Line integral of (1 - z) dphi over [0, t] without the cyclicity check.
double swept_area(const Trajectory& traj, double t);

/// Distance between the Bloch vectors of two states.
double bloch_distance(const State& a, const State& b);

}  // namespace geomphase
}  // namespace bjj
