#pragma once

#include <cstddef>
#include <vector>

#include "bjj/model.hpp"

namespace bjj {

enum class Method { Rk4, Adaptive };

struct IntegratorConfig {
    Method method = Method::Adaptive;
    double dt = 1e-3;          ///< fixed step for Rk4, initial step for Adaptive
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_time = 0.0;     ///< period-search cap; <= 0 selects 200 / V
    double output_dt = 1e-3;   ///< spacing of the stored sample grid (Adaptive only)
    std::size_t sample_stride = 1;  ///< decimation applied when serializing

    void validate() const;
};

/// One stored point of a trajectory.
///  a_d: integral of sin^2(alpha/2) dphi/dt
///  a_s: integral of the curvature K (Fubini-Study arclength)
///  a_h: integral of (z - 1)/2 dphi/dt, carried separately from a_d
struct Sample {
    double t = 0.0;
    double z = 0.0;
    double phi = 0.0;
    double a_d = 0.0;
    double a_s = 0.0;
    double a_h = 0.0;

    State state() const { return {z, phi}; }
};

/// Immutable, time-ordered orbit with quadrature accumulators.
class Trajectory {
public:
    Trajectory(TrapParams params, std::vector<Sample> samples);

    const TrapParams& params() const { return params_; }
    const std::vector<Sample>& samples() const { return samples_; }
    double energy0() const { return energy0_; }
    double t_end() const { return samples_.back().t; }
    const Sample& front() const { return samples_.front(); }
    const Sample& back() const { return samples_.back(); }

    /// Cubic Hermite interpolation between samples using the analytic
    /// derivatives of every component.  Throws OutOfRange outside [0, t_end].
    Sample at(double t) const;

    /// Copy restricted to [0, t] (t becomes the last sample).
    Trajectory truncated(double t) const;

private:
    TrapParams params_;
    std::vector<Sample> samples_;
    double energy0_ = 0.0;
};

enum class OrbitKind { Libration, Rotation, Stationary };

const char* to_string(OrbitKind k);

struct OrbitClass {
    OrbitKind kind = OrbitKind::Stationary;
    bool trapped = false;  ///< z keeps one sign over the period
    bool pi_type = false;  ///< librates about phi = pi (mod 2 pi)
};

struct PeriodResult {
    double period = 0.0;
    Trajectory trajectory;
    OrbitClass orbit;
};

namespace dynamics {

/// Derivatives of all six sample components at a state.
Sample derivative(const TrapParams& p, const Sample& s);

/// Integrates the tunneling equations together with the accumulators over [0, t_end].
/// Throws PoleProximity, StepFailure or InvalidArgument.
Trajectory integrate(const TrapParams& p, const State& s0, const IntegratorConfig& cfg, double t_end);

/// Smallest T > 0 at which the orbit returns to s0 (phi modulo 2 pi).
/// Throws FixedPointInput for stationary inputs and NoRecurrence past cfg.max_time.
PeriodResult find_period(const TrapParams& p, const State& s0, const IntegratorConfig& cfg);

/// Classifies a trajectory spanning at least one period; throws InsufficientSpan otherwise.
OrbitClass classify_orbit(const Trajectory& traj);

/// Classification over the known period [0, period] of traj.
OrbitClass classify_over(const Trajectory& traj, double period);

/// max_k |H(sample_k) - H(0)| / max(1, |H(0)|).
double energy_drift(const Trajectory& traj);

/// Resolved period-search cap: cfg.max_time, or 200 / V when unset.
double resolved_max_time(const TrapParams& p, const IntegratorConfig& cfg);

}  // namespace dynamics
}  // namespace bjj
