#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "bjj/dynamics.hpp"
#include "bjj/model.hpp"

namespace bjj {

/// Orthonormal right-handed frame (T, P, Q) with T the Bloch vector.
struct Triad {
    Eigen::Vector3d t;
    Eigen::Vector3d p;
    Eigen::Vector3d q;
};

struct FrameCoefficients {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
};

/// Frame quantities at one instant.  Curvature, torsion and the alpha_i are
/// rates in the canonical (rescaled) time; the pre-rescaling values are twice these.
struct FrameSample {
    double t = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double curvature = 0.0;
    double torsion = 0.0;
    double beta = 0.0;
};

struct GammaPhases {
    double gamma_p = 0.0;
    double gamma_d = 0.0;
    double gamma_g = 0.0;
};

/// Smooth gauge angle beta(t) and its time derivative.
struct Gauge {
    std::function<double(double)> beta;
    std::function<double(double)> beta_rate;
};

namespace spacecurve {

/// Curvature below which torsion and the Frenet gauge are undefined.
inline constexpr double kMinCurvature = 1e-9;

/// Natural frame built from the Urbantke vector, rotated in the (P, Q) plane by beta.
Triad natural_frame(const State& s, double beta);

/// Components of dT/dt on (P', Q') and the in-plane rotation rate, for gauge beta(t).
FrameCoefficients frame_coefficients(const TrapParams& p, const State& s, double beta, double beta_rate);

/// K = |dT/dt|, closed form valid on the whole sphere (K = V at the poles).
double curvature(const TrapParams& p, const State& s);

/// K from the energy form  V^2 + omega0^2 - (H + Lambda z^2 / 2)^2.
double curvature_from_energy(const TrapParams& p, const State& s);

/// Torsion T . (T' x T'') / K^2 evaluated analytically at state s.
/// Throws DegenerateCurvature when K <= kMinCurvature.
double torsion_at(const TrapParams& p, const State& s);

/// Torsion using the energy-based first term  H + Lambda z^2/2 + V cos(phi)/sqrt(1 - z^2).
double torsion_from_energy(const TrapParams& p, const State& s);

/// Torsion along a trajectory at time t.
double torsion(const TrapParams& p, const Trajectory& traj, double t);

/// Gauge that makes alpha2 vanish and alpha1 = K > 0.
/// Throws DegenerateCurvature at stationary points.
double frenet_gauge(const TrapParams& p, const State& s);

/// Full frame sample in the Frenet gauge (torsion left at 0 when K is degenerate).
FrameSample frenet_sample(const TrapParams& p, const State& s, double t);

struct VarianceIdentity {
    double lhs = 0.0;  ///< curvature^2
    double rhs = 0.0;  ///< <M^2> - <M>^2 of the tunneling matrix
};
VarianceIdentity curvature_variance_identity(const TrapParams& p, const State& s);

/// Frame-rotation phases over [0, t] in the working gauge theta1 = 0.
GammaPhases gamma_phases(const Trajectory& traj, double t);

/// Same with an explicit gauge beta(t); gamma_g is independent of the choice.
GammaPhases gamma_phases(const Trajectory& traj, double t, const Gauge& gauge);

/// Total frame rotation -arg(Z'(0)* . Z'(t)) from the complex Urbantke vectors.
double frame_total_phase(const State& start, double beta_start, const State& end, double beta_end);

/// Fubini-Study arclength, the integral of K over [0, t].
double fubini_study_length(const Trajectory& traj, double t);

}  // namespace spacecurve
}  // namespace bjj
