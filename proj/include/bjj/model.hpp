#pragma once

#include <cmath>
#include <vector>

namespace bjj {

/// Guard distance from the poles z = ±1, where the phase equation is singular.
inline constexpr double kPoleEpsilon = 1e-9;

/// Couplings of one two-mode junction, in user energy units (hbar = 1).
struct TrapParams {
    double v = 1.0;        ///< tunneling amplitude V, >= 0
    double lambda = 0.0;   ///< interaction Lambda
    double delta_e = 0.0;  ///< well asymmetry Delta E
};

/// Point on the reduced phase space: population imbalance and relative phase.
/// The phase is kept unwrapped so that rotational winding stays observable.
struct State {
    double z = 0.0;
    double phi = 0.0;

    /// Polar angle on the Bloch sphere, arccos z.
    double alpha() const { return std::acos(z); }
};

struct HyperfineParams {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double gamma0 = 0.0;
};

/// Time derivatives of (z, phi), or of (alpha, phi) for rhs_alpha.
struct Velocity {
    double first = 0.0;
    double phi = 0.0;
};

enum class Stability { Center, Saddle, Degenerate };

struct FixedPoint {
    State state;
    Stability stability = Stability::Degenerate;
};

const char* to_string(Stability s);

namespace model {

/// Throws InvalidArgument for non-finite fields or V < 0.
void validate(const TrapParams& p);

/// Classical energy  Lambda z^2/2 - V sqrt(1 - z^2) cos(phi) + Delta E z.
double hamiltonian(const TrapParams& p, const State& s);

/// Mean-field splitting omega0 = Delta E + Lambda z.
double omega0(const TrapParams& p, const State& s);

/// Tunneling equations (dz/dt, dphi/dt) in the rescaled time.
/// Throws PoleProximity when |z| > 1 - kPoleEpsilon.
Velocity rhs(const TrapParams& p, const State& s);

/// Same flow written for the polar angle: (dalpha/dt, dphi/dt).
Velocity rhs_alpha(const TrapParams& p, double alpha, double phi);

/// Unchecked flow used inside the integrators; z is clamped away from the poles.
Velocity rhs_unchecked(const TrapParams& p, const State& s);

/// Analytic Hessian of the Hamiltonian: {H_zz, H_zphi, H_phiphi}.
struct Hessian {
    double zz = 0.0;
    double zphi = 0.0;
    double phiphi = 0.0;
};
Hessian hamiltonian_hessian(const TrapParams& p, const State& s);

/// Center if the Hessian is definite, saddle if indefinite.
Stability classify(const TrapParams& p, const State& s);

/// All stationary states on the lines phi = 0 and phi = pi, sorted by (phi, z).
std::vector<FixedPoint> fixed_points(const TrapParams& p);

/// (alpha0, beta0, gamma0) -> (V = -gamma0, Lambda = 2 beta0, Delta E = alpha0).
/// Throws NegativeCoupling when -gamma0 < 0.
TrapParams map_hyperfine(const HyperfineParams& h);

/// Divides Lambda and Delta E by V and sets V = 1.  Requires V > 0.
TrapParams in_units_of_v(const TrapParams& p);

}  // namespace model
}  // namespace bjj
