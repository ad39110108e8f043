#include "bjj/spacecurve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "bjj/errors.hpp"
#include "bjj/geomphase.hpp"

namespace bjj::spacecurve {
namespace {

double polar_sine(double z) { return std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z))); }

// Components of dT/dt:  normal = sin(alpha) dphi/dt, along = dalpha/dt,
// and their time derivatives along the flow.
struct TangentRates {
    double normal = 0.0;
    double along = 0.0;
    double normal_rate = 0.0;
    double along_rate = 0.0;
    double phi_rate = 0.0;
};

TangentRates tangent_rates(const TrapParams& p, const State& s) {
    const Velocity v = model::rhs(p, s);
    const double root = polar_sine(s.z);
    const double sp = std::sin(s.phi);
    const double cp = std::cos(s.phi);
    const double w0 = model::omega0(p, s);
    TangentRates r;
    r.phi_rate = v.phi;
    r.normal = w0 * root + p.v * s.z * cp;
    r.along = p.v * sp;
    // d(root)/dt = -z dz/dt / root = V z sin(phi)
    r.normal_rate = p.lambda * v.first * root + w0 * p.v * s.z * sp + p.v * v.first * cp -
                    p.v * s.z * sp * v.phi;
    r.along_rate = p.v * cp * v.phi;
    return r;
}

// d/dt atan2(normal, along)
double bearing_rate(const TangentRates& r) {
    const double k2 = r.normal * r.normal + r.along * r.along;
    return (r.along * r.normal_rate - r.normal * r.along_rate) / k2;
}

void require_curvature(const TangentRates& r) {
    if (!(std::hypot(r.normal, r.along) > kMinCurvature)) {
        throw Error(ErrorKind::DegenerateCurvature, "curvature vanishes; torsion and Frenet frame undefined");
    }
}

Eigen::Vector3cd urbantke(const State& s, double beta) {
    const Triad f = natural_frame(s, beta);
    return f.p.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * f.q.cast<std::complex<double>>();
}

}  // namespace

Triad natural_frame(const State& s, double beta) {
    const double c2 = 0.5 * (1.0 + s.z);
    const double s2 = 0.5 * (1.0 - s.z);
    const double sa = polar_sine(s.z);
    const double c2p = std::cos(2.0 * s.phi);
    const double s2p = std::sin(2.0 * s.phi);
    const Eigen::Vector3d p0(c2 - s2 * c2p, -s2 * s2p, -sa * std::cos(s.phi));
    const Eigen::Vector3d q0(-s2 * s2p, c2 + s2 * c2p, -sa * std::sin(s.phi));
    const double cb = std::cos(beta);
    const double sb = std::sin(beta);
    return {geomphase::bloch_vector(s), p0 * cb - q0 * sb, p0 * sb + q0 * cb};
}

FrameCoefficients frame_coefficients(const TrapParams& p, const State& s, double beta, double beta_rate) {
    const double alpha = s.alpha();
    const Velocity v = model::rhs_alpha(p, alpha, s.phi);
    const double normal = std::sin(alpha) * v.phi;
    const double angle = s.phi + beta;
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    return {v.first * ca - normal * sa,
            v.first * sa + normal * ca,
            -(1.0 - s.z) * v.phi - beta_rate};
}

double curvature(const TrapParams& p, const State& s) {
    const double normal = model::omega0(p, s) * polar_sine(s.z) + p.v * s.z * std::cos(s.phi);
    return std::hypot(normal, p.v * std::sin(s.phi));
}

double curvature_from_energy(const TrapParams& p, const State& s) {
    const double w0 = model::omega0(p, s);
    const double m = model::hamiltonian(p, s) + 0.5 * p.lambda * s.z * s.z;
    return std::sqrt(std::max(0.0, p.v * p.v + w0 * w0 - m * m));
}

double torsion_at(const TrapParams& p, const State& s) {
    const TangentRates r = tangent_rates(p, s);
    require_curvature(r);
    return s.z * r.phi_rate + bearing_rate(r);
}

double torsion_from_energy(const TrapParams& p, const State& s) {
    const TangentRates r = tangent_rates(p, s);
    require_curvature(r);
    const double first = model::hamiltonian(p, s) + 0.5 * p.lambda * s.z * s.z +
                         p.v * std::cos(s.phi) / polar_sine(s.z);
    return first + bearing_rate(r);
}

double torsion(const TrapParams& p, const Trajectory& traj, double t) {
    return torsion_at(p, traj.at(t).state());
}

double frenet_gauge(const TrapParams& p, const State& s) {
    const TangentRates r = tangent_rates(p, s);
    require_curvature(r);
    return std::atan2(-r.normal, r.along) - s.phi;
}

FrameSample frenet_sample(const TrapParams& p, const State& s, double t) {
    FrameSample out;
    out.t = t;
    out.curvature = curvature(p, s);
    const TangentRates r = tangent_rates(p, s);
    if (!(std::hypot(r.normal, r.along) > kMinCurvature)) {
        out.alpha3 = 0.0;
        return out;
    }
    out.beta = std::atan2(-r.normal, r.along) - s.phi;
    const double beta_rate = -bearing_rate(r) - r.phi_rate;
    const FrameCoefficients c = frame_coefficients(p, s, out.beta, beta_rate);
    out.alpha1 = c.alpha1;
    out.alpha2 = c.alpha2;
    out.alpha3 = c.alpha3;
    out.torsion = s.z * r.phi_rate + bearing_rate(r);
    return out;
}

VarianceIdentity curvature_variance_identity(const TrapParams& p, const State& s) {
    const double w0 = model::omega0(p, s);
    const double k = curvature(p, s);
    const double mean = w0 * s.z - p.v * polar_sine(s.z) * std::cos(s.phi);
    return {k * k, (p.v * p.v + w0 * w0) - mean * mean};
}

GammaPhases gamma_phases(const Trajectory& traj, double t) {
    const Sample a = traj.front();
    const Sample b = traj.at(t);
    const double delta = geomphase::delta_term(a.state(), b.state());
    const double integral = b.a_d - a.a_d;
    GammaPhases g;
    g.gamma_d = -2.0 * integral;
    g.gamma_p = -2.0 * delta;
    g.gamma_g = g.gamma_p - g.gamma_d;
    return g;
}

GammaPhases gamma_phases(const Trajectory& traj, double t, const Gauge& gauge) {
    const Sample a = traj.front();
    const Sample b = traj.at(t);
    const double delta = geomphase::delta_term(a.state(), b.state());
    const double integral = b.a_d - a.a_d;

    // Rotation of the plane picked up from the gauge, by Simpson quadrature of beta'.
    double gauge_rotation = 0.0;
    double prev = a.t;
    auto simpson = [&](double lo, double hi) {
        return (hi - lo) / 6.0 *
               (gauge.beta_rate(lo) + 4.0 * gauge.beta_rate(0.5 * (lo + hi)) + gauge.beta_rate(hi));
    };
    for (const Sample& s : traj.samples()) {
        if (s.t <= a.t) continue;
        if (s.t >= t) break;
        gauge_rotation += simpson(prev, s.t);
        prev = s.t;
    }
    if (t > prev) gauge_rotation += simpson(prev, t);

    GammaPhases g;
    g.gamma_d = -2.0 * integral - gauge_rotation;
    g.gamma_p = -2.0 * delta - (gauge.beta(t) - gauge.beta(a.t));
    g.gamma_g = g.gamma_p - g.gamma_d;
    return g;
}

double frame_total_phase(const State& start, double beta_start, const State& end, double beta_end) {
    const Eigen::Vector3cd z0 = urbantke(start, beta_start);
    const Eigen::Vector3cd z1 = urbantke(end, beta_end);
    return -std::arg(z0.dot(z1));  // Eigen's dot conjugates the first operand
}

double fubini_study_length(const Trajectory& traj, double t) { return traj.at(t).a_s - traj.front().a_s; }

}  // namespace bjj::spacecurve
