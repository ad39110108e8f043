#include "bjj/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bjj/errors.hpp"

namespace bjj {

State LinearSolution::at(double t) const {
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return {start.z * c - (v * start.phi / omega) * s,
            start.phi * c + ((lambda + v) * start.z / omega) * s};
}

namespace oracles {
namespace {

using Amp = std::array<std::complex<double>, 2>;

Amp tunneling(const TrapParams& p, const Amp& x) {
    const double w0 = p.delta_e + p.lambda * (std::norm(x[0]) - std::norm(x[1]));
    const std::complex<double> minus_i(0.0, -1.0);
    return {minus_i * (w0 * x[0] - p.v * x[1]), minus_i * (-p.v * x[0] - w0 * x[1])};
}

Amp axpy(const Amp& x, double h, const Amp& k) { return {x[0] + h * k[0], x[1] + h * k[1]}; }

double arc(const Eigen::Vector3d& u, const Eigen::Vector3d& v) { return std::atan2(u.cross(v).norm(), u.dot(v)); }

}  // namespace

std::vector<AmplitudeState> integrate_amplitudes(const TrapParams& p, const State& s0, double t_end_prime,
                                                 double step, std::size_t stride) {
    model::validate(p);
    if (std::abs(s0.z) > 1.0) throw Error(ErrorKind::InvalidArgument, "|z0| must be <= 1");
    if (!(t_end_prime > 0.0) || !(step > 0.0) || stride == 0) {
        throw Error(ErrorKind::InvalidArgument, "t_end', step and stride must be positive");
    }
    const auto n = static_cast<std::size_t>(std::ceil(t_end_prime / step - 1e-9));
    const double h = t_end_prime / static_cast<double>(n);
    Amp x{std::sqrt(0.5 * (1.0 + s0.z)), std::sqrt(0.5 * (1.0 - s0.z)) * std::polar(1.0, s0.phi)};
    std::vector<AmplitudeState> out{{0.0, x[0], x[1]}};
    out.reserve(n / stride + 2);
    for (std::size_t k = 1; k <= n; ++k) {
        const Amp k1 = tunneling(p, x);
        const Amp k2 = tunneling(p, axpy(x, 0.5 * h, k1));
        const Amp k3 = tunneling(p, axpy(x, 0.5 * h, k2));
        const Amp k4 = tunneling(p, axpy(x, h, k3));
        for (int c = 0; c < 2; ++c) x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        if (!std::isfinite(std::abs(x[0])) || !std::isfinite(std::abs(x[1]))) {
            throw Error(ErrorKind::StepFailure, "amplitude integration diverged at step " + std::to_string(k));
        }
        if (k % stride == 0 || k == n) {
            out.push_back({k == n ? t_end_prime : h * static_cast<double>(k), x[0], x[1]});
        }
    }
    return out;
}

HelixSolution helix_case(const TrapParams& p, const State& s0) {
    if (p.v != 0.0) throw Error(ErrorKind::NotApplicable, "helix solution requires V = 0");
    if (std::abs(s0.z) > 1.0) throw Error(ErrorKind::InvalidArgument, "|z0| must be <= 1");
    const double rate = p.delta_e + p.lambda * s0.z;
    return {s0, rate, rate * std::sqrt((1.0 - s0.z) * (1.0 + s0.z)), s0.z * rate};
}

LinearSolution linear_limit(const TrapParams& p, const State& s0) {
    if (p.delta_e != 0.0) throw Error(ErrorKind::NotApplicable, "linear limit requires Delta E = 0");
    if (std::max(std::abs(s0.z), std::abs(s0.phi)) > 1e-2) {
        throw Error(ErrorKind::NotApplicable, "linear limit requires amplitude <= 1e-2");
    }
    const double w2 = p.v * (p.lambda + p.v);
    if (!(w2 > 0.0)) throw Error(ErrorKind::NotApplicable, "linear limit requires V (Lambda + V) > 0");
    return {std::sqrt(w2), s0, p.v, p.lambda};
}

double elliptic_k(double k) {
    if (!(std::abs(k) < 1.0)) throw Error(ErrorKind::InvalidArgument, "elliptic modulus must satisfy |k| < 1");
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    for (int it = 0; it < 64 && std::abs(a - b) > 1e-14 * a; ++it) {
        const double next = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next;
    }
    return std::numbers::pi / (a + b);
}

double pendulum_period(const TrapParams& p, double phi_max) {
    if (p.delta_e != 0.0) throw Error(ErrorKind::NotApplicable, "pendulum limit requires Delta E = 0");
    if (!(p.lambda * p.v > 0.0)) throw Error(ErrorKind::NotApplicable, "pendulum limit requires Lambda V > 0");
    if (!(phi_max > 0.0 && phi_max < std::numbers::pi)) {
        throw Error(ErrorKind::NotApplicable, "libration amplitude must lie in (0, pi)");
    }
    return 4.0 * elliptic_k(std::sin(0.5 * phi_max)) / std::sqrt(p.lambda * p.v);
}

double signed_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const double ab = arc(a, b), bc = arc(b, c), ca = arc(c, a);
    const double s = 0.5 * (ab + bc + ca);
    const double t = std::tan(0.5 * s) * std::tan(0.5 * (s - ab)) * std::tan(0.5 * (s - bc)) *
                     std::tan(0.5 * (s - ca));
    const double excess = 4.0 * std::atan(std::sqrt(std::max(0.0, t)));
    const double orientation = a.dot(b.cross(c));
    return orientation < 0.0 ? -excess : excess;
}

double spherical_polygon_area(std::span<const Eigen::Vector3d> loop) {
    const Eigen::Vector3d pole(0.0, 0.0, 1.0);
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Eigen::Vector3d& a = loop[i];
        const Eigen::Vector3d& b = loop[(i + 1) % loop.size()];
        area += signed_triangle_area(pole, a, b);
    }
    return area;
}

}  // namespace oracles
}  // namespace bjj
