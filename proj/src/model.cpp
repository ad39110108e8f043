#include "bjj/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bjj/errors.hpp"

namespace bjj {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Center: return "center";
        case Stability::Saddle: return "saddle";
        case Stability::Degenerate: return "degenerate";
    }
    return "unknown";
}

namespace model {
namespace {

// sqrt(1 - z^2) without the cancellation of 1 - z*z near the poles.
double polar_sine(double z) { return std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z))); }

void require_pole_distance(double z) {
    if (!(std::abs(z) <= 1.0 - kPoleEpsilon)) {
        throw Error(ErrorKind::PoleProximity,
                    "|z| = " + std::to_string(std::abs(z)) + " exceeds 1 - 1e-9");
    }
}

}  // namespace

void validate(const TrapParams& p) {
    if (!std::isfinite(p.v) || !std::isfinite(p.lambda) || !std::isfinite(p.delta_e)) {
        throw Error(ErrorKind::InvalidArgument, "trap parameters must be finite");
    }
    if (p.v < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "tunneling amplitude V must be >= 0");
    }
}

double hamiltonian(const TrapParams& p, const State& s) {
    return 0.5 * p.lambda * s.z * s.z - p.v * polar_sine(s.z) * std::cos(s.phi) + p.delta_e * s.z;
}

double omega0(const TrapParams& p, const State& s) { return p.delta_e + p.lambda * s.z; }

Velocity rhs_unchecked(const TrapParams& p, const State& s) {
    const double z = std::clamp(s.z, -1.0 + kPoleEpsilon, 1.0 - kPoleEpsilon);
    const double root = polar_sine(z);
    return {-p.v * root * std::sin(s.phi),
            p.lambda * z + p.v * z * std::cos(s.phi) / root + p.delta_e};
}

Velocity rhs(const TrapParams& p, const State& s) {
    require_pole_distance(s.z);
    return rhs_unchecked(p, s);
}

Velocity rhs_alpha(const TrapParams& p, double alpha, double phi) {
    const double sa = std::sin(alpha);
    if (!(sa >= std::sqrt(kPoleEpsilon * (2.0 - kPoleEpsilon)))) {
        throw Error(ErrorKind::PoleProximity, "alpha too close to 0 or pi");
    }
    const double ca = std::cos(alpha);
    return {p.v * std::sin(phi), p.lambda * ca + p.v * (ca / sa) * std::cos(phi) + p.delta_e};
}

Hessian hamiltonian_hessian(const TrapParams& p, const State& s) {
    const double root = polar_sine(s.z);
    const double c = std::cos(s.phi);
    return {p.lambda + p.v * c / (root * root * root),
            -p.v * s.z * std::sin(s.phi) / root,
            p.v * root * c};
}

Stability classify(const TrapParams& p, const State& s) {
    const Hessian h = hamiltonian_hessian(p, s);
    const double det = h.zz * h.phiphi - h.zphi * h.zphi;
    const double scale = std::max({h.zz * h.zz, h.phiphi * h.phiphi, h.zphi * h.zphi, 1e-300});
    if (std::abs(det) <= 1e-12 * scale) return Stability::Degenerate;
    return det > 0.0 ? Stability::Center : Stability::Saddle;
}

std::vector<FixedPoint> fixed_points(const TrapParams& p) {
    validate(p);
    std::vector<FixedPoint> out;
    constexpr double pi = std::numbers::pi;

    if (p.v == 0.0) {
        // Every point of the latitude z = -Delta E / Lambda is stationary.
        double z = 0.0;
        if (p.lambda != 0.0) {
            z = -p.delta_e / p.lambda;
        } else if (p.delta_e != 0.0) {
            return out;
        }
        if (std::abs(z) < 1.0) {
            out.push_back({{z, 0.0}, Stability::Degenerate});
            out.push_back({{z, pi}, Stability::Degenerate});
        }
        return out;
    }

    // On phi in {0, pi} only dphi/dt = 0 remains.  With z = tanh(u) it reads
    // Lambda tanh(u) + c V sinh(u) + Delta E = 0, c = cos(phi), and the sinh term
    // dominates beyond |u| = asinh((|Lambda| + |Delta E|) / V).
    const double u_max = std::asinh((std::abs(p.lambda) + std::abs(p.delta_e)) / p.v) + 1.0;
    constexpr int kSamples = 4001;
    for (const double phi : {0.0, pi}) {
        const double c = phi == 0.0 ? 1.0 : -1.0;
        auto g = [&](double u) { return p.lambda * std::tanh(u) + c * p.v * std::sinh(u) + p.delta_e; };
        std::vector<double> roots;
        double u_prev = -u_max;
        double g_prev = g(u_prev);
        for (int i = 1; i < kSamples; ++i) {
            const double u = -u_max + 2.0 * u_max * i / (kSamples - 1);
            const double gu = g(u);
            if (g_prev == 0.0) {
                roots.push_back(u_prev);
            } else if (gu != 0.0 && std::signbit(gu) != std::signbit(g_prev)) {
                double lo = u_prev, hi = u;
                double g_lo = g_prev;
                for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const double gm = g(mid);
                    if (gm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if (std::signbit(gm) == std::signbit(g_lo)) {
                        lo = mid;
                        g_lo = gm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi);
            }
            u_prev = u;
            g_prev = gu;
        }
        if (g_prev == 0.0) roots.push_back(u_prev);

        for (const double u : roots) {
            const State s{std::tanh(u), phi};
            out.push_back({s, classify(p, s)});
        }
    }
    std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) {
        return a.state.phi != b.state.phi ? a.state.phi < b.state.phi : a.state.z < b.state.z;
    });
    return out;
}

TrapParams map_hyperfine(const HyperfineParams& h) {
    if (!std::isfinite(h.alpha0) || !std::isfinite(h.beta0) || !std::isfinite(h.gamma0)) {
        throw Error(ErrorKind::InvalidArgument, "hyperfine coefficients must be finite");
    }
    if (-h.gamma0 < 0.0) {
        throw Error(ErrorKind::NegativeCoupling, "gamma0 > 0 maps to V = -gamma0 < 0");
    }
    return {0.0 - h.gamma0, 2.0 * h.beta0, h.alpha0};
}

TrapParams in_units_of_v(const TrapParams& p) {
    validate(p);
    if (p.v <= 0.0) {
        throw Error(ErrorKind::InvalidArgument, "normalization by V requires V > 0");
    }
    return {1.0, p.lambda / p.v, p.delta_e / p.v};
}

}  // namespace model
}  // namespace bjj
