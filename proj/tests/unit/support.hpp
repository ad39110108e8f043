#pragma once

#include <cmath>
#include <random>

#include "bjj/dynamics.hpp"
#include "bjj/model.hpp"

namespace bjj::test {

inline constexpr double kPi = 3.14159265358979323846;

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20240611ULL);
    return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline TrapParams random_params() { return {uniform(0.2, 2.0), uniform(-3.0, 8.0), uniform(-1.5, 1.5)}; }

inline State random_state(double zmax = 0.99) { return {uniform(-zmax, zmax), uniform(-kPi, kPi)}; }

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double wrap(double x) { return std::remainder(x, 2.0 * kPi); }

inline IntegratorConfig adaptive(double tol = 1e-10) {
    IntegratorConfig cfg;
    cfg.rel_tol = cfg.abs_tol = tol;
    return cfg;
}

}  // namespace bjj::test
