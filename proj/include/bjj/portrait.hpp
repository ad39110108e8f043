#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bjj/model.hpp"

namespace bjj {

/// Sampling grid over the (phi, z) cylinder.
struct GridSpec {
    double phi_min = -3.14159265358979323846;
    double phi_max = 3.14159265358979323846;
    double z_min = -0.999;
    double z_max = 0.999;
    std::size_t n_phi = 400;
    std::size_t n_z = 400;

    void validate() const;
    double phi_at(std::size_t j) const;
    double z_at(std::size_t i) const;
};

/// Row-major samples: value(i, j) is H at (z_at(i), phi_at(j)).
struct HamiltonianGrid {
    GridSpec grid;
    std::vector<double> values;

    double value(std::size_t i, std::size_t j) const { return values[i * grid.n_phi + j]; }
};

/// One connected piece of a level set, as (z, phi) vertices lying on the level.
struct Contour {
    std::vector<State> points;
    bool closed = false;
    bool rotational = false;  ///< open curve joining phi_min to phi_max at matching z
};

struct OrbitLevel {
    double energy = 0.0;
    Contour contour;  ///< the piece passing closest to the seed state
};

namespace portrait {

HamiltonianGrid hamiltonian_grid(const TrapParams& p, const GridSpec& g);

/// All pieces of {H = level} on the grid, by marching squares with each
/// edge crossing refined by bisection on the exact Hamiltonian.
std::vector<Contour> level_set(const TrapParams& p, const HamiltonianGrid& grid, double level);

/// Energy of s and the level-set piece through it.  A center fixed point
/// gives a single-point contour.
OrbitLevel orbit_level(const TrapParams& p, const State& s, const GridSpec& g = {});

/// Same, reusing a precomputed grid.
OrbitLevel orbit_level(const TrapParams& p, const State& s, const HamiltonianGrid& grid);

/// Largest Hamiltonian value over the saddle fixed points; none without saddles.
std::optional<double> separatrix_energy(const TrapParams& p);

/// True when some level set of the grid is rotational.  Scans `levels`
/// energies spread evenly over the open range of sampled values.
bool has_rotational_levels(const TrapParams& p, const HamiltonianGrid& grid, std::size_t levels = 64);

/// Distance from s to the closest point of the polyline in the (phi, z) plane,
/// with phi compared modulo 2 pi.
double distance_to_contour(const Contour& c, const State& s);

}  // namespace portrait
}  // namespace bjj
