#include "bjj/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "bjj/errors.hpp"

namespace bjj {

void GridSpec::validate() const {
    if (n_phi < 2 || n_z < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 samples per axis");
    if (!(phi_max > phi_min) || !std::isfinite(phi_min) || !std::isfinite(phi_max)) {
        throw Error(ErrorKind::InvalidArgument, "phi range is degenerate");
    }
    if (!(z_max > z_min) || z_min < -1.0 || z_max > 1.0) {
        throw Error(ErrorKind::InvalidArgument, "z range must be a nondegenerate subset of [-1, 1]");
    }
}

double GridSpec::phi_at(std::size_t j) const {
    return j + 1 == n_phi ? phi_max : phi_min + (phi_max - phi_min) * static_cast<double>(j) / static_cast<double>(n_phi - 1);
}

double GridSpec::z_at(std::size_t i) const {
    return i + 1 == n_z ? z_max : z_min + (z_max - z_min) * static_cast<double>(i) / static_cast<double>(n_z - 1);
}

namespace portrait {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Marcher {
public:
    Marcher(const TrapParams& p, const HamiltonianGrid& grid, double level)
        : p_(p), grid_(grid), level_(level), g_(grid.grid) {
        horizontal_ = g_.n_z * (g_.n_phi - 1);
        points_.assign(horizontal_ + (g_.n_z - 1) * g_.n_phi, State{std::nan(""), std::nan("")});
        links_.assign(points_.size(), {kNone, kNone});
    }

    std::vector<Contour> run() {
        for (std::size_t i = 0; i + 1 < g_.n_z; ++i) {
            for (std::size_t j = 0; j + 1 < g_.n_phi; ++j) march_cell(i, j);
        }
        return chain();
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    bool above(std::size_t i, std::size_t j) const { return grid_.value(i, j) >= level_; }

    std::size_t h_edge(std::size_t i, std::size_t j) const { return i * (g_.n_phi - 1) + j; }
    std::size_t v_edge(std::size_t i, std::size_t j) const { return horizontal_ + i * g_.n_phi + j; }

    // Edge endpoints as grid nodes.
    void edge_nodes(std::size_t e, std::size_t& i0, std::size_t& j0, std::size_t& i1, std::size_t& j1) const {
        if (e < horizontal_) {
            i0 = i1 = e / (g_.n_phi - 1);
            j0 = e % (g_.n_phi - 1);
            j1 = j0 + 1;
        } else {
            const std::size_t k = e - horizontal_;
            i0 = k / g_.n_phi;
            j0 = j1 = k % g_.n_phi;
            i1 = i0 + 1;
        }
    }

    const State& point(std::size_t e) {
        State& pt = points_[e];
        if (!std::isnan(pt.z)) return pt;
        std::size_t i0, j0, i1, j1;
        edge_nodes(e, i0, j0, i1, j1);
        const State a{g_.z_at(i0), g_.phi_at(j0)};
        const State b{g_.z_at(i1), g_.phi_at(j1)};
        auto at = [&](double u) { return State{a.z + u * (b.z - a.z), a.phi + u * (b.phi - a.phi)}; };
        const bool a_above = above(i0, j0);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool m_above = model::hamiltonian(p_, at(mid)) >= level_;
            (m_above == a_above ? lo : hi) = mid;
        }
        pt = at(0.5 * (lo + hi));
        return pt;
    }

    void link(std::size_t a, std::size_t b) {
        segments_.push_back({a, b});
        for (const std::size_t e : {a, b}) {
            auto& l = links_[e];
            (l[0] == kNone ? l[0] : l[1]) = segments_.size() - 1;
        }
    }

    void march_cell(std::size_t i, std::size_t j) {
        const bool c0 = above(i, j), c1 = above(i, j + 1), c2 = above(i + 1, j + 1), c3 = above(i + 1, j);
        const std::size_t bottom = h_edge(i, j), right = v_edge(i, j + 1);
        const std::size_t top = h_edge(i + 1, j), left = v_edge(i, j);
        std::vector<std::size_t> cut;
        if (c0 != c1) cut.push_back(bottom);
        if (c1 != c2) cut.push_back(right);
        if (c2 != c3) cut.push_back(top);
        if (c3 != c0) cut.push_back(left);
        if (cut.size() == 2) {
            link(cut[0], cut[1]);
        } else if (cut.size() == 4) {
            const State centre{0.5 * (g_.z_at(i) + g_.z_at(i + 1)), 0.5 * (g_.phi_at(j) + g_.phi_at(j + 1))};
            const bool mid = model::hamiltonian(p_, centre) >= level_;
            if (mid == c0) {
                link(bottom, right);
                link(top, left);
            } else {
                link(left, bottom);
                link(right, top);
            }
        }
    }

    std::vector<Contour> chain() {
        std::vector<bool> used(segments_.size(), false);
        std::vector<Contour> out;
        auto other_segment = [&](std::size_t e, std::size_t seg) {
            const auto& l = links_[e];
            return l[0] == seg ? l[1] : l[0];
        };
        for (std::size_t s0 = 0; s0 < segments_.size(); ++s0) {
            if (used[s0]) continue;
            used[s0] = true;
            std::deque<std::size_t> edges{segments_[s0][0], segments_[s0][1]};
            bool closed = false;
            // Walk forward from the back, then backward from the front.
            for (int dir = 0; dir < 2 && !closed; ++dir) {
                std::size_t seg = s0;
                while (true) {
                    const std::size_t e = dir == 0 ? edges.back() : edges.front();
                    const std::size_t next = other_segment(e, seg);
                    if (next == kNone) break;
                    if (used[next]) {
                        closed = true;
                        break;
                    }
                    used[next] = true;
                    const std::size_t far = segments_[next][0] == e ? segments_[next][1] : segments_[next][0];
                    if (dir == 0) edges.push_back(far); else edges.push_front(far);
                    seg = next;
                }
            }
            Contour c;
            c.closed = closed;
            for (const std::size_t e : edges) c.points.push_back(point(e));
            if (closed && c.points.size() > 1 && edges.front() != edges.back()) c.points.push_back(c.points.front());
            c.rotational = !closed && is_rotational(c);
            out.push_back(std::move(c));
        }
        return out;
    }

    bool is_rotational(const Contour& c) const {
        if (std::abs((g_.phi_max - g_.phi_min) - kTwoPi) > 1e-9 || c.points.size() < 2) return false;
        const State& a = c.points.front();
        const State& b = c.points.back();
        auto on_min = [&](const State& s) { return s.phi == g_.phi_min; };
        auto on_max = [&](const State& s) { return s.phi == g_.phi_max; };
        const bool spans = (on_min(a) && on_max(b)) || (on_max(a) && on_min(b));
        return spans && std::abs(a.z - b.z) < 1e-6;
    }

    const TrapParams& p_;
    const HamiltonianGrid& grid_;
    double level_;
    const GridSpec& g_;
    std::size_t horizontal_ = 0;
    std::vector<State> points_;
    std::vector<std::array<std::size_t, 2>> links_;
    std::vector<std::array<std::size_t, 2>> segments_;
};

double segment_distance(const State& a, const State& b, double z, double phi) {
    // Bring phi to the copy nearest the segment.
    const double mid = 0.5 * (a.phi + b.phi);
    phi = mid + std::remainder(phi - mid, kTwoPi);
    const double dx = b.phi - a.phi, dy = b.z - a.z;
    const double len2 = dx * dx + dy * dy;
    double u = len2 > 0.0 ? ((phi - a.phi) * dx + (z - a.z) * dy) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return std::hypot(phi - (a.phi + u * dx), z - (a.z + u * dy));
}

}  // namespace

HamiltonianGrid hamiltonian_grid(const TrapParams& p, const GridSpec& g) {
    model::validate(p);
    g.validate();
    HamiltonianGrid out{g, std::vector<double>(g.n_z * g.n_phi)};
    for (std::size_t i = 0; i < g.n_z; ++i) {
        for (std::size_t j = 0; j < g.n_phi; ++j) {
            out.values[i * g.n_phi + j] = model::hamiltonian(p, {g.z_at(i), g.phi_at(j)});
        }
    }
    return out;
}

std::vector<Contour> level_set(const TrapParams& p, const HamiltonianGrid& grid, double level) {
    return Marcher(p, grid, level).run();
}

double distance_to_contour(const Contour& c, const State& s) {
    if (c.points.empty()) return std::numeric_limits<double>::infinity();
    if (c.points.size() == 1) return segment_distance(c.points[0], c.points[0], s.z, s.phi);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < c.points.size(); ++k) {
        best = std::min(best, segment_distance(c.points[k], c.points[k + 1], s.z, s.phi));
    }
    return best;
}

OrbitLevel orbit_level(const TrapParams& p, const State& s, const GridSpec& g) {
    return orbit_level(p, s, hamiltonian_grid(p, g));
}

OrbitLevel orbit_level(const TrapParams& p, const State& s, const HamiltonianGrid& grid) {
    if (std::abs(s.z) > 1.0) throw Error(ErrorKind::InvalidArgument, "|z| must be <= 1");
    OrbitLevel out;
    out.energy = model::hamiltonian(p, s);
    if (std::abs(s.z) <= 1.0 - kPoleEpsilon) {
        const Velocity v = model::rhs(p, s);
        if (std::hypot(v.first, v.phi) <= 1e-10) {
            out.contour.points = {s};
            out.contour.closed = true;
            return out;
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (Contour& c : level_set(p, grid, out.energy)) {
        const double d = distance_to_contour(c, s);
        if (d < best) {
            best = d;
            out.contour = std::move(c);
        }
    }
    return out;
}

std::optional<double> separatrix_energy(const TrapParams& p) {
    std::optional<double> out;
    for (const FixedPoint& f : model::fixed_points(p)) {
        if (f.stability != Stability::Saddle) continue;
        const double e = model::hamiltonian(p, f.state);
        if (!out || e > *out) out = e;
    }
    return out;
}

bool has_rotational_levels(const TrapParams& p, const HamiltonianGrid& grid, std::size_t levels) {
    const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
    for (std::size_t k = 0; k < levels; ++k) {
        const double level = *lo + (*hi - *lo) * (static_cast<double>(k) + 0.5) / static_cast<double>(levels);
        for (const Contour& c : level_set(p, grid, level)) {
            if (c.rotational) return true;
        }
    }
    return false;
}

}  // namespace portrait
}  // namespace bjj
