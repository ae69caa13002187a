// Overdamped cell mechanics: short-range pairwise adhesion and repulsion,
// a stochastic locomotive force, Stokes drag, and reflective domain walls.
//
// For a pair at distance d the repulsive force on a cell points away from the
// neighbour with magnitude C_ccr (1 - d/Rd)^2 inside Rd (sum of cell radii),
// and the adhesive force points toward the neighbour with magnitude
// C_cca (1 - d/Ra)^2 inside Ra (sum of adhesion radii). Velocities follow
// v = F / (6 pi R eta) and positions advance with explicit Euler steps.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "spheroid/cell.hpp"
#include "spheroid/config.hpp"
#include "spheroid/params.hpp"
#include "spheroid/rng.hpp"
#include "spheroid/vec3.hpp"

namespace spheroid {

// Distance below which two centres are treated as coincident and separated
// along a random direction instead of an undefined one.
inline constexpr double kCoincidenceTol = 1e-9;

// Force exerted on a cell by one neighbour. dhat points from the neighbour
// toward the cell and must be unit length.
Vec3 pair_force(const Vec3& dhat, double dist, double repulsion_range, double adhesion_range,
                const MechanicalParams& p);

// Locomotive force magnitude for activity draw u in [0, 1]: a cubic
// polynomial in u scaled by the cell-type activity level and the force gain.
double locomotive_magnitude(double u, double scale, double gain);

// Stokes drag coefficient 6 pi R eta for a sphere of radius R (um) in a
// medium of viscosity eta (Pa s); divides force to give velocity in um/min.
double drag_coefficient(double radius_um, double eta_pa_s);

// Uniform spatial hash over cubic bins; neighbour queries visit the 27 bins
// around a point in a fixed order so force sums are reproducible.
class NeighborGrid {
public:
    explicit NeighborGrid(double bin_size);

    void build(const std::vector<Cell>& cells);

    // Invokes fn(j) for every stored cell index j within the 3x3x3 bin block
    // around pos, in deterministic order. Callers filter by distance.
    template <typename Fn>
    void for_neighbors(const Vec3& pos, Fn&& fn) const {
        const std::int64_t cx = coord(pos.x);
        const std::int64_t cy = coord(pos.y);
        const std::int64_t cz = coord(pos.z);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it = bins_.find(key(cx + dx, cy + dy, cz + dz));
                    if (it == bins_.end()) continue;
                    for (const std::uint32_t j : it->second) fn(j);
                }
            }
        }
    }

    std::int64_t coord(double x) const;
    static std::uint64_t key(std::int64_t cx, std::int64_t cy, std::int64_t cz);

private:
    double bin_size_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> bins_;
};

struct MechanicsStats {
    std::uint64_t coincident_pairs = 0;
    double max_displacement = 0.0;  // um, largest move this step
};

// Advances every cell position by one time step of length cfg.dt_min.
// Forces are evaluated against a snapshot of the positions at step entry, so
// the update order (and the thread count) cannot change the result.
MechanicsStats step_positions(std::vector<Cell>& cells, const SimConfig& cfg, const RngStream& base,
                              std::uint64_t step_index, int threads);

}  // namespace spheroid
