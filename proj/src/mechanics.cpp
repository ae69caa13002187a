#include "spheroid/mechanics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "spheroid/error.hpp"
#include "spheroid/parallel.hpp"

namespace spheroid {

Vec3 pair_force(const Vec3& dhat, double dist, double repulsion_range, double adhesion_range,
                const MechanicalParams& p) {
    Vec3 f{};
    if (dist <= repulsion_range) {
        const double s = 1.0 - dist / repulsion_range;
        f += dhat * (p.c_ccr * s * s);
    }
    if (dist <= adhesion_range) {
        const double s = 1.0 - dist / adhesion_range;
        f -= dhat * (p.c_cca * s * s);
    }
    return f;
}

double locomotive_magnitude(double u, double scale, double gain) {
    if (u < 0.0 || u > 1.0) throw InputError("locomotive activity draw must lie in [0, 1]");
    const double poly = ((1.56 * u + 3.27) * u + 0.07) * u + 0.06;
    return gain * scale * poly;
}

double drag_coefficient(double radius_um, double eta_pa_s) {
    return 6.0 * 3.14159265358979323846 * radius_um * eta_pa_s;
}

NeighborGrid::NeighborGrid(double bin_size) : bin_size_(bin_size) {}

std::int64_t NeighborGrid::coord(double x) const {
    return static_cast<std::int64_t>(std::floor(x / bin_size_));
}

std::uint64_t NeighborGrid::key(std::int64_t cx, std::int64_t cy, std::int64_t cz) {
    // 21 bits per axis, offset to keep coordinates non-negative.
    constexpr std::int64_t kOffset = 1 << 20;
    constexpr std::uint64_t kMask = (1u << 21) - 1;
    const auto ux = static_cast<std::uint64_t>(cx + kOffset) & kMask;
    const auto uy = static_cast<std::uint64_t>(cy + kOffset) & kMask;
    const auto uz = static_cast<std::uint64_t>(cz + kOffset) & kMask;
    return (ux << 42) | (uy << 21) | uz;
}

void NeighborGrid::build(const std::vector<Cell>& cells) {
    bins_.clear();
    bins_.reserve(cells.size());
    for (std::uint32_t i = 0; i < cells.size(); ++i) {
        const Vec3& p = cells[i].position;
        bins_[key(coord(p.x), coord(p.y), coord(p.z))].push_back(i);
    }
}

namespace {

double reflect(double x, double half_extent) {
    // A step never exceeds the domain size, so one fold per side suffices.
    if (x > half_extent) return 2.0 * half_extent - x;
    if (x < -half_extent) return -2.0 * half_extent - x;
    return x;
}

}  // namespace

MechanicsStats step_positions(std::vector<Cell>& cells, const SimConfig& cfg, const RngStream& base,
                              std::uint64_t step_index, int threads) {
    const MechanicalParams& p = cfg.mech;
    const double adhesion_ratio = p.adhesion_radius / p.radius;
    const double eta = cfg.eta_pa_s();
    const double dt = cfg.dt_min;
    const double half_extent = cfg.domain_half_extent_um;

    double max_radius = 0.0;
    for (const Cell& c : cells) max_radius = std::max(max_radius, c.radius);
    const double cutoff = 2.0 * max_radius * std::max(1.0, adhesion_ratio);

    NeighborGrid grid(std::max(cutoff, 1e-6));
    grid.build(cells);

    // Forces read the entry snapshot of positions (Jacobi update), so every
    // cell sees the same neighbour state regardless of evaluation order.
    std::vector<Vec3> new_positions(cells.size());
    std::atomic<std::uint64_t> coincident{0};

    parallel_for(cells.size(), threads, [&](std::size_t i) {
        const Cell& ci = cells[i];
        // Apoptotic cells stay in place (they still act as obstacles for
        // their neighbours until they are removed).
        if (ci.phenotype == Phenotype::Apoptotic) {
            new_positions[i] = ci.position;
            return;
        }
        Vec3 force{};
        RngStream stream = base.with_id(ci.id);
        auto separation = stream.draws(rng_purpose::kSeparation, step_index);

        grid.for_neighbors(ci.position, [&](std::uint32_t j) {
            if (j == i) return;
            const Cell& cj = cells[j];
            // Dead cells exert no forces on their neighbours.
            if (cj.phenotype == Phenotype::Apoptotic) return;
            const Vec3 d = ci.position - cj.position;
            const double dist = d.norm();
            const double repulsion_range = ci.radius + cj.radius;
            const double adhesion_range = repulsion_range * adhesion_ratio;
            if (dist > std::max(repulsion_range, adhesion_range)) return;
            Vec3 dhat;
            double eff_dist = dist;
            if (dist < kCoincidenceTol) {
                dhat = separation.unit_vector();
                eff_dist = 0.0;
                coincident.fetch_add(1, std::memory_order_relaxed);
            } else {
                dhat = d * (1.0 / dist);
            }
            force += pair_force(dhat, eff_dist, repulsion_range, adhesion_range, p);
        });

        // Only cycling cells are motile; quiescent ones feel pair forces only.
        if (ci.phenotype == Phenotype::Proliferating) {
            auto locomotion = stream.draws(rng_purpose::kLocomotion, step_index);
            const double activity = locomotion.uniform();
            const Vec3 dir = locomotion.unit_vector();
            force += dir * locomotive_magnitude(activity, cfg.locomotive_scale, cfg.locomotive_gain);
        }

        const Vec3 displacement = force * (dt / drag_coefficient(ci.radius, eta));
        Vec3 np = ci.position + displacement;
        np.x = reflect(np.x, half_extent);
        np.y = reflect(np.y, half_extent);
        np.z = reflect(np.z, half_extent);
        new_positions[i] = np;
    });

    MechanicsStats stats;
    stats.coincident_pairs = coincident.load();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double moved = (new_positions[i] - cells[i].position).norm();
        stats.max_displacement = std::max(stats.max_displacement, moved);
        cells[i].position = new_positions[i];
    }
    return stats;
}

}  // namespace spheroid
