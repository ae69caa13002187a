#include "spheroid/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "spheroid/error.hpp"
#include "spheroid/hull.hpp"
#include "spheroid/mechanics.hpp"

namespace spheroid {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Path-compressing union-find over cell indices.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::uint32_t> parent_;
};

// The 26 unit directions of the axis, face-diagonal, and corner neighbours.
const std::vector<Vec3>& sphere_directions() {
    static const std::vector<Vec3> dirs = [] {
        std::vector<Vec3> d;
        for (int x = -1; x <= 1; ++x) {
            for (int y = -1; y <= 1; ++y) {
                for (int z = -1; z <= 1; ++z) {
                    if (x == 0 && y == 0 && z == 0) continue;
                    Vec3 v{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
                    d.push_back(v * (1.0 / v.norm()));
                }
            }
        }
        return d;
    }();
    return dirs;
}

std::vector<Vec3> distinct_positions(const std::vector<Cell>& cells,
                                     const std::vector<std::uint32_t>& members) {
    std::vector<Vec3> pts;
    pts.reserve(members.size());
    for (const std::uint32_t m : members) pts.push_back(cells[m].position);
    std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
    // After sorting, coincident points sit within a tol-wide window in x.
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dup = false;
        for (std::size_t j = out.size(); j-- > 0;) {
            if (pts[i].x - out[j].x >= kCoincidenceTol) break;
            if ((pts[i] - out[j]).norm() < kCoincidenceTol) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(pts[i]);
    }
    return out;
}

}  // namespace

std::vector<SpheroidCluster> detect_spheroids(const std::vector<Cell>& cells,
                                              double link_distance_um) {
    if (link_distance_um <= 0.0) throw InputError("link distance must be positive");
    const auto n = static_cast<std::uint32_t>(cells.size());
    UnionFind uf(n);

    NeighborGrid grid(link_distance_um);
    grid.build(cells);
    const double link2 = link_distance_um * link_distance_um;
    for (std::uint32_t i = 0; i < n; ++i) {
        grid.for_neighbors(cells[i].position, [&](std::uint32_t j) {
            if (j <= i) return;
            if ((cells[i].position - cells[j].position).norm2() <= link2) uf.unite(i, j);
        });
    }

    std::unordered_map<std::uint32_t, std::uint32_t> root_to_cluster;
    std::vector<SpheroidCluster> clusters;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t r = uf.find(i);
        auto [it, fresh] = root_to_cluster.try_emplace(r, static_cast<std::uint32_t>(clusters.size()));
        if (fresh) clusters.emplace_back();
        clusters[it->second].members.push_back(i);
    }
    for (SpheroidCluster& c : clusters) {
        Vec3 sum{};
        for (const std::uint32_t m : c.members) sum += cells[m].position;
        c.centroid = sum * (1.0 / static_cast<double>(c.members.size()));
    }
    return clusters;
}

double projected_area(const std::vector<Cell>& cells, const std::vector<std::uint32_t>& members,
                      double pixel_um) {
    if (members.empty()) return 0.0;
    double min_radius = cells[members.front()].radius;
    for (const std::uint32_t m : members) min_radius = std::min(min_radius, cells[m].radius);
    if (pixel_um <= 0.0 || pixel_um > min_radius / 4.0) {
        throw InputError("area raster pixel must be positive and at most R/4");
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const std::uint32_t m : members) {
        const Cell& c = cells[m];
        xmin = std::min(xmin, c.position.x - c.radius);
        xmax = std::max(xmax, c.position.x + c.radius);
        ymin = std::min(ymin, c.position.y - c.radius);
        ymax = std::max(ymax, c.position.y + c.radius);
    }
    const auto nx = static_cast<std::int64_t>(std::ceil((xmax - xmin) / pixel_um)) + 1;
    const auto ny = static_cast<std::int64_t>(std::ceil((ymax - ymin) / pixel_um)) + 1;
    std::vector<char> mask(static_cast<std::size_t>(nx * ny), 0);

    // A pixel is covered when its centre falls inside some member disk.
    for (const std::uint32_t m : members) {
        const Cell& c = cells[m];
        const double r2 = c.radius * c.radius;
        const auto ix_lo = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(std::floor((c.position.x - c.radius - xmin) / pixel_um)));
        const auto ix_hi = std::min<std::int64_t>(
            nx - 1, static_cast<std::int64_t>(std::ceil((c.position.x + c.radius - xmin) / pixel_um)));
        const auto iy_lo = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(std::floor((c.position.y - c.radius - ymin) / pixel_um)));
        const auto iy_hi = std::min<std::int64_t>(
            ny - 1, static_cast<std::int64_t>(std::ceil((c.position.y + c.radius - ymin) / pixel_um)));
        for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix) {
            const double px = xmin + (static_cast<double>(ix) + 0.5) * pixel_um;
            const double dx2 = (px - c.position.x) * (px - c.position.x);
            if (dx2 > r2) continue;
            for (std::int64_t iy = iy_lo; iy <= iy_hi; ++iy) {
                const double py = ymin + (static_cast<double>(iy) + 0.5) * pixel_um;
                const double dy = py - c.position.y;
                if (dx2 + dy * dy <= r2) mask[static_cast<std::size_t>(ix * ny + iy)] = 1;
            }
        }
    }

    const auto covered = static_cast<double>(std::count(mask.begin(), mask.end(), char{1}));
    return covered * pixel_um * pixel_um;
}

double volume_per_cell(const std::vector<Cell>& cells, const std::vector<std::uint32_t>& members,
                       bool* used_fallback) {
    if (used_fallback) *used_fallback = false;
    if (members.empty()) return 0.0;
    const double n_members = static_cast<double>(members.size());
    const std::vector<Vec3> distinct = distinct_positions(cells, members);

    const auto fallback = [&]() {
        if (used_fallback) *used_fallback = true;
        // Close packing: one full sphere volume per occupied position.
        const double r = cells[members.front()].radius;
        const double spheres =
            static_cast<double>(distinct.size()) * (4.0 / 3.0) * kPi * r * r * r;
        return spheres / n_members;
    };

    if (distinct.size() < 4) return fallback();
    const auto center_hull = convex_hull(distinct);
    if (!center_hull) return fallback();

    // Only cells whose centres are hull vertices can contribute hull points;
    // sampling just those keeps the second hull small.
    std::vector<Vec3> samples;
    samples.reserve(center_hull->vertices.size() * sphere_directions().size());
    for (const Vec3& v : center_hull->vertices) {
        double radius = cells[members.front()].radius;
        for (const std::uint32_t m : members) {
            if ((cells[m].position - v).norm() < kCoincidenceTol) {
                radius = cells[m].radius;
                break;
            }
        }
        for (const Vec3& d : sphere_directions()) samples.push_back(v + d * radius);
    }
    const auto sphere_hull = convex_hull(samples);
    if (!sphere_hull) return fallback();
    return sphere_hull->volume / n_members;
}

std::string size_class(double area_um2, double q1_um2, double q3_um2) {
    if (q1_um2 >= q3_um2) throw InputError("size class thresholds must satisfy q1 < q3");
    if (area_um2 < q1_um2) return "small";
    if (area_um2 > q3_um2) return "large";
    return "medium";
}

MorphologyReport measure(const std::vector<Cell>& cells, const MeasureOptions& opts) {
    MorphologyReport report;
    report.total_cells = cells.size();
    if (cells.empty()) return report;

    double min_radius = cells.front().radius;
    for (const Cell& c : cells) min_radius = std::min(min_radius, c.radius);
    const double pixel = opts.pixel_um > 0.0 ? opts.pixel_um : min_radius / 4.0;

    const std::vector<SpheroidCluster> clusters = detect_spheroids(cells, opts.link_distance_um);
    report.spheroids.reserve(clusters.size());
    for (const SpheroidCluster& cl : clusters) {
        SpheroidMetrics m;
        m.cell_count = cl.members.size();
        m.centroid = cl.centroid;
        m.area_um2 = projected_area(cells, cl.members, pixel);
        m.volume_per_cell_um3 = volume_per_cell(cells, cl.members, &m.volume_fallback);
        report.spheroids.push_back(std::move(m));
    }
    return report;
}

}  // namespace spheroid
