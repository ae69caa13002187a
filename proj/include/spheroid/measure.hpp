// Morphology metrics over a snapshot of living cells: spheroid detection by
// single-linkage clustering, projected areas of disk unions, volume occupied
// per cell, and quantile-based size classes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spheroid/cell.hpp"

namespace spheroid {

struct SpheroidCluster {
    std::vector<std::uint32_t> members;  // indices into the measured cell list
    Vec3 centroid{};
};

struct SpheroidMetrics {
    std::uint64_t cell_count = 0;
    Vec3 centroid{};
    double area_um2 = 0.0;
    double volume_per_cell_um3 = 0.0;
    bool volume_fallback = false;  // degenerate geometry, close-packing value
};

struct MorphologyReport {
    std::vector<SpheroidMetrics> spheroids;
    std::uint64_t total_cells = 0;
};

struct MeasureOptions {
    // Contact range for single linkage; default 2R * 1.125 with R = 6 um.
    double link_distance_um = 13.5;
    // Raster pixel for projected areas; 0 selects R/4 automatically.
    double pixel_um = 0.0;
};

// Single-linkage connected components: i and j join one cluster iff their
// centres are within link_distance. Clusters partition the input.
std::vector<SpheroidCluster> detect_spheroids(const std::vector<Cell>& cells,
                                              double link_distance_um);

// Area of the union of the members' projected disks on the xy plane,
// rasterized at the given pixel size. Requires 0 < pixel <= R/4.
double projected_area(const std::vector<Cell>& cells, const std::vector<std::uint32_t>& members,
                      double pixel_um);

// Convex hull volume of the members' spheres (sampled at 26 directions each)
// divided by the member count. Degenerate clusters fall back to the
// close-packing estimate: distinct positions x (4/3) pi R^3 / member count.
double volume_per_cell(const std::vector<Cell>& cells, const std::vector<std::uint32_t>& members,
                       bool* used_fallback = nullptr);

// Size class from day-7 area quantile thresholds: below q1 is "small", above
// q3 is "large", inclusive in between is "medium".
std::string size_class(double area_um2, double q1_um2, double q3_um2);

MorphologyReport measure(const std::vector<Cell>& cells, const MeasureOptions& opts = {});

}  // namespace spheroid
