// 3D convex hull via quickhull with conflict lists, plus hull volume.
// Used for the volume-per-cell morphology metric.
#pragma once

#include <optional>
#include <vector>

#include "spheroid/vec3.hpp"

namespace spheroid {

struct HullResult {
    double volume = 0.0;                 // um^3
    std::vector<Vec3> vertices;          // points that appear on the hull
};

// Returns nullopt when the points are degenerate (fewer than 4 distinct
// points, or collinear / coplanar within tolerance).
std::optional<HullResult> convex_hull(const std::vector<Vec3>& points);

}  // namespace spheroid
