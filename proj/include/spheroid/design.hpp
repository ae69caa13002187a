// Experimental designs over a parameter box: Latin hypercube samples for
// training sets and optimizer restarts, and a digitally shifted Sobol
// sequence for the sensitivity estimators.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spheroid/params.hpp"
#include "spheroid/rng.hpp"

namespace spheroid {

// n rows of dim columns in (0,1): one stratum per row and dimension, strata
// shuffled independently per dimension, uniform jitter within each stratum.
// Consumes about 2 n dim values from the slice, which caps n around 8000 for
// 7 dimensions; larger designs need several slices.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, Draws& draws);

// First n points of the dim-dimensional Sobol sequence, each dimension
// XOR-shifted by a random 32-bit word so distinct seeds give distinct yet
// equally stratified point sets. Components lie in [0,1).
std::vector<std::vector<double>> sobol_points(std::size_t n, std::size_t dim, Draws& draws);

// Maps a unit-cube point into the box; degenerate dimensions collapse to lo.
std::vector<double> scale_to_box(const std::vector<double>& unit,
                                 const std::vector<Bounds>& box);

}  // namespace spheroid
