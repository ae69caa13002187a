// Parameter sweeps: apply a flat parameter vector to a base configuration,
// run the simulator per Latin-hypercube sample, and accumulate a (theta,
// day, area) training table with resume support.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spheroid/config.hpp"
#include "spheroid/params.hpp"

namespace spheroid {

// Copies the seven swept parameters onto the configuration blocks.
SimConfig with_parameters(const SimConfig& base, const ParameterVector& theta);

// Projected area of the largest detected spheroid at every whole-day
// snapshot; the response emulated downstream.
struct DayArea {
    int day = 0;
    double area_um2 = 0.0;
};

struct SweepOptions {
    std::size_t samples = 1024;
    std::size_t replicates = 1;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct SweepOutcome {
    std::size_t completed = 0;
    std::size_t skipped = 0;  // present in an earlier checkpoint
    std::size_t failed = 0;
};

// Runs the design on top of base over the given box, appending finished
// samples to csv_path so an interrupted sweep resumes where it stopped.
// Failed samples are flagged in the status column, day -1.
SweepOutcome run_sweep(const SimConfig& base, const std::vector<Bounds>& box,
                       const SweepOptions& opts, const std::string& csv_path);

// Single-sample response: replicate-averaged largest-spheroid area per day.
std::vector<DayArea> day_areas_for(const SimConfig& cfg, std::size_t replicates,
                                   std::uint64_t sample_index, std::uint64_t base_seed,
                                   int threads);

// Deterministic per-task seed derivation.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t sample, std::uint64_t replicate);

}  // namespace spheroid
