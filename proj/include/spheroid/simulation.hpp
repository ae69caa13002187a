// Coupled simulation loop. Each step integrates every cell's metabolic
// network over one mechanics time step, applies phenotype transitions on the
// coarser phenotype clock (death removal, ATP reclassification, division
// trials), then moves cells under the mechanical forces. Snapshots of the
// full cell table are emitted on a fixed interval and at the final step.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spheroid/cell.hpp"
#include "spheroid/config.hpp"
#include "spheroid/rng.hpp"

namespace spheroid {

// ATP-threshold phenotype rule. ATP below the death threshold marks the cell
// apoptotic; at or above the proliferation threshold it cycles; in between it
// is quiescent. A cell exactly at the death threshold survives.
Phenotype classify(double atp, const PhenotypeParams& p);

struct Snapshot {
    double time_min = 0.0;
    std::uint64_t step = 0;
    std::vector<Cell> cells;
};

struct EventCounts {
    std::uint64_t divisions = 0;
    std::uint64_t deaths = 0;
    std::uint64_t metabolite_floor_events = 0;
    std::uint64_t coincident_pairs = 0;
};

class Simulation {
public:
    explicit Simulation(SimConfig cfg, int threads = 1);

    // Places the initial cells uniformly in a ball around the origin.
    void initialize();

    // Runs the full configured duration. on_snapshot, when given, receives
    // the t=0 state, one snapshot per interval, and the final state.
    void run(const std::function<void(const Snapshot&)>& on_snapshot = {});

    const std::vector<Cell>& cells() const { return cells_; }
    const EventCounts& events() const { return events_; }
    std::uint64_t initial_population() const { return initial_population_; }
    double time_min() const { return time_min_; }

    // Replaces the current population (ids must be unique). Intended for
    // tooling and tests that need to start from a prepared state.
    void set_cells(std::vector<Cell> cells);

private:
    void phenotype_update(std::uint64_t step_index);
    void check_capacity(std::size_t incoming) const;

    SimConfig cfg_;
    int threads_;
    RngStream base_;
    std::vector<Cell> cells_;
    EventCounts events_;
    std::uint64_t next_id_ = 0;
    std::uint64_t initial_population_ = 0;
    double time_min_ = 0.0;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    EventCounts events;
    std::uint64_t initial_population = 0;
    std::uint64_t final_population = 0;
};

// Convenience wrapper: initialize, run, and collect all snapshots in memory.
RunResult run_simulation(const SimConfig& cfg, int threads = 1);

}  // namespace spheroid
