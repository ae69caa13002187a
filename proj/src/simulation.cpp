#include "spheroid/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "spheroid/error.hpp"
#include "spheroid/mechanics.hpp"
#include "spheroid/metabolism.hpp"
#include "spheroid/parallel.hpp"

namespace spheroid {

namespace {

// Number of dt-sized steps in interval, required to be an exact multiple.
std::uint64_t steps_in(double interval, double dt, const char* what) {
    const double ratio = interval / dt;
    const auto n = static_cast<std::uint64_t>(std::llround(ratio));
    if (n == 0 || std::abs(ratio - static_cast<double>(n)) > 1e-6 * ratio + 1e-9) {
        throw InputError(std::string(what) + " must be a positive multiple of simulation.dt_min");
    }
    return n;
}

double reflect_into(double x, double half_extent) {
    if (x > half_extent) return 2.0 * half_extent - x;
    if (x < -half_extent) return -2.0 * half_extent - x;
    return x;
}

}  // namespace

Phenotype classify(double atp, const PhenotypeParams& p) {
    if (atp < p.atp_death) return Phenotype::Apoptotic;
    if (atp >= p.atp_prolif) return Phenotype::Proliferating;
    return Phenotype::Quiescent;
}

Simulation::Simulation(SimConfig cfg, int threads)
    : cfg_(std::move(cfg)), threads_(threads), base_(cfg_.seed, 0) {
    cfg_.validate();
    if (threads_ < 1) throw InputError("thread count must be at least 1");
}

void Simulation::check_capacity(std::size_t incoming) const {
    if (cells_.size() + incoming > cfg_.max_cells) {
        throw ResourceError("population would exceed the configured cap of " +
                            std::to_string(cfg_.max_cells) + " cells");
    }
}

void Simulation::initialize() {
    cells_.clear();
    events_ = EventCounts{};
    time_min_ = 0.0;
    check_capacity(cfg_.n_initial);
    cells_.reserve(cfg_.n_initial);
    for (std::uint64_t i = 0; i < cfg_.n_initial; ++i) {
        Cell c;
        c.id = i;
        c.radius = cfg_.mech.radius;
        auto d = base_.with_id(i).draws(rng_purpose::kPlacement, 0);
        const Vec3 dir = d.unit_vector();
        // Cube-root radial draw gives a uniform density over the ball.
        const double r = cfg_.placement_radius_um * std::cbrt(d.uniform());
        c.position = dir * r;
        c.metabolic = initial_state(cfg_.env, cfg_.nad_total, cfg_.phen);
        c.phenotype = classify(c.metabolic.atp, cfg_.phen);
        cells_.push_back(c);
    }
    next_id_ = cfg_.n_initial;
    initial_population_ = cells_.size();
}

void Simulation::set_cells(std::vector<Cell> cells) {
    if (cells.size() > cfg_.max_cells) {
        throw ResourceError("population would exceed the configured cap of " +
                            std::to_string(cfg_.max_cells) + " cells");
    }
    cells_ = std::move(cells);
    events_ = EventCounts{};
    initial_population_ = cells_.size();
    std::uint64_t max_id = 0;
    for (const Cell& c : cells_) max_id = std::max(max_id, c.id);
    next_id_ = cells_.empty() ? 0 : max_id + 1;
}

void Simulation::phenotype_update(std::uint64_t step_index) {
    // Cells marked apoptotic at the previous phenotype update die now.
    const std::size_t before = cells_.size();
    std::erase_if(cells_, [](const Cell& c) { return c.phenotype == Phenotype::Apoptotic; });
    events_.deaths += before - cells_.size();

    for (Cell& c : cells_) c.phenotype = classify(c.metabolic.atp, cfg_.phen);

    const double p_divide = cfg_.phen.k_prolif * cfg_.phenotype_dt_min;
    std::vector<Cell> daughters;
    for (const Cell& c : cells_) {
        if (c.phenotype != Phenotype::Proliferating) continue;
        auto d = base_.with_id(c.id).draws(rng_purpose::kDivision, step_index);
        if (d.uniform() >= p_divide) continue;
        Cell baby = c;  // inherits radius, phenotype, and metabolic state
        baby.id = next_id_++;
        baby.position = c.position + d.unit_vector() * c.radius;
        baby.position.x = reflect_into(baby.position.x, cfg_.domain_half_extent_um);
        baby.position.y = reflect_into(baby.position.y, cfg_.domain_half_extent_um);
        baby.position.z = reflect_into(baby.position.z, cfg_.domain_half_extent_um);
        daughters.push_back(baby);
    }
    check_capacity(daughters.size());
    events_.divisions += daughters.size();
    cells_.insert(cells_.end(), daughters.begin(), daughters.end());
}

void Simulation::run(const std::function<void(const Snapshot&)>& on_snapshot) {
    if (cells_.empty() && initial_population_ == 0) initialize();

    const auto emit = [&](std::uint64_t step) {
        if (!on_snapshot) return;
        Snapshot s;
        s.step = step;
        s.time_min = static_cast<double>(step) * cfg_.dt_min;
        s.cells = cells_;
        on_snapshot(s);
    };

    emit(0);
    if (cfg_.duration_min == 0.0) return;

    const std::uint64_t total_steps = steps_in(cfg_.duration_min, cfg_.dt_min, "simulation.duration_min");
    const std::uint64_t pheno_every =
        steps_in(cfg_.phenotype_dt_min, cfg_.dt_min, "simulation.phenotype_dt_min");
    const std::uint64_t snap_every =
        steps_in(cfg_.snapshot_interval_min, cfg_.dt_min, "simulation.snapshot_interval_min");
    for (std::uint64_t k = 1; k <= total_steps; ++k) {
        std::atomic<std::uint64_t> floor_events{0};
        parallel_for(cells_.size(), threads_, [&](std::size_t i) {
            // Dead cells no longer metabolize; they are removed at the next
            // phenotype update.
            if (cells_[i].phenotype == Phenotype::Apoptotic) return;
            IntegrateStats st;
            integrate(cells_[i].metabolic, cfg_.met, cfg_.env, cfg_.dt_min, &st);
            if (st.clamp_events) floor_events.fetch_add(st.clamp_events, std::memory_order_relaxed);
        });
        events_.metabolite_floor_events += floor_events.load();

        if (k % pheno_every == 0) phenotype_update(k);

        const MechanicsStats ms = step_positions(cells_, cfg_, base_, k, threads_);
        events_.coincident_pairs += ms.coincident_pairs;

        time_min_ = static_cast<double>(k) * cfg_.dt_min;
        if (k % snap_every == 0 || k == total_steps) emit(k);
    }
}

RunResult run_simulation(const SimConfig& cfg, int threads) {
    Simulation sim(cfg, threads);
    sim.initialize();
    RunResult out;
    out.initial_population = sim.initial_population();
    sim.run([&](const Snapshot& s) { out.snapshots.push_back(s); });
    out.events = sim.events();
    out.final_population = sim.cells().size();
    return out;
}

}  // namespace spheroid
