// Simulation configuration: one struct covering scheduling, initial seeding,
// the mechanical and metabolic parameter blocks, and phenotype thresholds.
// Loaded from and saved to JSON; load(save(c)) reproduces c exactly.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spheroid/metabolism.hpp"
#include "spheroid/params.hpp"

namespace spheroid {

struct SimConfig {
    // Scheduling.
    std::uint64_t seed = 1;
    double duration_min = 10080.0;          // one week
    double dt_min = 0.1;                    // mechanics step
    double phenotype_dt_min = 6.0;          // phenotype update interval
    double snapshot_interval_min = 1440.0;  // daily snapshots
    std::uint64_t max_cells = 2'000'000;    // hard population cap

    // Initial seeding: cells placed uniformly in a ball of this radius.
    // The default is a single founder cell at the domain centre.
    std::uint64_t n_initial = 1;
    double placement_radius_um = 0.0;

    // Reflective cubic domain [-half_extent, +half_extent]^3.
    double domain_half_extent_um = 500.0;

    // Mechanics. If eta_override_pa_s is set it takes precedence over the
    // collagen-density lookup.
    double density_mg_ml = 6.0;
    std::optional<double> eta_override_pa_s{};
    MechanicalParams mech{};
    double locomotive_scale = 1.0;  // in [0, 1]; 0.1 models epithelial cells
    double locomotive_gain = 1.0;   // converts polynomial output to force units

    // Metabolism.
    MetabolicParams met{};
    MetabolicEnvironment env{};
    double nad_total = 150.0;

    // Phenotype thresholds and division rate.
    PhenotypeParams phen{};

    double eta_pa_s() const;
    void validate() const;
};

SimConfig load_config(const std::string& path);
SimConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const SimConfig& c);
void save_config(const SimConfig& c, const std::string& path);

}  // namespace spheroid
