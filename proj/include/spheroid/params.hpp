// Model parameter blocks and the flat parameter vector used by the
// sensitivity / calibration pipeline.
//
// Units: lengths in micrometers, time in minutes, viscosity in Pa*s,
// metabolite amounts in model concentration units (abstract), ATP thresholds
// in the same units as the ATP species.
#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "spheroid/error.hpp"

namespace spheroid {

// Cell-cell potential coefficients and the Stokes drag inputs.
struct MechanicalParams {
    double c_cca = 7.2;            // adhesion coefficient
    double c_ccr = 380.0;          // repulsion coefficient
    double radius = 6.0;           // cell radius R (um)
    double adhesion_radius = 7.5;  // per-cell max adhesion distance, 1.25 R (um)
    double eta = 39.15;            // medium viscosity (Pa*s)

    void validate() const {
        if (!(c_cca > 0.0) || !(c_ccr > 0.0) || !(radius > 0.0) || !(eta > 0.0))
            throw InputError("mechanical parameters must be positive");
        if (!(adhesion_radius > radius))
            throw InputError("adhesion_radius must exceed the cell radius");
    }
};

// Reaction rate constants of the reduced metabolic network. The default
// k_glu sits below the calibrated group values so that the default medium
// sustains growth at the default consumption rate yet starves cells when
// k_ene is pushed to its prior upper bound.
struct MetabolicParams {
    double k_glu = 1.8e-12;   // glycolysis
    double k_aer = 5.0e-12;   // aerobic respiration
    double k_ana = 5.0e-12;   // anaerobic fermentation
    double k_ene = 0.033;     // ATP consumption

    void validate() const {
        if (k_glu < 0.0 || k_aer < 0.0 || k_ana < 0.0 || k_ene < 0.0)
            throw InputError("metabolic rate constants must be non-negative");
    }
};

// Division rate and the ATP thresholds of the phenotype state machine.
struct PhenotypeParams {
    double k_prolif = 6.1e-4;   // division rate (1/min)
    double atp_prolif = 1040.0; // at or above: proliferating
    double atp_death = 500.0;   // strictly below: apoptotic

    void validate() const {
        if (!(k_prolif > 0.0)) throw InputError("k_prolif must be positive");
        if (!(atp_death < atp_prolif))
            throw InputError("atp_death must lie below atp_prolif");
    }
};

// Flat vector of the seven sweep/calibration parameters in canonical order.
struct ParameterVector {
    static constexpr std::size_t kDim = 7;

    double k_glu = 1.8e-12;
    double k_aer = 5.0e-12;
    double k_ana = 5.0e-12;
    double k_ene = 0.033;
    double k_prolif = 6.1e-4;
    double atp_prolif = 1040.0;
    double atp_death = 500.0;

    std::array<double, kDim> to_array() const {
        return {k_glu, k_aer, k_ana, k_ene, k_prolif, atp_prolif, atp_death};
    }

    static ParameterVector from_array(const std::array<double, kDim>& a) {
        ParameterVector p;
        p.k_glu = a[0];
        p.k_aer = a[1];
        p.k_ana = a[2];
        p.k_ene = a[3];
        p.k_prolif = a[4];
        p.atp_prolif = a[5];
        p.atp_death = a[6];
        return p;
    }

    static const std::array<std::string, kDim>& names() {
        static const std::array<std::string, kDim> kNames = {
            "k_glu", "k_aer", "k_ana", "k_ene", "k_prolif", "atp_prolif", "atp_death"};
        return kNames;
    }

    MetabolicParams metabolic() const { return {k_glu, k_aer, k_ana, k_ene}; }
    PhenotypeParams phenotype() const { return {k_prolif, atp_prolif, atp_death}; }
};

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
    bool degenerate() const { return lo == hi; }
};

// Prior/search box for the parameter vector. The four calibrated parameters
// carry their uniform prior ranges; k_aer, k_ana and atp_death are fixed
// (degenerate bounds) at their established values.
inline std::array<Bounds, ParameterVector::kDim> parameter_bounds() {
    return {{
        {5.0e-16, 1.0e-11},  // k_glu
        {5.0e-12, 5.0e-12},  // k_aer (fixed)
        {5.0e-12, 5.0e-12},  // k_ana (fixed)
        {3.0e-5, 0.1},       // k_ene
        {3.5e-4, 9.0e-4},    // k_prolif
        {700.0, 1200.0},     // atp_prolif
        {500.0, 500.0},      // atp_death (fixed)
    }};
}

// Collagen density (mg/ml) to medium viscosity (Pa*s). Only the three
// characterized densities are valid.
inline double eta_for_density(double density_mg_ml) {
    if (density_mg_ml == 2.5) return 7.96;
    if (density_mg_ml == 4.0) return 18.42;
    if (density_mg_ml == 6.0) return 39.15;
    throw InputError("no viscosity characterization for collagen density " +
                     std::to_string(density_mg_ml) + " mg/ml (known: 2.5, 4, 6)");
}

}  // namespace spheroid
