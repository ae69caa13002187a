// Reduced intracellular metabolic network.
//
// Four reactions over seven species, mass-action kinetics:
//   glycolysis:    Glu + 2 NAD+          -> 2 Pyr + 2 NADH + 2 ATP   r = k_glu * glu * nad_plus^2
//   aerobic:       Pyr + NADH + 3 O2     -> 17 ATP + NAD+            r = k_aer * pyr * nadh * o2
//   fermentation:  Pyr + NADH            -> Lac + NAD+               r = k_ana * pyr * nadh
//   consumption:   ATP                   -> (sink)                   r = k_ene * atp
//
// Glucose and oxygen act as boundary species: the environment is assumed to
// hold them at fixed extracellular levels, implemented by resetting them to
// their clamp values after every integration substep. All reactions are
// treated as irreversible. NAD+ + NADH is invariant under the stoichiometry.
#pragma once

#include <array>
#include <cstdint>

#include "spheroid/params.hpp"

namespace spheroid {

struct MetabolicState {
    double glu = 0.0;
    double nad_plus = 0.0;
    double nadh = 0.0;
    double pyr = 0.0;
    double lac = 0.0;
    double o2 = 0.0;
    double atp = 0.0;
};

struct ReactionRates {
    double glycolysis = 0.0;
    double aerobic = 0.0;
    double fermentation = 0.0;
    double consumption = 0.0;
};

// Extracellular boundary conditions and integration controls.
struct MetabolicEnvironment {
    double glucose_clamp = 1.0e8;
    double oxygen_clamp = 1.0e8;
    double substep = 0.01;  // RK4 substep (min)
};

ReactionRates reaction_rates(const MetabolicState& s, const MetabolicParams& p);

// Net species derivative at the given rates (stoichiometry columns applied).
MetabolicState apply_stoichiometry(const ReactionRates& r);

struct IntegrateStats {
    std::uint64_t clamp_events = 0;  // times a species was floored at zero
};

// Advance the state by dt using fixed-substep RK4. Glucose and oxygen are
// reset to their clamp values and all species floored at zero after each
// substep. Throws NumericalError naming the species if a value turns
// non-finite.
void integrate(MetabolicState& s, const MetabolicParams& p, const MetabolicEnvironment& env,
               double dt, IntegrateStats* stats = nullptr);

// State a newly seeded cell starts from: boundary species at their clamps,
// the NAD pool fully oxidized, no intermediates, ATP midway between the death
// and proliferation thresholds.
MetabolicState initial_state(const MetabolicEnvironment& env, double nad_total,
                             const PhenotypeParams& phen);

}  // namespace spheroid
