#include "spheroid/metabolism.hpp"

#include <cmath>
#include <string>

#include "spheroid/error.hpp"

namespace spheroid {

ReactionRates reaction_rates(const MetabolicState& s, const MetabolicParams& p) {
    ReactionRates r;
    r.glycolysis = p.k_glu * s.glu * s.nad_plus * s.nad_plus;
    r.aerobic = p.k_aer * s.pyr * s.nadh * s.o2;
    r.fermentation = p.k_ana * s.pyr * s.nadh;
    r.consumption = p.k_ene * s.atp;
    return r;
}

MetabolicState apply_stoichiometry(const ReactionRates& r) {
    MetabolicState d;
    d.glu = -r.glycolysis;
    // NADH change is the exact negation of the NAD+ change so the pool total
    // is conserved to rounding even after many steps.
    d.nad_plus = -2.0 * r.glycolysis + r.aerobic + r.fermentation;
    d.nadh = -d.nad_plus;
    d.pyr = 2.0 * r.glycolysis - r.aerobic - r.fermentation;
    d.lac = r.fermentation;
    d.o2 = -3.0 * r.aerobic;
    d.atp = 2.0 * r.glycolysis + 17.0 * r.aerobic - r.consumption;
    return d;
}

namespace {

inline MetabolicState derivative(const MetabolicState& s, const MetabolicParams& p) {
    return apply_stoichiometry(reaction_rates(s, p));
}

inline MetabolicState axpy(const MetabolicState& s, double h, const MetabolicState& d) {
    MetabolicState r;
    r.glu = s.glu + h * d.glu;
    r.nad_plus = s.nad_plus + h * d.nad_plus;
    r.nadh = s.nadh + h * d.nadh;
    r.pyr = s.pyr + h * d.pyr;
    r.lac = s.lac + h * d.lac;
    r.o2 = s.o2 + h * d.o2;
    r.atp = s.atp + h * d.atp;
    return r;
}

inline void check_finite(const MetabolicState& s) {
    struct Entry {
        double value;
        const char* name;
    };
    const Entry entries[] = {{s.glu, "glu"},  {s.nad_plus, "nad_plus"}, {s.nadh, "nadh"},
                             {s.pyr, "pyr"},  {s.lac, "lac"},           {s.o2, "o2"},
                             {s.atp, "atp"}};
    for (const auto& e : entries) {
        if (!std::isfinite(e.value))
            throw NumericalError(std::string("metabolic species '") + e.name +
                                 "' became non-finite during integration");
    }
}

inline std::uint64_t floor_at_zero(MetabolicState& s) {
    std::uint64_t events = 0;
    double* fields[] = {&s.glu, &s.nad_plus, &s.nadh, &s.pyr, &s.lac, &s.o2, &s.atp};
    for (double* f : fields) {
        if (*f < 0.0) {
            *f = 0.0;
            ++events;
        }
    }
    return events;
}

}  // namespace

void integrate(MetabolicState& s, const MetabolicParams& p, const MetabolicEnvironment& env,
               double dt, IntegrateStats* stats) {
    if (dt <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(dt / env.substep - 1e-12)));
    const double h = dt / n;
    for (int i = 0; i < n; ++i) {
        const MetabolicState k1 = derivative(s, p);
        const MetabolicState k2 = derivative(axpy(s, 0.5 * h, k1), p);
        const MetabolicState k3 = derivative(axpy(s, 0.5 * h, k2), p);
        const MetabolicState k4 = derivative(axpy(s, h, k3), p);
        MetabolicState incr;
        incr.glu = (k1.glu + 2.0 * k2.glu + 2.0 * k3.glu + k4.glu) / 6.0;
        incr.nad_plus =
            (k1.nad_plus + 2.0 * k2.nad_plus + 2.0 * k3.nad_plus + k4.nad_plus) / 6.0;
        incr.nadh = -incr.nad_plus;
        incr.pyr = (k1.pyr + 2.0 * k2.pyr + 2.0 * k3.pyr + k4.pyr) / 6.0;
        incr.lac = (k1.lac + 2.0 * k2.lac + 2.0 * k3.lac + k4.lac) / 6.0;
        incr.o2 = (k1.o2 + 2.0 * k2.o2 + 2.0 * k3.o2 + k4.o2) / 6.0;
        incr.atp = (k1.atp + 2.0 * k2.atp + 2.0 * k3.atp + k4.atp) / 6.0;
        s = axpy(s, h, incr);

        // Boundary species are held at their environmental levels.
        s.glu = env.glucose_clamp;
        s.o2 = env.oxygen_clamp;
        check_finite(s);
        const std::uint64_t ev = floor_at_zero(s);
        if (stats) stats->clamp_events += ev;
    }
}

MetabolicState initial_state(const MetabolicEnvironment& env, double nad_total,
                             const PhenotypeParams& phen) {
    MetabolicState s;
    s.glu = env.glucose_clamp;
    s.o2 = env.oxygen_clamp;
    s.nad_plus = nad_total;
    s.nadh = 0.0;
    s.pyr = 0.0;
    s.lac = 0.0;
    s.atp = 0.5 * (phen.atp_death + phen.atp_prolif);
    return s;
}

}  // namespace spheroid
