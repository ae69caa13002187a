// Metabolic network: rate laws, stoichiometry, RK4 integration against
// analytic oracles, conservation, and failure handling.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "spheroid/error.hpp"
#include "spheroid/metabolism.hpp"
#include "spheroid/params.hpp"

using namespace spheroid;

namespace {

MetabolicState ones() {
    MetabolicState s;
    s.glu = s.nad_plus = s.nadh = s.pyr = s.lac = s.o2 = s.atp = 1.0;
    return s;
}

constexpr double kSteadyTolerance = 5e-3;

// Closed-form steady state of the clamped network. With glu = g and o2 = w
// held, pyr and nadh stay equal (both start at 0 and share the same net
// rate), so nadh solves 2 k_glu g (T - x)^2 = (k_aer w + k_ana) x^2 and the
// ATP production plateau is x^2 (k_ana + 18 k_aer w).
double steady_atp(const MetabolicParams& k, double g, double w, double nad_total, double k_ene) {
    const double two_a = 2.0 * k.k_glu * g;
    const double b = k.k_aer * w + k.k_ana;
    const double rho = std::sqrt(b / two_a);
    const double x = nad_total / (1.0 + rho);
    const double production = x * x * (k.k_ana + 18.0 * k.k_aer * w);
    return production / k_ene;
}

}  // namespace

TEST_CASE("mass-action rates vanish on the zero state") {
    MetabolicParams k;
    const ReactionRates r = reaction_rates(MetabolicState{}, k);
    CHECK(r.glycolysis == 0.0);
    CHECK(r.aerobic == 0.0);
    CHECK(r.fermentation == 0.0);
    CHECK(r.consumption == 0.0);
}

TEST_CASE("rate orders follow the stated kinetic laws") {
    MetabolicParams k;
    k.k_glu = k.k_aer = k.k_ana = k.k_ene = 1.0;

    const ReactionRates base = reaction_rates(ones(), k);
    CHECK(base.glycolysis == doctest::Approx(1.0));
    CHECK(base.aerobic == doctest::Approx(1.0));
    CHECK(base.fermentation == doctest::Approx(1.0));
    CHECK(base.consumption == doctest::Approx(1.0));

    MetabolicState s = ones();
    s.nad_plus = 2.0;
    const ReactionRates r = reaction_rates(s, k);
    CHECK(r.glycolysis == doctest::Approx(4.0));     // second order in NAD+
    CHECK(r.fermentation == doctest::Approx(1.0));   // independent of NAD+
}

TEST_CASE("stoichiometry matrix matches the reaction table") {
    {
        ReactionRates r;
        r.glycolysis = 1.0;
        const MetabolicState d = apply_stoichiometry(r);
        CHECK(d.glu == doctest::Approx(-1.0));
        CHECK(d.nad_plus == doctest::Approx(-2.0));
        CHECK(d.nadh == doctest::Approx(2.0));
        CHECK(d.pyr == doctest::Approx(2.0));
        CHECK(d.atp == doctest::Approx(2.0));
        CHECK(d.o2 == 0.0);
        CHECK(d.lac == 0.0);
    }
    {
        ReactionRates r;
        r.aerobic = 1.0;
        const MetabolicState d = apply_stoichiometry(r);
        CHECK(d.atp == doctest::Approx(17.0));
        CHECK(d.o2 == doctest::Approx(-3.0));
        CHECK(d.pyr == doctest::Approx(-1.0));
        CHECK(d.nadh == doctest::Approx(-1.0));
        CHECK(d.nad_plus == doctest::Approx(1.0));
    }
    {
        ReactionRates r;
        r.fermentation = 1.0;
        const MetabolicState d = apply_stoichiometry(r);
        CHECK(d.lac == doctest::Approx(1.0));
        CHECK(d.pyr == doctest::Approx(-1.0));
        CHECK(d.nadh == doctest::Approx(-1.0));
        CHECK(d.nad_plus == doctest::Approx(1.0));
        CHECK(d.atp == 0.0);
    }
    {
        const MetabolicState d = apply_stoichiometry(ReactionRates{});
        CHECK(d.glu == 0.0);
        CHECK(d.nad_plus == 0.0);
        CHECK(d.nadh == 0.0);
        CHECK(d.pyr == 0.0);
        CHECK(d.lac == 0.0);
        CHECK(d.o2 == 0.0);
        CHECK(d.atp == 0.0);
    }
}

TEST_CASE("zero rate constants leave the state unchanged") {
    MetabolicParams k;
    k.k_glu = k.k_aer = k.k_ana = k.k_ene = 0.0;
    MetabolicEnvironment env;
    env.glucose_clamp = 3.0;
    env.oxygen_clamp = 4.0;
    MetabolicState s;
    s.glu = 3.0;
    s.o2 = 4.0;
    s.nad_plus = 5.0;
    s.atp = 6.0;
    const MetabolicState before = s;
    integrate(s, k, env, 10.0);
    CHECK(s.glu == before.glu);
    CHECK(s.nad_plus == before.nad_plus);
    CHECK(s.atp == before.atp);
}

TEST_CASE("pure ATP decay reproduces the analytic exponential") {
    MetabolicParams k;
    k.k_glu = k.k_aer = k.k_ana = 0.0;
    k.k_ene = 0.5;
    MetabolicEnvironment env;
    env.glucose_clamp = 0.0;
    env.oxygen_clamp = 0.0;
    env.substep = 0.02;  // k_ene * substep = 0.01
    MetabolicState s;
    s.atp = 1000.0;
    integrate(s, k, env, 7.0);
    const double expected = 1000.0 * std::exp(-0.5 * 7.0);
    CHECK(std::abs(s.atp - expected) / expected < 1e-8);
}

TEST_CASE("halving the substep shrinks the decay error about sixteenfold") {
    MetabolicParams k;
    k.k_glu = k.k_aer = k.k_ana = 0.0;
    k.k_ene = 2.0;
    MetabolicEnvironment env;
    env.glucose_clamp = 0.0;
    env.oxygen_clamp = 0.0;
    const double t = 1.0;
    const double exact = 1000.0 * std::exp(-2.0 * t);

    const auto run = [&](double h) {
        MetabolicState s;
        s.atp = 1000.0;
        MetabolicEnvironment e = env;
        e.substep = h;
        integrate(s, k, e, t);
        return std::abs(s.atp - exact);
    };

    const double err_h = run(0.25);
    const double err_half = run(0.125);
    const double ratio = err_h / err_half;
    CHECK(ratio > 10.0);
    CHECK(ratio < 24.0);
}

TEST_CASE("the NAD pool is conserved over ten thousand steps") {
    MetabolicParams k;  // defaults
    MetabolicEnvironment env;
    PhenotypeParams phen;
    MetabolicState s = initial_state(env, 150.0, phen);
    const double total0 = s.nad_plus + s.nadh;
    for (int i = 0; i < 10000; ++i) integrate(s, k, env, 0.1);
    const double drift = std::abs((s.nad_plus + s.nadh) - total0) / total0;
    CHECK(drift < 1e-9);
}

TEST_CASE("species stay non-negative from a non-negative start") {
    MetabolicParams k;
    k.k_glu = 1e-10;
    k.k_aer = 1e-11;
    k.k_ana = 1e-11;
    k.k_ene = 0.09;
    MetabolicEnvironment env;
    PhenotypeParams phen;
    MetabolicState s = initial_state(env, 150.0, phen);
    for (int i = 0; i < 2000; ++i) {
        integrate(s, k, env, 0.1);
        CHECK(s.nad_plus >= 0.0);
        CHECK(s.nadh >= 0.0);
        CHECK(s.pyr >= 0.0);
        CHECK(s.lac >= 0.0);
        CHECK(s.atp >= 0.0);
    }
}

TEST_CASE("oxygen availability raises the ATP plateau over fermentation alone") {
    MetabolicEnvironment base;
    PhenotypeParams phen;

    MetabolicParams aer;
    aer.k_ana = 0.0;  // aerobic path only
    MetabolicEnvironment env_aer = base;

    MetabolicParams ana;  // fermentation only: no oxygen supplied
    MetabolicEnvironment env_ana = base;
    env_ana.oxygen_clamp = 0.0;

    MetabolicState s_aer = initial_state(env_aer, 150.0, phen);
    MetabolicState s_ana = initial_state(env_ana, 150.0, phen);
    for (int i = 0; i < 40000; ++i) {
        integrate(s_aer, aer, env_aer, 0.1);
        integrate(s_ana, ana, env_ana, 0.1);
    }
    CHECK(s_aer.atp > s_ana.atp);
}

TEST_CASE("long runs land on the closed-form steady state for each group") {
    MetabolicEnvironment env;
    env.substep = 0.05;
    PhenotypeParams phen;

    struct Group {
        double k_glu, k_ene;
    };
    // The three calibrated parameter groups (k_aer = k_ana = 5e-12 shared).
    const Group groups[] = {{0.66e-11, 0.033}, {0.66e-11, 0.065}, {0.54e-11, 0.084}};
    for (const Group& g : groups) {
        MetabolicParams k;
        k.k_glu = g.k_glu;
        k.k_ene = g.k_ene;
        const double expected =
            steady_atp(k, env.glucose_clamp, env.oxygen_clamp, 150.0, g.k_ene);
        MetabolicState s = initial_state(env, 150.0, phen);
        for (int i = 0; i < 40000; ++i) integrate(s, k, env, 0.1);
        CHECK(std::abs(s.atp - expected) / expected < kSteadyTolerance);
    }
}

TEST_CASE("the three calibrated groups order their ATP plateaus as observed") {
    MetabolicEnvironment env;
    MetabolicParams k;
    // Plateau ATP = production / k_ene decides the phenotype regime.
    k.k_glu = 0.66e-11;
    k.k_ene = 0.033;
    const double large = steady_atp(k, env.glucose_clamp, env.oxygen_clamp, 150.0, k.k_ene);
    k.k_ene = 0.065;
    const double medium = steady_atp(k, env.glucose_clamp, env.oxygen_clamp, 150.0, k.k_ene);
    k.k_glu = 0.54e-11;
    k.k_ene = 0.084;
    const double small = steady_atp(k, env.glucose_clamp, env.oxygen_clamp, 150.0, k.k_ene);

    CHECK(large > 1040.0);    // sustained proliferation
    CHECK(medium > 1025.0);   // sustained proliferation at its own threshold
    CHECK(small < 1050.0);    // growth stalls below the proliferation gate
    CHECK(small > 500.0);     // but cells survive
    CHECK(large > medium);
    CHECK(medium > small);
}

TEST_CASE("runaway rate constants raise a numerical error naming a species") {
    MetabolicParams k;
    k.k_glu = 1e30;
    k.k_aer = 1e30;
    k.k_ana = 1e30;
    k.k_ene = 0.0;
    MetabolicEnvironment env;
    PhenotypeParams phen;
    MetabolicState s = initial_state(env, 150.0, phen);
    bool threw = false;
    try {
        integrate(s, k, env, 10.0);
    } catch (const NumericalError& e) {
        threw = true;
        const std::string msg = e.what();
        const bool names_species = msg.find("atp") != std::string::npos ||
                                   msg.find("pyr") != std::string::npos ||
                                   msg.find("nad") != std::string::npos ||
                                   msg.find("lac") != std::string::npos;
        CHECK(names_species);
    }
    CHECK(threw);
}

TEST_CASE("initial state follows the declared convention") {
    MetabolicEnvironment env;
    env.glucose_clamp = 2.0e8;
    env.oxygen_clamp = 3.0e8;
    PhenotypeParams phen;
    phen.atp_death = 400.0;
    phen.atp_prolif = 1000.0;
    const MetabolicState s = initial_state(env, 150.0, phen);
    CHECK(s.glu == 2.0e8);
    CHECK(s.o2 == 3.0e8);
    CHECK(s.nad_plus == 150.0);
    CHECK(s.nadh == 0.0);
    CHECK(s.pyr == 0.0);
    CHECK(s.lac == 0.0);
    CHECK(s.atp == doctest::Approx(700.0));
}
