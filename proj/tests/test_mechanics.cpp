// Pairwise forces, locomotion, drag, the neighbor grid, and the position
// update, checked against hand-derived values and pairwise symmetries.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "spheroid/config.hpp"
#include "spheroid/error.hpp"
#include "spheroid/mechanics.hpp"
#include "spheroid/rng.hpp"

using namespace spheroid;

namespace {

// Two-cell configuration along the x axis at the given separation.
std::vector<Cell> pair_at(double separation, Phenotype state = Phenotype::Quiescent) {
    std::vector<Cell> cells(2);
    cells[0].id = 0;
    cells[0].position = {0.0, 0.0, 0.0};
    cells[0].phenotype = state;
    cells[1].id = 1;
    cells[1].position = {separation, 0.0, 0.0};
    cells[1].phenotype = state;
    return cells;
}

SimConfig quiet_config() {
    SimConfig cfg;
    cfg.density_mg_ml = 2.5;  // eta = 7.96
    cfg.locomotive_scale = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("pair force magnitudes at the half-range points") {
    MechanicalParams p;  // C_cca = 7.2, C_ccr = 380, R = 6, R_A = 7.5
    const Vec3 xhat{1.0, 0.0, 0.0};
    const double rep_range = 12.0;
    const double adh_range = 15.0;

    // Half the repulsion range: repulsion dominates at 380/4 = 95.
    {
        const Vec3 f = pair_force(xhat, 6.0, rep_range, adh_range, p);
        const double repulsion = 380.0 * 0.25;
        const double adhesion = 7.2 * std::pow(1.0 - 6.0 / 15.0, 2);
        CHECK(f.x == doctest::Approx(repulsion - adhesion));
        CHECK(f.y == 0.0);
        CHECK(f.z == 0.0);
    }
    // Half the adhesion range with repulsion off: pure attraction of 1.8.
    {
        MechanicalParams rep_off = p;
        rep_off.c_ccr = 0.0;
        const Vec3 f = pair_force(xhat, 7.5, rep_range, adh_range, rep_off);
        CHECK(f.x == doctest::Approx(-7.2 * 0.25));
    }
    // Support boundaries and beyond.
    CHECK(pair_force(xhat, adh_range, rep_range, adh_range, p).x == doctest::Approx(0.0));
    CHECK(pair_force(xhat, 20.0, rep_range, adh_range, p).x == 0.0);
    {
        MechanicalParams adh_off = p;
        adh_off.c_cca = 0.0;
        CHECK(pair_force(xhat, rep_range, rep_range, adh_range, adh_off).x ==
              doctest::Approx(0.0));
    }
}

TEST_CASE("net pair force is attractive in the gap band and repulsive at contact") {
    MechanicalParams p;
    const Vec3 xhat{1.0, 0.0, 0.0};
    // Between the repulsion and adhesion ranges only adhesion acts.
    const Vec3 gap = pair_force(xhat, 13.0, 12.0, 15.0, p);
    CHECK(gap.x < 0.0);
    // Deep overlap: repulsion wins by two orders of magnitude.
    const Vec3 contact = pair_force(xhat, 2.0, 12.0, 15.0, p);
    CHECK(contact.x > 0.0);
}

TEST_CASE("swapping the pair negates the force exactly") {
    MechanicalParams p;
    const Vec3 dhat{0.6, 0.64, std::sqrt(1.0 - 0.36 - 0.4096)};
    const Vec3 f_ij = pair_force(dhat, 9.0, 12.0, 15.0, p);
    const Vec3 f_ji = pair_force(-dhat, 9.0, 12.0, 15.0, p);
    CHECK(f_ij.x == doctest::Approx(-f_ji.x).epsilon(1e-12));
    CHECK(f_ij.y == doctest::Approx(-f_ji.y).epsilon(1e-12));
    CHECK(f_ij.z == doctest::Approx(-f_ji.z).epsilon(1e-12));
}

TEST_CASE("locomotive magnitude polynomial and its domain") {
    CHECK(locomotive_magnitude(0.0, 1.0, 1.0) == doctest::Approx(0.06));
    CHECK(locomotive_magnitude(1.0, 1.0, 1.0) == doctest::Approx(4.96));
    CHECK(locomotive_magnitude(0.5, 1.0, 1.0) == doctest::Approx(1.1075));
    CHECK(locomotive_magnitude(1.0, 0.1, 1.0) == doctest::Approx(0.496));
    CHECK(locomotive_magnitude(0.7, 0.0, 1.0) == 0.0);
    CHECK(locomotive_magnitude(1.0, 1.0, 2.5) == doctest::Approx(12.4));
    CHECK_THROWS_AS(locomotive_magnitude(-0.1, 1.0, 1.0), InputError);
    CHECK_THROWS_AS(locomotive_magnitude(1.1, 1.0, 1.0), InputError);
}

TEST_CASE("drag coefficient matches 6 pi R eta") {
    CHECK(drag_coefficient(6.0, 7.96) == doctest::Approx(900.2548).epsilon(1e-4));
    // Doubling the viscosity doubles the drag, halving velocity for a force.
    CHECK(drag_coefficient(6.0, 2.0 * 7.96) ==
          doctest::Approx(2.0 * drag_coefficient(6.0, 7.96)));
}

TEST_CASE("neighbor grid enumerates exactly the brute-force pairs") {
    const RngStream rng(99, 0);
    auto d = rng.draws(rng_purpose::kGeneral, 0);
    std::vector<Cell> cells(200);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].id = i;
        cells[i].position = {d.uniform(-60.0, 60.0), d.uniform(-60.0, 60.0),
                             d.uniform(-60.0, 60.0)};
    }
    const double cutoff = 15.0;
    NeighborGrid grid(cutoff);
    grid.build(cells);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::set<std::uint32_t> from_grid;
        grid.for_neighbors(cells[i].position, [&](std::uint32_t j) {
            if (j != i && (cells[i].position - cells[j].position).norm() <= cutoff)
                from_grid.insert(j);
        });
        std::set<std::uint32_t> brute;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j != i && (cells[i].position - cells[j].position).norm() <= cutoff)
                brute.insert(static_cast<std::uint32_t>(j));
        }
        REQUIRE(from_grid == brute);
    }
}

TEST_CASE("an isolated quiescent cell does not move") {
    SimConfig cfg = quiet_config();
    cfg.locomotive_scale = 1.0;  // must still be inert: quiescent cells get no locomotion
    std::vector<Cell> cells(1);
    cells[0].id = 0;
    cells[0].position = {3.0, -2.0, 1.0};
    cells[0].phenotype = Phenotype::Quiescent;
    const RngStream rng(1, 0);
    step_positions(cells, cfg, rng, 1, 1);
    CHECK(cells[0].position.x == 3.0);
    CHECK(cells[0].position.y == -2.0);
    CHECK(cells[0].position.z == 1.0);
}

TEST_CASE("overlapping quiescent cells move apart symmetrically") {
    SimConfig cfg = quiet_config();
    auto cells = pair_at(6.0);
    const RngStream rng(1, 0);
    step_positions(cells, cfg, rng, 1, 1);
    CHECK(cells[0].position.x == doctest::Approx(-cells[1].position.x + 6.0).epsilon(1e-12));
    CHECK(cells[0].position.x < 0.0);
    CHECK(cells[1].position.x > 6.0);
}

TEST_CASE("two-cell separation grows by the hand-computed increment") {
    // Repulsion-only configuration isolates the force -> velocity -> Euler
    // path: d(separation) = 2 * (95 / (6 pi * 6 * 7.96)) * 0.1.
    SimConfig cfg = quiet_config();
    cfg.mech.c_cca = 0.0;
    auto cells = pair_at(6.0);
    const RngStream rng(1, 0);
    step_positions(cells, cfg, rng, 1, 1);
    const double separation = (cells[1].position - cells[0].position).norm();
    const double expected = 6.0 + 2.0 * (95.0 / 900.2548) * 0.1;
    CHECK(separation == doctest::Approx(expected).epsilon(1e-5));

    // With adhesion restored the increment shrinks by the attraction at 6 um.
    SimConfig cfg_full = quiet_config();
    auto cells_full = pair_at(6.0);
    step_positions(cells_full, cfg_full, rng, 1, 1);
    const double sep_full = (cells_full[1].position - cells_full[0].position).norm();
    const double net = 95.0 - 7.2 * std::pow(1.0 - 6.0 / 15.0, 2);
    CHECK(sep_full == doctest::Approx(6.0 + 2.0 * (net / 900.2548) * 0.1).epsilon(1e-5));
}

TEST_CASE("displacements scale inversely with viscosity") {
    auto run = [](double density) {
        SimConfig cfg;
        cfg.density_mg_ml = density;
        cfg.locomotive_scale = 0.0;
        auto cells = pair_at(8.0);
        const RngStream rng(5, 0);
        step_positions(cells, cfg, rng, 1, 1);
        return cells[1].position.x - 8.0;
    };
    const double low = run(2.5);    // eta = 7.96
    const double high = run(6.0);   // eta = 39.15
    CHECK(low / high == doctest::Approx(39.15 / 7.96).epsilon(1e-9));
}

TEST_CASE("total displacement of a closed quiescent system vanishes") {
    SimConfig cfg = quiet_config();
    const RngStream rng(2, 0);
    auto d = rng.draws(rng_purpose::kGeneral, 0);
    std::vector<Cell> cells(50);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].id = i;
        cells[i].position = {d.uniform(-20.0, 20.0), d.uniform(-20.0, 20.0),
                             d.uniform(-20.0, 20.0)};
    }
    std::vector<Vec3> before;
    for (const Cell& c : cells) before.push_back(c.position);
    step_positions(cells, cfg, rng, 3, 1);
    Vec3 net{};
    double moved = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        net += cells[i].position - before[i];
        moved += (cells[i].position - before[i]).norm();
    }
    REQUIRE(moved > 0.0);  // the configuration is dense enough to interact
    CHECK(net.norm() < 1e-10 * moved);
}

TEST_CASE("coincident cells separate along a random direction") {
    SimConfig cfg = quiet_config();
    auto cells = pair_at(0.0);
    const RngStream rng(9, 0);
    const MechanicsStats stats = step_positions(cells, cfg, rng, 1, 1);
    CHECK(stats.coincident_pairs == 2);
    CHECK((cells[0].position - cells[1].position).norm() > 0.0);
}

TEST_CASE("apoptotic cells neither move nor push their neighbours") {
    SimConfig cfg = quiet_config();
    auto cells = pair_at(6.0);
    cells[0].phenotype = Phenotype::Apoptotic;
    const RngStream rng(1, 0);
    step_positions(cells, cfg, rng, 1, 1);
    CHECK(cells[0].position.x == 0.0);   // the dead cell stays put
    CHECK(cells[1].position.x == 6.0);   // and exerts no force
}

TEST_CASE("proliferating cells receive locomotive kicks bounded by the polynomial") {
    SimConfig cfg = quiet_config();
    cfg.locomotive_scale = 1.0;
    cfg.locomotive_gain = 1.0;
    std::vector<Cell> cells(1);
    cells[0].id = 0;
    cells[0].phenotype = Phenotype::Proliferating;
    const RngStream rng(123, 0);
    double max_step = 0.0;
    for (std::uint64_t k = 1; k <= 200; ++k) {
        const Vec3 before = cells[0].position;
        step_positions(cells, cfg, rng, k, 1);
        max_step = std::max(max_step, (cells[0].position - before).norm());
    }
    CHECK(max_step > 0.0);
    CHECK(max_step <= 4.96 / 900.2548 * 0.1 * (1.0 + 1e-12));
}

TEST_CASE("reflective walls fold positions back into the domain") {
    SimConfig cfg = quiet_config();
    cfg.domain_half_extent_um = 10.0;
    auto cells = pair_at(6.0);
    // Push cell 1 toward the wall at x = 10 from 9.999 um away.
    cells[0].position = {3.999, 0.0, 0.0};
    cells[1].position = {9.999, 0.0, 0.0};
    const RngStream rng(1, 0);
    step_positions(cells, cfg, rng, 1, 1);
    CHECK(cells[1].position.x <= 10.0);
    CHECK(cells[1].position.x > 9.99);
}

TEST_CASE("the position update is independent of the thread count") {
    SimConfig cfg;
    cfg.locomotive_scale = 1.0;
    const RngStream rng(31, 0);
    auto d = rng.draws(rng_purpose::kGeneral, 1);
    std::vector<Cell> base(120);
    for (std::size_t i = 0; i < base.size(); ++i) {
        base[i].id = i;
        base[i].phenotype = (i % 3 == 0) ? Phenotype::Proliferating : Phenotype::Quiescent;
        base[i].position = {d.uniform(-30.0, 30.0), d.uniform(-30.0, 30.0),
                            d.uniform(-30.0, 30.0)};
    }
    auto one = base;
    auto four = base;
    for (std::uint64_t k = 1; k <= 5; ++k) {
        step_positions(one, cfg, rng, k, 1);
        step_positions(four, cfg, rng, k, 4);
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(one[i].position.x == four[i].position.x);
        CHECK(one[i].position.y == four[i].position.y);
        CHECK(one[i].position.z == four[i].position.z);
    }
}
