#include <cmath>

#include "doctest.h"
#include "polariton/cavity.hpp"
#include "polariton/errors.hpp"
#include "polariton/observables.hpp"

using namespace polariton;
using doctest::Approx;

TEST_CASE("material invariants") {
    CHECK_NOTHROW(validate(MaterialParams{}));
    MaterialParams bad;
    bad.m_ex = 0.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = {};
    bad.m_ph_override = -1.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = {};
    bad.sigma = 0.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("effective charge") {
    CHECK(effective_charge(0.55) == 0.55);
    CHECK(effective_charge(0.0) == 0.0);
    CHECK(effective_charge(1.0) == 1.0);
    CHECK_THROWS_AS(effective_charge(1.1), ValidationError);
    CHECK_THROWS_AS(effective_charge(-0.1), ValidationError);
}

TEST_CASE("lower-branch effective mass") {
    const BranchFractions f{0.45, 0.55};
    CHECK(effective_mass_lp(f, 25.0, 1e-4) == Approx(2.2222113580778e-4).epsilon(1e-12));
    CHECK(effective_mass_lp({1.0, 0.0}, 25.0, 1e-4) == Approx(1e-4).epsilon(1e-15));
    CHECK(effective_mass_lp({0.0, 1.0}, 25.0, 1e-4) == Approx(25.0).epsilon(1e-15));
    // lies between the two constituent masses
    for (double x = 0.05; x < 1.0; x += 0.05) {
        const double m = effective_mass_lp({1.0 - x, x}, 25.0, 1e-4);
        REQUIRE(m > 1e-4);
        REQUIRE(m < 25.0);
    }
    CHECK_THROWS_AS(effective_mass_lp(f, 0.0, 1e-4), ValidationError);
    CHECK_THROWS_AS(effective_mass_lp(f, 25.0, 0.0), ValidationError);
}

TEST_CASE("charge-to-mass ratio") {
    const BranchFractions f{0.45, 0.55};
    const double m = effective_mass_lp(f, 25.0, 1e-4);
    CHECK(charge_to_mass_ratio(0.55, m) == Approx(2475.0121).epsilon(1e-7));
    CHECK_THROWS_AS(charge_to_mass_ratio(0.5, 0.0), ValidationError);
}

TEST_CASE("ground-state charge and chromophore density") {
    CHECK(ground_state_charge(0.0) == 0.0);
    CHECK(ground_state_charge(0.0123) == 0.0123);
    CHECK_THROWS_AS(ground_state_charge(-1e-3), ValidationError);
    CHECK(chromophore_density(1.05e5, 6.14e-17) == Approx(1.7100977198697068e21).epsilon(1e-14));
    CHECK_THROWS_AS(chromophore_density(1.0, 0.0), ValidationError);
}

TEST_CASE("photon mass for a target ratio inverts the ratio") {
    for (double x : {0.2, 0.55, 0.8}) {
        const BranchFractions f{1.0 - x, x};
        for (double target : {500.0, 2400.0, 5000.0}) {
            const double m_ph = photon_mass_for_ratio(f, 25.0, target);
            REQUIRE(m_ph > 0.0);
            REQUIRE(charge_to_mass_ratio(x, effective_mass_lp(f, 25.0, m_ph)) == Approx(target).epsilon(1e-12));
        }
    }
    // ratio > X^2/m_ex for any finite photon mass
    CHECK_THROWS_AS(photon_mass_for_ratio({0.45, 0.55}, 25.0, 0.01), ValidationError);
    CHECK_THROWS_AS(photon_mass_for_ratio({1.0, 0.0}, 25.0, 100.0), ValidationError);
}

TEST_CASE("charged polariton report") {
    MaterialParams mat;
    const BranchFractions f{0.45, 0.55};
    const GroundStateContent gs{0.009, 0.0101};
    const auto r = charged_polariton_report(f, gs, mat, 1e-4);
    CHECK(r.e_eff_lp == 0.55);
    CHECK(r.m_eff_lp == Approx(2.2222113580778e-4).epsilon(1e-12));
    CHECK(r.charge_to_mass == Approx(2475.0121).epsilon(1e-7));
    CHECK(std::abs(r.charge_to_mass - 2400.0) / 2400.0 < 0.10);
    CHECK(r.gs_charge == 0.0101);
    CHECK(r.density == Approx(1.710e21).epsilon(5e-3));

    SUBCASE("zero coupling puts the lower branch on one side") {
        const auto red = solve_hopfield(1.0, {1.22, 0.0});
        const auto rep = charged_polariton_report(branch_fractions(red.coefficients, Branch::Lower),
                                                  ground_state_content(red.coefficients), mat, 1e-4);
        CHECK(rep.gs_charge == 0.0);
        CHECK(rep.e_eff_lp == Approx(0.0).epsilon(1e-15));
        const auto blue = solve_hopfield(1.5, {1.22, 0.0});
        CHECK(branch_fractions(blue.coefficients, Branch::Lower).exciton_fraction == Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("observable scalings") {
    CHECK(charge_to_mass_ratio(0.0, 3.0) == 0.0);
    CHECK(chromophore_density(1e5, 1e-16) == Approx(1e21).epsilon(1e-14));
    CHECK(chromophore_density(2.1e5, 6.14e-17) == Approx(2.0 * chromophore_density(1.05e5, 6.14e-17)).epsilon(1e-15));
    // photon term dominates at the operating point: doubling m_ph roughly halves the ratio
    const BranchFractions f{0.45, 0.55};
    const double r1 = charge_to_mass_ratio(0.55, effective_mass_lp(f, 25.0, 1e-4));
    const double r2 = charge_to_mass_ratio(0.55, effective_mass_lp(f, 25.0, 2e-4));
    CHECK(r2 / r1 == Approx(0.5).epsilon(1e-4));
}
