// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nfdof/dof.hpp"

using namespace nfdof;

namespace {
const double pi = std::acos(-1.0);
}

TEST_CASE("dof_broadside closed form", "[dof]")
{
    auto p = dof_broadside(60.0, 100.0, 200.0, 2000.0, 1.0);
    CHECK(std::abs(p.value - 14.4) < 1e-12);
    REQUIRE(p.omega_intervals.size() == 1);
    CHECK(std::abs(p.omega_intervals[0].lo - (-22.5)) < 1e-12);
    CHECK(std::abs(p.omega_intervals[0].hi - (-8.1)) < 1e-12);
    CHECK(p.formula == "broadside");

    CHECK(dof_broadside(70.0, 70.0, 200.0, 2000.0, 1.0).value == 0.0);
    CHECK(dof_broadside(0.0, 100.0, 500.0, 500.0 * (1.0 + 1e-12), 1.0).value < 1e-6);

    CHECK_THROWS_AS(dof_broadside(-1.0, 5.0, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dof_broadside(5.0, 1.0, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dof_broadside(0.0, 1.0, 2.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("dof_broadside wavelength invariance in lambda multiples", "[dof]")
{
    for (double lam : {1.0, 0.1, 0.00857}) {
        auto p = dof_broadside(60.0 * lam, 100.0 * lam, 200.0 * lam, 2000.0 * lam, lam);
        CHECK(std::abs(p.value - 14.4) < 1e-10);
    }
}

TEST_CASE("dof_projected matches broadside and projection norms", "[dof]")
{
    auto region = ApertureRegion::single({Primitive::rectangle({0, 0}, 150.0, 50.0)});
    auto broad = dof_projected(region, broadside_direction(), 400.0, 4000.0, 1.0);
    auto ref = dof_broadside(0.0, std::sqrt(75.0 * 75.0 + 25.0 * 25.0), 400.0, 4000.0, 1.0);
    CHECK(std::abs(broad.value - ref.value) < 1e-12);

    // segment at phi = 75 deg: projected half-length is 100 sin(75 deg)
    auto seg = ApertureRegion::single({Primitive::segment({-100, 0}, {100, 0})});
    const Direction d75 = direction_vector(75.0 * pi / 180.0, 0.0);
    auto proj = dof_projected(seg, d75, 200.0, 2000.0, 1.0);
    const double pbar = 100.0 * std::sin(75.0 * pi / 180.0);
    CHECK(std::abs(proj.value - pbar * pbar * 0.0045 / 2.0) < 1e-9);
    CHECK(proj.formula == "projected");

    // moving away from broadside never increases the prediction
    double last = dof_projected(region, broadside_direction(), 400.0, 4000.0, 1.0).value;
    for (double phi = 1.4; phi > 0.05; phi -= 0.15) {
        const double v =
            dof_projected(region, direction_vector(phi, 0.0), 400.0, 4000.0, 1.0).value;
        CHECK(v <= last + 1e-9);
        last = v;
    }
}

TEST_CASE("dof_modular interval unions", "[dof]")
{
    // disjoint lobes add
    auto disjoint = dof_modular({{10.0, 40.0}, {60.0, 100.0}}, 200.0, 2000.0, 1.0);
    const double w1 = (40.0 * 40.0 - 10.0 * 10.0) * 0.00225;
    const double w2 = (100.0 * 100.0 - 60.0 * 60.0) * 0.00225;
    CHECK(std::abs(disjoint.value - (w1 + w2)) < 1e-12);
    CHECK(disjoint.omega_intervals.size() == 2);

    // symmetric modules share one lobe: L (a + b) T / (2 lambda) = 18.9
    auto sym = dof_modular({{40.0, 100.0}, {40.0, 100.0}}, 200.0, 2000.0, 1.0);
    CHECK(std::abs(sym.value - 18.9) < 1e-12);
    CHECK(sym.omega_intervals.size() == 1);

    // nested lobes collapse to the outer width
    auto nested = dof_modular({{20.0, 90.0}, {40.0, 60.0}}, 200.0, 2000.0, 1.0);
    CHECK(std::abs(nested.value - (90.0 * 90.0 - 20.0 * 20.0) * 0.00225) < 1e-12);

    // single module reduces exactly to the broadside formula
    auto single = dof_modular({{60.0, 100.0}}, 200.0, 2000.0, 1.0);
    CHECK(single.value == dof_broadside(60.0, 100.0, 200.0, 2000.0, 1.0).value);
}

TEST_CASE("dof_hole_fraction", "[dof]")
{
    const double full = dof_hole_fraction(100.0, 0.0, 200.0, 2000.0, 1.0).value;
    CHECK(std::abs(full - 100.0 * 100.0 * 0.0045 / 2.0) < 1e-12);

    const double holed = dof_hole_fraction(100.0, 0.3, 200.0, 2000.0, 1.0).value;
    CHECK(std::abs(holed / full - 0.91) < 1e-12);

    // algebraic identity with the induced two-segment modular union
    auto mod = dof_modular({{30.0, 100.0}, {30.0, 100.0}}, 200.0, 2000.0, 1.0);
    CHECK(std::abs(holed - mod.value) < 1e-12);

    CHECK_THROWS_AS(dof_hole_fraction(100.0, 1.0, 200.0, 2000.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dof_hole_fraction(100.0, -0.1, 200.0, 2000.0, 1.0), std::invalid_argument);
}

TEST_CASE("dof_vs_rmin sweep formula", "[dof]")
{
    CHECK(std::abs(dof_vs_rmin(0.0, 100.0, 1800.0, 200.0, 1.0) - 22.5) < 1e-12);

    // substitution identity with the broadside formula
    for (double rmin : {150.0, 200.0, 777.0}) {
        const double L = 1234.0;
        const double a = dof_vs_rmin(10.0, 90.0, L, rmin, 1.0);
        const double b = dof_broadside(10.0, 90.0, rmin, rmin + L, 1.0).value;
        CHECK(std::abs(a - b) < 1e-12);
    }

    // infinite-array limit: (p_max^2 - p_min^2) / (2 lambda r_min)
    const double limit = 100.0 * 100.0 / (2.0 * 200.0);
    CHECK(std::abs(dof_vs_rmin(0.0, 100.0, 1e12, 200.0, 1.0) - limit) < 1e-6);
    CHECK(std::abs(limit - 25.0) < 1e-12);
}

TEST_CASE("rayleigh_bound", "[dof]")
{
    CHECK(std::abs(rayleigh_bound(200.0, 200.0, 1.0) - 25.0) < 1e-12);

    // crossover: r_min = r_Ray / 16 gives bound 1
    const double r_ray = 2.0 * 200.0 * 200.0 / 1.0;
    CHECK(std::abs(rayleigh_bound(200.0, r_ray / 16.0, 1.0) - 1.0) < 1e-12);

    // identity (D/2)^2 / (2 lambda r_min)
    for (double D : {50.0, 120.0, 333.0}) {
        const double lhs = rayleigh_bound(D, 77.0, 0.3);
        const double rhs = (D / 2.0) * (D / 2.0) / (2.0 * 0.3 * 77.0);
        CHECK(std::abs(lhs - rhs) < 1e-12 * rhs);
    }
}

TEST_CASE("count_dominant thresholds and sensitivity", "[dof]")
{
    EigenSpectrum s;
    s.values = {1.0, 0.8, 0.4, 1e-5};
    s.normalization = 1.0;
    auto c = count_dominant(s, 0.01);
    CHECK(c.count == 3);
    CHECK(c.count_high_eps <= c.count);
    CHECK(c.count <= c.count_low_eps);

    EigenSpectrum one;
    one.values = {5.0};
    one.normalization = 5.0;
    CHECK(count_dominant(one, 0.5).count == 1);

    CHECK_THROWS_AS(count_dominant(EigenSpectrum{}, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(count_dominant(one, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(count_dominant(one, 1.0), std::invalid_argument);
}

TEST_CASE("predict_dof dispatcher tags", "[dof]")
{
    auto seg = ApertureRegion::single({Primitive::segment({-60, 0}, {60, 0})});
    auto p1 = predict_dof(seg, broadside_direction(), 200.0, 2000.0, 1.0);
    CHECK(p1.formula == "broadside");
    CHECK(std::abs(p1.value - 8.1) < 1e-12);

    ApertureRegion two;
    two.modules.push_back(ApertureModule{{Primitive::segment({40, 0}, {100, 0})}});
    two.modules.push_back(ApertureModule{{Primitive::segment({-100, 0}, {-40, 0})}});
    auto p2 = predict_dof(two, broadside_direction(), 200.0, 2000.0, 1.0);
    CHECK(p2.formula == "modular");
    CHECK(std::abs(p2.value - 18.9) < 1e-12);

    auto p3 = predict_dof(seg, direction_vector(1.0, 0.0), 200.0, 2000.0, 1.0);
    CHECK(p3.formula == "projected");
    CHECK(p3.value < p1.value);
}

TEST_CASE("degenerate projection collapses the prediction to zero", "[dof]")
{
    // an x-axis segment viewed end-on projects to a point
    auto seg = ApertureRegion::single({Primitive::segment({-100, 0}, {100, 0})});
    auto p = dof_projected(seg, direction_vector(0.0, 0.0), 200.0, 2000.0, 1.0);
    CHECK(p.value < 1e-12);
}
