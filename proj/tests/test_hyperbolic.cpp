#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "magflow/hyperbolic.hpp"

using namespace magflow;

TEST_CASE("deck map is an isometry of the half-plane metric") {
    const HyperbolicCylinder cyl(0.9);
    const ConformalChart hp = cyl.chart();
    std::mt19937_64 eng(2);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(0.5, 3.0),
        uv(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double x = ux(eng), y = uy(eng), vx = uv(eng), vy = uv(eng);
        const double before = metric_norm(hp, x, y, vx, vy);
        const Vec2 p = cyl.deck(Vec2{x, y});
        const double f = std::exp(cyl.ell);
        const double after = metric_norm(hp, p[0], p[1], f * vx, f * vy);
        CHECK(std::abs(before - after) < 1e-12 * std::max(1.0, before));
    }
}

TEST_CASE("closed orbit length formula") {
    CHECK(closed_orbit_length_formula(2.0, 0.0) == doctest::Approx(2.0));
    CHECK(closed_orbit_length_formula(2.0, 0.5) ==
          doctest::Approx(2.3094010768).epsilon(1e-9));
    double prev = 0.0;
    for (double b : {0.0, 0.5, 0.9, 0.99, 0.999}) {
        const double v = closed_orbit_length_formula(2.0, b);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(closed_orbit_length_formula(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_orbit_length_formula(-1.0, 0.0), DomainError);
}

TEST_CASE("shooting finds the axis geodesic for b = 0") {
    const HyperbolicCylinder cyl(2.0);
    const ClosedOrbit orbit = find_closed_orbit(cyl, 0.0, 1);
    CHECK(orbit.period == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(orbit.start.x) < 1e-8);
    CHECK(orbit.residual < 1e-10);
}

TEST_CASE("shooting matches the scaling formula at b = 0.5") {
    const HyperbolicCylinder cyl(2.0);
    const ClosedOrbit orbit = find_closed_orbit(cyl, 0.5, 1);
    CHECK(std::abs(orbit.period - closed_orbit_length_formula(2.0, 0.5)) < 1e-6);
    // The orbit lies on the hypercycle ray through (b, sqrt(1-b^2)).
    const double root = std::sqrt(0.75);
    for (const auto& st : orbit.trajectory.states)
        CHECK(std::abs(root * st.x - 0.5 * st.y) < 1e-6 * std::hypot(st.x, st.y));
}

TEST_CASE("double winding doubles the period") {
    const HyperbolicCylinder cyl(2.0);
    const ClosedOrbit one = find_closed_orbit(cyl, 0.5, 1);
    const ClosedOrbit two = find_closed_orbit(cyl, 0.5, 2);
    CHECK(std::abs(two.period - 2.0 * one.period) < 1e-6);
}

TEST_CASE("closed orbits are deck periodic") {
    const HyperbolicCylinder cyl(1.3);
    const ClosedOrbit orbit = find_closed_orbit(cyl, 0.4, 1);
    const MagneticSystem sys = cyl.system(0.4);
    FlowSettings fs;
    fs.horizon = orbit.period;
    fs.rel_tol = fs.abs_tol = 1e-12;
    fs.max_step = 0.05;
    const Trajectory next =
        integrate(sys, cyl.deck(orbit.start), fs);
    for (double t : {0.0, 0.4, 0.9, orbit.period}) {
        const UnitTangent a = cyl.deck(orbit.trajectory.at(t));
        const UnitTangent b = next.at(t);
        CHECK(std::abs(a.x - b.x) < 1e-7 * std::exp(cyl.ell));
        CHECK(std::abs(a.y - b.y) < 1e-7 * std::exp(cyl.ell));
        CHECK(std::abs(angle_difference(a.phi, b.phi)) < 1e-7);
    }
}

TEST_CASE("mls table over the default grid") {
    const auto rows = mls_scaling_table({1.0, 2.0, 3.7}, {0.0, 0.3, 0.5, 0.9});
    REQUIRE(rows.size() == 12);
    double prev_ell = 0.0, prev_b = -1.0;
    for (const auto& r : rows) {
        CHECK(r.converged);
        CHECK(r.abs_err < 1e-6);
        // Sorted by (ell, b).
        CHECK((r.ell > prev_ell || (r.ell == prev_ell && r.b > prev_b)));
        prev_ell = r.ell;
        prev_b = r.b;
    }
    // Fixed ell: periods strictly increasing in b.
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].ell == rows[i - 1].ell)
            CHECK(rows[i].period_shot > rows[i - 1].period_shot);

    const std::string csv = mls_table_csv(rows);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "ell,b,period_shot,period_formula,abs_err,converged");
}

TEST_CASE("psl generator") {
    const Mat2 x0 = psl_generator(0.0);
    CHECK(x0.a == doctest::Approx(0.5));
    CHECK(x0.d == doctest::Approx(-0.5));
    CHECK(x0.b == doctest::Approx(0.0));
    CHECK(x0.c == doctest::Approx(0.0));
    for (double b : {-0.9, 0.0, 0.3, 0.7}) {
        const Mat2 x = psl_generator(b);
        CHECK(x.trace() == doctest::Approx(0.0));
        CHECK(x.det() == doctest::Approx((b * b - 1.0) / 4.0));
    }
}

TEST_CASE("matrix exponential closed form") {
    const Mat2 d = mat_exp(psl_generator(0.0), 2.0);
    CHECK(d.a == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(d.d == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(d.b == doctest::Approx(0.0));
    CHECK(d.c == doctest::Approx(0.0));

    const Mat2 rot{0.0, 1.0, -1.0, 0.0};
    const Mat2 r = mat_exp(rot, kPi / 3);
    CHECK(r.a == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.b == doctest::Approx(std::sin(kPi / 3)).epsilon(1e-14));

    const Mat2 id = mat_exp(psl_generator(0.4), 0.0);
    CHECK((id - Mat2::identity()).max_norm() == doctest::Approx(0.0));

    std::mt19937_64 eng(13);
    std::uniform_real_distribution<double> ut(-2.0, 2.0), ub(-0.9, 0.9);
    for (int i = 0; i < 50; ++i) {
        const double s = ut(eng), t = ut(eng), b = ub(eng);
        const Mat2 m = psl_generator(b);
        const Mat2 lhs = mat_exp(m, s + t);
        const Mat2 rhs = mat_exp(m, s) * mat_exp(m, t);
        CHECK((lhs - rhs).max_norm() < 1e-12);
        CHECK(std::abs(mat_exp(m, t).det() - 1.0) < 1e-12);
    }
}

TEST_CASE("conjugacy family") {
    const Mat2 c0 = conjugacy_matrix(0.0, 0.5);
    CHECK((c0 - Mat2::identity()).max_norm() == doctest::Approx(0.0));

    const Mat2 c1 = conjugacy_matrix(1.0, 0.5);
    CHECK(c1.a == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(c1.b == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(c1.c == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(c1.d == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    for (double b : {0.3, 0.6, 0.9})
        CHECK(conjugacy_matrix(1.0, b).det() ==
              doctest::Approx(1.0 / (1.0 - b * b)).epsilon(1e-13));

    CHECK_THROWS_AS(conjugacy_matrix(4.0, 0.5), DomainError);
}

TEST_CASE("intertwining residual") {
    CHECK(intertwining_residual(0.0, 1.7) == doctest::Approx(0.0));
    CHECK(intertwining_residual(0.5, 1.0) < 1e-12);
    // Exact Lie-algebra identity for the b = 0.5 matrices.
    const Mat2 x = psl_generator(0.5), xm = psl_generator(-0.5);
    const Mat2 c = conjugacy_matrix(1.0, 0.5);
    CHECK((x * c - c * xm).max_norm() == doctest::Approx(0.0));

    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> ub(-0.99, 0.99), ut(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
        worst = std::max(worst, intertwining_residual(ub(eng), ut(eng)));
    CHECK(worst < 1e-11);

    CHECK_THROWS_AS(intertwining_residual(1.0, 1.0), DomainError);
}

TEST_CASE("shooting failure reports the residual") {
    const HyperbolicCylinder cyl(2.0);
    CHECK_THROWS_AS(find_closed_orbit(cyl, 0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(find_closed_orbit(cyl, 1.2, 1), DomainError);
}
