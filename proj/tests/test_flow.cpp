#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "magflow/flow.hpp"
#include "magflow/hyperbolic.hpp"

using namespace magflow;

namespace {

MagneticSystem half_plane_system(double b) {
    return {half_plane_chart(), MagneticIntensity::constant(b)};
}

FlowSettings settings(double T) {
    FlowSettings fs;
    fs.horizon = T;
    return fs;
}

}  // namespace

TEST_CASE("vertical line is a geodesic of the half-plane") {
    const MagneticSystem sys = half_plane_system(0.0);
    const auto d = magnetic_rhs(sys, {0.0, 1.0, kPi / 2});
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[1] == doctest::Approx(1.0));  // e^{-lambda} = y
    CHECK(d[2] == doctest::Approx(0.0));

    const Trajectory traj = integrate(sys, {0.0, 1.0, kPi / 2}, settings(1.0));
    const UnitTangent end = traj.states.back();
    CHECK(std::abs(end.x) < 1e-8);
    CHECK(end.y == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
    CHECK(std::abs(angle_difference(end.phi, kPi / 2)) < 1e-8);
}

TEST_CASE("invariant ray of the b = 0.5 system") {
    const double b = 0.5;
    const double root = std::sqrt(1.0 - b * b);
    const MagneticSystem sys = half_plane_system(b);
    // Start on the candidate ray direction (b, sqrt(1-b^2)) pointing along it.
    const UnitTangent start{b, root, std::atan2(root, b)};
    const auto d = magnetic_rhs(sys, start);
    CHECK(std::abs(d[2]) < 1e-13);

    const double T = closed_orbit_length_formula(2.0, b);
    const Trajectory traj = integrate(sys, start, settings(T));
    double worst_sqrt = 0.0, worst_printed = 0.0;
    for (const auto& st : traj.states) {
        // Distance to the ray r (b, sqrt(1-b^2)):
        worst_sqrt = std::max(worst_sqrt, std::abs(root * st.x - b * st.y) /
                                              std::hypot(root, b));
        // Distance to the ray r (b, 1-b^2):
        const double n2 = std::hypot(1.0 - b * b, b);
        worst_printed = std::max(
            worst_printed, std::abs((1.0 - b * b) * st.x - b * st.y) / n2);
    }
    CHECK(worst_sqrt < 1e-6);
    CHECK(worst_printed > 1e-2);  // the orbit does not follow that variant
}

TEST_CASE("parallel with u(s0) = b is a closed orbit on the revolution chart") {
    const RevolutionChart tc = tanh_revolution_chart();
    const double b = 0.5;
    const double s0 = std::atanh(b);
    const MagneticSystem sys{tc, MagneticIntensity::constant(b)};
    const auto d = magnetic_rhs(sys, {s0, 0.0, kPi / 2});
    CHECK(std::abs(d[0]) < 1e-13);
    CHECK(std::abs(d[2]) < 1e-13);

    const Trajectory traj = integrate(sys, {s0, 0.0, kPi / 2}, settings(4.0));
    for (const auto& st : traj.states) CHECK(std::abs(st.x - s0) < 1e-9);
}

TEST_CASE("time reversal maps (g, b) orbits to (g, -b) orbits") {
    const MagneticSystem plus = half_plane_system(0.4);
    const MagneticSystem minus = half_plane_system(-0.4);
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), up(0.0, kTwoPi);
    for (int i = 0; i < 5; ++i) {
        const UnitTangent start{ux(eng), 1.0 + 0.5 * (ux(eng) + 1.0), up(eng)};
        const Trajectory fwd = integrate(plus, start, settings(2.0));
        const UnitTangent end = fwd.states.back();
        const Trajectory back = integrate(
            minus, {end.x, end.y, wrap_angle(end.phi + kPi)}, settings(2.0));
        const UnitTangent ret = back.states.back();
        CHECK(std::abs(ret.x - start.x) < 1e-6);
        CHECK(std::abs(ret.y - start.y) < 1e-6);
        CHECK(std::abs(angle_difference(ret.phi, start.phi + kPi)) < 1e-6);
    }
}

TEST_CASE("flow semigroup property") {
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), up(0.0, kTwoPi);
    for (int i = 0; i < 5; ++i) {
        const UnitTangent start{ux(eng), 1.5 + ux(eng) * 0.5, up(eng)};
        for (const MagneticSystem& sys :
             {half_plane_system(0.3),
              MagneticSystem{tanh_revolution_chart(),
                             MagneticIntensity::constant(0.3)}}) {
            const Trajectory whole = integrate(sys, start, settings(2.0));
            const Trajectory first = integrate(sys, start, settings(0.8));
            const Trajectory second =
                integrate(sys, first.states.back(), settings(1.2));
            const UnitTangent a = whole.states.back();
            const UnitTangent c = second.states.back();
            CHECK(std::abs(a.x - c.x) < 1e-7);
            CHECK(std::abs(a.y - c.y) < 1e-7);
            CHECK(std::abs(angle_difference(a.phi, c.phi)) < 1e-7);
        }
    }
}

TEST_CASE("unit speed reconstructed from position samples") {
    const MagneticSystem sys = half_plane_system(0.5);
    const Trajectory traj = integrate(sys, {0.2, 1.0, 0.4}, settings(3.0));
    const double h = 1e-4;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double dt = traj.times[i + 1] - traj.times[i];
        const double tm = traj.times[i] + dt / 2;
        const UnitTangent mid = traj.at(tm);
        const UnitTangent a = traj.at(tm - h), b = traj.at(tm + h);
        const double speed =
            metric_norm(sys.chart, mid.x, mid.y, (b.x - a.x) / (2 * h),
                        (b.y - a.y) / (2 * h));
        CHECK(std::abs(speed - 1.0) < 1e-6);
    }
}

TEST_CASE("geodesic curvature residual") {
    const MagneticSystem geo = half_plane_system(0.0);
    const Trajectory gt = integrate(geo, {0.3, 1.0, 0.9}, settings(3.0));
    CHECK(geodesic_curvature_residual(geo, gt) < 1e-7);

    const double b = 0.5, root = std::sqrt(1.0 - b * b);
    const MagneticSystem mag = half_plane_system(b);
    const Trajectory mt =
        integrate(mag, {b, root, std::atan2(root, b)}, settings(2.3));
    CHECK(geodesic_curvature_residual(mag, mt) < 1e-7);

    Trajectory corrupted = mt;
    for (std::size_t i = 0; i < corrupted.size(); ++i)
        corrupted.states[i].phi += 1e-3 * std::sin(7.0 * corrupted.times[i]);
    CHECK(geodesic_curvature_residual(mag, corrupted) > 1e-4);
}

TEST_CASE("tolerance tightening does not degrade the curvature residual") {
    std::mt19937_64 eng(31);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), up(0.0, kTwoPi),
        ub(-0.8, 0.8);
    for (int i = 0; i < 4; ++i) {
        const MagneticSystem sys = half_plane_system(ub(eng));
        const UnitTangent start{ux(eng), 1.5, up(eng)};
        FlowSettings coarse = settings(2.0);
        coarse.rel_tol = coarse.abs_tol = 1e-8;
        FlowSettings fine = coarse;
        fine.rel_tol = fine.abs_tol = 5e-9;
        const double rc =
            geodesic_curvature_residual(sys, integrate(sys, start, coarse));
        const double rf =
            geodesic_curvature_residual(sys, integrate(sys, start, fine));
        CHECK(rf <= 2.0 * rc + 1e-12);
    }
}

TEST_CASE("deck map equivariance on the half-plane") {
    const double ell = 0.7;
    const HyperbolicCylinder cyl(ell);
    const MagneticSystem sys = half_plane_system(0.35);
    const UnitTangent start{0.1, 1.2, 0.8};
    const Trajectory base = integrate(sys, start, settings(2.0));
    const Trajectory mapped =
        integrate(sys, cyl.deck(start), settings(2.0));
    for (double t : {0.0, 0.5, 1.3, 2.0}) {
        const UnitTangent a = cyl.deck(base.at(t));
        const UnitTangent b = mapped.at(t);
        CHECK(std::abs(a.x - b.x) < 1e-8 * std::exp(ell));
        CHECK(std::abs(a.y - b.y) < 1e-8 * std::exp(ell));
        CHECK(std::abs(angle_difference(a.phi, b.phi)) < 1e-8);
    }
}

TEST_CASE("chart exit truncates with a flag") {
    RevolutionChart narrow = flat_cylinder_chart(-1.0, 1.0);
    const MagneticSystem sys{narrow, MagneticIntensity::constant(0.0)};
    const Trajectory traj = integrate(sys, {0.0, 0.0, 0.0}, settings(5.0));
    CHECK(traj.exited_chart);
    CHECK(traj.duration() < 1.5);
    for (const auto& st : traj.states) CHECK(narrow.contains(st.x));
}

TEST_CASE("band occupation time") {
    const RevolutionChart flat = flat_cylinder_chart();
    const MagneticSystem sys{flat, MagneticIntensity::constant(0.0)};

    // Meridian crossing of [-0.3, 0.3] at unit speed.
    const Trajectory crossing = integrate(sys, {-2.0, 0.0, 0.0}, settings(4.0));
    CHECK(band_occupation_time(crossing, -0.3, 0.3) ==
          doctest::Approx(0.6).epsilon(0.05));

    // Entirely outside the band.
    CHECK(band_occupation_time(crossing, 5.0, 6.0) == doctest::Approx(0.0));

    // Parallel orbit inside the band never leaves.
    const Trajectory parallel = integrate(sys, {0.0, 0.0, kPi / 2}, settings(3.0));
    CHECK(band_occupation_time(parallel, -0.3, 0.3) ==
          doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("csv export shape and determinism") {
    const MagneticSystem sys = half_plane_system(0.2);
    const Trajectory traj = integrate(sys, {0.0, 1.0, 0.3}, settings(1.0));
    const std::string csv = trajectory_csv(sys, traj);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x,y,phi,k_residual");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == traj.size());
    CHECK(csv == trajectory_csv(sys, integrate(sys, {0.0, 1.0, 0.3}, settings(1.0))));
}

TEST_CASE("settings validation") {
    FlowSettings fs;
    fs.horizon = -1.0;
    CHECK_THROWS(fs.validate());
    fs.horizon = 1.0;
    fs.rel_tol = 0.5;
    CHECK_THROWS(fs.validate());
}
