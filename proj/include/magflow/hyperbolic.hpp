// Half-plane model, cylinder quotients, closed magnetic orbits, and the
// PSL(2,R) matrix model.
#pragma once

#include <optional>
#include <vector>

#include "magflow/flow.hpp"
#include "magflow/geom.hpp"

namespace magflow {

// Quotient of the y^{-2} half-plane by z -> e^ell z.
struct HyperbolicCylinder {
    double ell;

    explicit HyperbolicCylinder(double translation_length);

    ConformalChart chart() const;
    MagneticSystem system(double b) const;

    Vec2 deck(const Vec2& p, int power = 1) const;
    UnitTangent deck(const UnitTangent& s, int power = 1) const;
};

struct ShootingError : std::runtime_error {
    double last_residual;
    ShootingError(const std::string& msg, double residual)
        : std::runtime_error(msg), last_residual(residual) {}
};

struct ClosedOrbit {
    UnitTangent start;
    double period = 0.0;
    int winding = 0;
    double residual = 0.0;
    Trajectory trajectory;
};

// ell / sqrt(1 - b^2); throws DomainError for |b| >= 1.
double closed_orbit_length_formula(double ell, double b);

// Newton shooting on (x0, phi0, period) so that the flow endpoint equals
// deck^n(start) in point and angle. Constant-b systems, |b| < 1, n != 0.
ClosedOrbit find_closed_orbit(const HyperbolicCylinder& cylinder, double b,
                              int winding,
                              std::optional<UnitTangent> guess = std::nullopt,
                              std::optional<double> period_guess = std::nullopt);

struct MlsRow {
    double ell = 0.0;
    double b = 0.0;
    double period_shot = 0.0;
    double period_formula = 0.0;
    double abs_err = 0.0;
    bool converged = false;
};

std::vector<MlsRow> mls_scaling_table(const std::vector<double>& ells,
                                      const std::vector<double>& bs);

std::string mls_table_csv(const std::vector<MlsRow>& rows);

struct Mat2 {
    // Row-major entries.
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }
    double max_norm() const;

    Mat2 operator*(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Mat2 operator*(double s) const;
    static Mat2 identity() { return {1, 0, 0, 1}; }
};

// (1/2) [[1, b], [-b, -1]].
Mat2 psl_generator(double b);

// exp(t m); closed form on the traceless part (cosh/cos branch on det).
Mat2 mat_exp(const Mat2& m, double t);

// (1/(1 - s b^2)) [[1, -s b], [-s b, 1]]; identity at s = 0.
Mat2 conjugacy_matrix(double s, double b);

// max of ||X^b c - c X^{-b}|| and ||exp(tX^b) c - c exp(tX^{-b})|| in the
// max-entry norm, with c = conjugacy_matrix(1, b).
double intertwining_residual(double b, double t);

}  // namespace magflow
