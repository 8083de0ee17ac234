// Charts, metrics, magnetic intensities and curvature quantities.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>

namespace magflow {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec2 = std::array<double, 2>;

struct Rect {
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;

    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
    double scale() const { return std::max(x1 - x0, y1 - y0); }
};

using ScalarFn = std::function<double(double, double)>;
using GradFn = std::function<Vec2(double, double)>;

// Metric e^{2λ}(dx² + dy²) on a rectangle.
struct ConformalChart {
    Rect domain;
    ScalarFn log_factor;             // λ(x,y)
    GradFn log_factor_gradient;      // ∇λ, null -> central differences
    ScalarFn curvature;              // K(x,y), null -> -e^{-2λ}Δλ by FD

    Vec2 grad_log_factor(double x, double y) const;
    double gaussian_curvature(double x, double y) const;
    double conformal_factor(double x, double y) const {
        return std::exp(log_factor(x, y));
    }
};

// Metric ds² + r(s)²dθ² with r(s) = exp(∫₀^s u), θ periodic.
struct RevolutionChart {
    double s_min = -1.0, s_max = 1.0;
    std::function<double(double)> profile;           // u(s)
    std::function<double(double)> profile_derivative; // u'(s), null -> FD
    std::function<double(double)> profile_integral;   // ∫₀^s u(τ)dτ

    bool contains(double s) const { return s >= s_min && s <= s_max; }
    double radius(double s) const { return std::exp(profile_integral(s)); }
    double du(double s) const;
    double gaussian_curvature(double s) const {
        return -du(s) - profile(s) * profile(s);
    }
};

using Chart = std::variant<ConformalChart, RevolutionChart>;

bool chart_contains(const Chart& chart, double x, double y);
double chart_scale(const Chart& chart);

// g-norm of a coordinate velocity (vx, vy) at (x, y).
double metric_norm(const Chart& chart, double x, double y, double vx, double vy);

// Scalar field b with differential db; on a revolution chart the
// coordinates are (s, θ) and db is (∂b/∂s, ∂b/∂θ).
struct MagneticIntensity {
    ScalarFn value;
    GradFn differential;  // null -> central differences

    Vec2 d(double x, double y) const;

    static MagneticIntensity constant(double b);
    // b = b(s) only, with analytic derivative.
    static MagneticIntensity from_profile(std::function<double(double)> b,
                                          std::function<double(double)> db);
};

struct MagneticSystem {
    Chart chart;
    MagneticIntensity intensity;
};

// Position plus direction angle against the fixed chart frame; the angle
// parameterization keeps the state a g-unit vector by construction.
struct UnitTangent {
    double x = 0.0;   // x or s
    double y = 0.0;   // y or θ
    double phi = 0.0; // direction angle, CCW

    Vec2 point() const { return {x, y}; }
};

double wrap_angle(double phi);          // -> [0, 2π)
double angle_difference(double a, double b);  // wrapped to (-π, π]

UnitTangent rotate90(const UnitTangent& state);

double gaussian_curvature(const Chart& chart, double x, double y);

// K^g(x) - d_xb(iv) + b²(x).
double magnetic_curvature(const MagneticSystem& system, const UnitTangent& state);

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ∫ field dArea over the region (chart coordinates); deterministic
// adaptive quadrature against the area form (e^{2λ}dxdy or r(s)dsdθ).
IntegralResult area_integral(const Chart& chart, const ScalarFn& field,
                             const Rect& region, double tol = 1e-10);

// Builtin chart families.
ConformalChart half_plane_chart(double x_half_width = 1e8,
                                double y_min = 1e-8, double y_max = 1e8);
RevolutionChart tanh_revolution_chart(double s_min = -20.0, double s_max = 20.0);
RevolutionChart flat_cylinder_chart(double s_min = -20.0, double s_max = 20.0);

}  // namespace magflow
