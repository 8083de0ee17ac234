#include "magflow/geom.hpp"

#include <cmath>

namespace magflow {

namespace {

// First derivatives: step small enough for 1e-10 truncation without
// hitting roundoff; second derivatives need a larger step. Steps scale with
// the evaluation point, not the domain, which may be effectively unbounded.
constexpr double kGradStepFactor = 1e-5;
constexpr double kLaplaceStepFactor = 1e-4;

double local_scale(double x, double y) {
    return std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

Vec2 ConformalChart::grad_log_factor(double x, double y) const {
    if (log_factor_gradient) return log_factor_gradient(x, y);
    const double h = kGradStepFactor * local_scale(x, y);
    return {(log_factor(x + h, y) - log_factor(x - h, y)) / (2 * h),
            (log_factor(x, y + h) - log_factor(x, y - h)) / (2 * h)};
}

double ConformalChart::gaussian_curvature(double x, double y) const {
    if (curvature) return curvature(x, y);
    const double h = kLaplaceStepFactor * local_scale(x, y);
    const double c = log_factor(x, y);
    const double lap = (log_factor(x + h, y) + log_factor(x - h, y) +
                        log_factor(x, y + h) + log_factor(x, y - h) - 4 * c) /
                       (h * h);
    return -std::exp(-2 * c) * lap;
}

double RevolutionChart::du(double s) const {
    if (profile_derivative) return profile_derivative(s);
    const double h = kGradStepFactor * std::max(1.0, std::abs(s));
    return (profile(s + h) - profile(s - h)) / (2 * h);
}

bool chart_contains(const Chart& chart, double x, double y) {
    return std::visit(
        [&](const auto& c) -> bool {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                return c.domain.contains(x, y);
            } else {
                (void)y;  // θ is periodic
                return c.contains(x);
            }
        },
        chart);
}

double chart_scale(const Chart& chart) {
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                return c.domain.scale();
            } else {
                return c.s_max - c.s_min;
            }
        },
        chart);
}

double metric_norm(const Chart& chart, double x, double y, double vx, double vy) {
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                return c.conformal_factor(x, y) * std::hypot(vx, vy);
            } else {
                (void)y;
                const double r = c.radius(x);
                return std::hypot(vx, r * vy);
            }
        },
        chart);
}

Vec2 MagneticIntensity::d(double x, double y) const {
    if (differential) return differential(x, y);
    const double h = 1e-5;
    return {(value(x + h, y) - value(x - h, y)) / (2 * h),
            (value(x, y + h) - value(x, y - h)) / (2 * h)};
}

MagneticIntensity MagneticIntensity::constant(double b) {
    MagneticIntensity m;
    m.value = [b](double, double) { return b; };
    m.differential = [](double, double) -> Vec2 { return {0.0, 0.0}; };
    return m;
}

MagneticIntensity MagneticIntensity::from_profile(
    std::function<double(double)> b, std::function<double(double)> db) {
    MagneticIntensity m;
    m.value = [b](double s, double) { return b(s); };
    m.differential = [db](double s, double) -> Vec2 { return {db(s), 0.0}; };
    return m;
}

double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0) w += kTwoPi;
    return w;
}

double angle_difference(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d > kPi) d -= kTwoPi;
    if (d <= -kPi) d += kTwoPi;
    return d;
}

UnitTangent rotate90(const UnitTangent& state) {
    return {state.x, state.y, wrap_angle(state.phi + kPi / 2)};
}

double gaussian_curvature(const Chart& chart, double x, double y) {
    if (!chart_contains(chart, x, y))
        throw DomainError("gaussian_curvature: point outside chart domain");
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                return c.gaussian_curvature(x, y);
            } else {
                (void)y;
                return c.gaussian_curvature(x);
            }
        },
        chart);
}

double magnetic_curvature(const MagneticSystem& system, const UnitTangent& state) {
    if (!chart_contains(system.chart, state.x, state.y))
        throw DomainError("magnetic_curvature: state off chart");
    const double K = gaussian_curvature(system.chart, state.x, state.y);
    const double b = system.intensity.value(state.x, state.y);
    const Vec2 db = system.intensity.d(state.x, state.y);
    // iv in chart coordinates.
    const double c = std::cos(state.phi), s = std::sin(state.phi);
    double iv_x, iv_y;
    std::visit(
        [&](const auto& ch) {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                const double e = std::exp(-ch.log_factor(state.x, state.y));
                iv_x = -e * s;
                iv_y = e * c;
            } else {
                iv_x = -s;
                iv_y = c / ch.radius(state.x);
            }
        },
        system.chart);
    return K - (db[0] * iv_x + db[1] * iv_y) + b * b;
}

namespace {

// Adaptive Simpson, 1D.
double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double fa, double b, double fb, double m, double fm,
                        double whole, double tol, int depth, double* err) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
        throw IntegrationError("area_integral: non-finite field value");
    const double left = simpson(a, fa, flm, m, fm);
    const double right = simpson(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) {
        *err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1, err) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1, err);
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol, double* err) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw IntegrationError("area_integral: non-finite field value");
    const double whole = simpson(a, fa, fm, b, fb);
    return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 48, err);
}

}  // namespace

IntegralResult area_integral(const Chart& chart, const ScalarFn& field,
                             const Rect& region, double tol) {
    if (!chart_contains(chart, region.x0, region.y0) ||
        !chart_contains(chart, region.x1, region.y1))
        throw DomainError("area_integral: region not contained in chart domain");
    const auto density = [&](double x, double y) {
        return std::visit(
            [&](const auto& c) -> double {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, ConformalChart>) {
                    const double e = c.conformal_factor(x, y);
                    return e * e;
                } else {
                    (void)y;
                    return c.radius(x);
                }
            },
            chart);
    };
    IntegralResult out;
    double outer_err = 0.0;
    const auto inner = [&](double x) {
        double ierr = 0.0;
        const double v = integrate_1d(
            [&](double y) { return field(x, y) * density(x, y); }, region.y0,
            region.y1, tol, &ierr);
        outer_err += ierr;
        return v;
    };
    out.value = integrate_1d(inner, region.x0, region.x1, tol, &out.error_estimate);
    out.error_estimate += outer_err;
    return out;
}

ConformalChart half_plane_chart(double x_half_width, double y_min, double y_max) {
    ConformalChart c;
    c.domain = {-x_half_width, x_half_width, y_min, y_max};
    c.log_factor = [](double, double y) { return -std::log(y); };
    c.log_factor_gradient = [](double, double y) -> Vec2 { return {0.0, -1.0 / y}; };
    c.curvature = [](double, double) { return -1.0; };
    return c;
}

RevolutionChart tanh_revolution_chart(double s_min, double s_max) {
    RevolutionChart c;
    c.s_min = s_min;
    c.s_max = s_max;
    c.profile = [](double s) { return std::tanh(s); };
    c.profile_derivative = [](double s) {
        const double t = std::cosh(s);
        return 1.0 / (t * t);
    };
    c.profile_integral = [](double s) { return std::log(std::cosh(s)); };
    return c;
}

RevolutionChart flat_cylinder_chart(double s_min, double s_max) {
    RevolutionChart c;
    c.s_min = s_min;
    c.s_max = s_max;
    c.profile = [](double) { return 0.0; };
    c.profile_derivative = [](double) { return 0.0; };
    c.profile_integral = [](double) { return 0.0; };
    return c;
}

}  // namespace magflow
