// Magnetic geodesic flow in unit-speed angle coordinates.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magflow/geom.hpp"
#include "magflow/ode.hpp"

namespace magflow {

struct FlowSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.02;
    double horizon = 1.0;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<UnitTangent> states;
    std::vector<std::array<double, 3>> derivatives;  // (dx, dy, dphi) per sample
    StepStats step_stats;
    bool exited_chart = false;

    std::size_t size() const { return times.size(); }
    double duration() const { return times.empty() ? 0.0 : times.back(); }

    // Cubic Hermite interpolation of the (x, y, phi) state.
    UnitTangent at(double t) const;
    std::array<double, 3> derivative_at(double t) const;
};

// Time derivative of the (point, angle) state; the curve has g-geodesic
// curvature b at every point. Conformal chart:
//   dx = e^{-λ}cosφ, dy = e^{-λ}sinφ, dφ = b + e^{-λ}(λ_y cosφ - λ_x sinφ)
// Revolution chart:
//   ds = cosφ, dθ = sinφ/r, dφ = b - u(s) sinφ
std::array<double, 3> magnetic_rhs(const MagneticSystem& system,
                                   const UnitTangent& state);

Trajectory integrate(const MagneticSystem& system, const UnitTangent& start,
                     const FlowSettings& settings);

// Frame term such that k^g = dφ/dt + frame_term(state).
double frame_term(const MagneticSystem& system, const UnitTangent& state);

// sup over samples of |k^g(t) - b(γ(t))| with dφ/dt recovered from the
// angle samples alone (local quartic fit), independent of the stored RHS.
double geodesic_curvature_residual(const MagneticSystem& system,
                                   const Trajectory& trajectory);

// Per-sample signed residual k^g - b (zero at the first/last two samples
// where the quartic stencil does not fit).
std::vector<double> geodesic_curvature_residuals(const MagneticSystem& system,
                                                 const Trajectory& trajectory);

// Total time with s(t) in [s_lo, s_hi]; crossings refined by bisection.
double band_occupation_time(const Trajectory& trajectory, double s_lo,
                            double s_hi, double tol = 1e-9);

// CSV export: t, x (or s), y (or θ), phi, k_residual.
std::string trajectory_csv(const MagneticSystem& system,
                           const Trajectory& trajectory);

std::string format17(double v);

}  // namespace magflow
