#include "magflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace magflow {

void FlowSettings::validate() const {
    if (!(rel_tol > 0 && rel_tol <= 1e-2) || !(abs_tol > 0 && abs_tol <= 1e-2))
        throw std::invalid_argument("FlowSettings: tolerances must be in (0, 1e-2]");
    if (!(horizon > 0)) throw std::invalid_argument("FlowSettings: horizon must be > 0");
    if (!(max_step > 0)) throw std::invalid_argument("FlowSettings: max_step must be > 0");
}

namespace {

std::size_t locate_segment(const std::vector<double>& times, double t) {
    if (t <= times.front()) return 0;
    if (t >= times.back()) return times.size() - 2;
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

}  // namespace

UnitTangent Trajectory::at(double t) const {
    const std::size_t i = locate_segment(times, t);
    const State<3> y0{states[i].x, states[i].y, states[i].phi};
    const State<3> y1{states[i + 1].x, states[i + 1].y, states[i + 1].phi};
    const State<3> v = hermite_interpolate<3>(t, times[i], y0, derivatives[i],
                                              times[i + 1], y1, derivatives[i + 1]);
    return {v[0], v[1], v[2]};
}

std::array<double, 3> Trajectory::derivative_at(double t) const {
    const std::size_t i = locate_segment(times, t);
    const State<3> y0{states[i].x, states[i].y, states[i].phi};
    const State<3> y1{states[i + 1].x, states[i + 1].y, states[i + 1].phi};
    return hermite_derivative<3>(t, times[i], y0, derivatives[i], times[i + 1],
                                 y1, derivatives[i + 1]);
}

std::array<double, 3> magnetic_rhs(const MagneticSystem& system,
                                   const UnitTangent& state) {
    if (!chart_contains(system.chart, state.x, state.y))
        throw DomainError("magnetic_rhs: state off chart");
    const double b = system.intensity.value(state.x, state.y);
    const double c = std::cos(state.phi), s = std::sin(state.phi);
    return std::visit(
        [&](const auto& ch) -> std::array<double, 3> {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                const double e = std::exp(-ch.log_factor(state.x, state.y));
                const Vec2 gl = ch.grad_log_factor(state.x, state.y);
                return {e * c, e * s, b + e * (gl[1] * c - gl[0] * s)};
            } else {
                const double u = ch.profile(state.x);
                return {c, s / ch.radius(state.x), b - u * s};
            }
        },
        system.chart);
}

double frame_term(const MagneticSystem& system, const UnitTangent& state) {
    const double c = std::cos(state.phi), s = std::sin(state.phi);
    return std::visit(
        [&](const auto& ch) -> double {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                const double e = std::exp(-ch.log_factor(state.x, state.y));
                const Vec2 gl = ch.grad_log_factor(state.x, state.y);
                return e * (gl[0] * s - gl[1] * c);
            } else {
                return ch.profile(state.x) * s;
            }
        },
        system.chart);
}

namespace {

// Clamp an evaluation point into the chart; off-chart RK stages use the
// field values at the clamped point and the run is truncated as soon as
// an accepted sample falls outside.
UnitTangent clamp_to_chart(const Chart& chart, const UnitTangent& st) {
    UnitTangent out = st;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConformalChart>) {
                out.x = std::clamp(out.x, c.domain.x0, c.domain.x1);
                out.y = std::clamp(out.y, c.domain.y0, c.domain.y1);
            } else {
                out.x = std::clamp(out.x, c.s_min, c.s_max);
            }
        },
        chart);
    return out;
}

}  // namespace

Trajectory integrate(const MagneticSystem& system, const UnitTangent& start,
                     const FlowSettings& settings) {
    settings.validate();
    if (!chart_contains(system.chart, start.x, start.y))
        throw DomainError("integrate: start off chart");

    const auto rhs = [&](double, const State<3>& y) -> State<3> {
        return magnetic_rhs(
            system, clamp_to_chart(system.chart, {y[0], y[1], y[2]}));
    };

    OdeOptions<3> opt;
    opt.rel_tol = settings.rel_tol;
    opt.abs_tol = settings.abs_tol;
    opt.max_step = settings.max_step;
    opt.stop_condition = [&](double, const State<3>& y) {
        return !chart_contains(system.chart, y[0], y[1]);
    };

    OdeSolution<3> sol = integrate_ode<3>(rhs, {start.x, start.y, start.phi},
                                          settings.horizon, opt);

    Trajectory traj;
    traj.step_stats = sol.stats;
    traj.exited_chart = sol.stopped_early;
    std::size_t n = sol.t.size();
    if (sol.stopped_early && n > 1) --n;  // drop the off-chart sample
    traj.times.assign(sol.t.begin(), sol.t.begin() + n);
    traj.states.reserve(n);
    traj.derivatives.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        traj.states.push_back({sol.y[i][0], sol.y[i][1], sol.y[i][2]});
        traj.derivatives.push_back(sol.dy[i]);
    }
    return traj;
}

double geodesic_curvature_residual(const MagneticSystem& system,
                                   const Trajectory& trajectory) {
    if (trajectory.size() == 0)
        throw std::invalid_argument("geodesic_curvature_residual: empty trajectory");
    double sup = 0.0;
    for (double r : geodesic_curvature_residuals(system, trajectory))
        sup = std::max(sup, std::abs(r));
    return sup;
}

std::vector<double> geodesic_curvature_residuals(const MagneticSystem& system,
                                                 const Trajectory& trajectory) {
    const std::size_t n = trajectory.size();
    std::vector<double> out(n, 0.0);
    if (n < 5) return out;
    // dφ/dt at sample i from a quartic fit through samples i-2..i+2,
    // using only the angle column (independent of the stored RHS).
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double t0 = trajectory.times[i];
        // Newton divided differences for the derivative of the interpolating
        // polynomial at t0.
        double ts[5], ph[5];
        for (int j = 0; j < 5; ++j) {
            ts[j] = trajectory.times[i - 2 + j] - t0;
            ph[j] = trajectory.states[i - 2 + j].phi;
        }
        // Divided difference table.
        double dd[5][5];
        for (int j = 0; j < 5; ++j) dd[j][0] = ph[j];
        for (int k = 1; k < 5; ++k)
            for (int j = 0; j + k < 5; ++j)
                dd[j][k] = (dd[j + 1][k - 1] - dd[j][k - 1]) / (ts[j + k] - ts[j]);
        // p'(0) where p(t) = sum dd[0][k] prod_{m<k}(t - ts[m]).
        double dphi = 0.0;
        for (int k = 1; k < 5; ++k) {
            double sum = 0.0;
            for (int skip = 0; skip < k; ++skip) {
                double prod = 1.0;
                for (int m = 0; m < k; ++m)
                    if (m != skip) prod *= (0.0 - ts[m]);
                sum += prod;
            }
            dphi += dd[0][k] * sum;
        }
        const UnitTangent& st = trajectory.states[i];
        const double k_g = dphi + frame_term(system, st);
        out[i] = k_g - system.intensity.value(st.x, st.y);
    }
    return out;
}

double band_occupation_time(const Trajectory& trajectory, double s_lo,
                            double s_hi, double tol) {
    if (trajectory.size() < 2) return 0.0;
    const auto inside = [&](double t) {
        const double s = trajectory.at(t).x;
        return s >= s_lo && s <= s_hi;
    };
    const auto refine = [&](double ta, double tb) {
        // inside(ta) != inside(tb); bisect the transition time.
        while (tb - ta > tol) {
            const double tm = 0.5 * (ta + tb);
            if (inside(tm) == inside(ta))
                ta = tm;
            else
                tb = tm;
        }
        return 0.5 * (ta + tb);
    };
    // Scan on a grid finer than the sample spacing to catch brief visits.
    const double T = trajectory.duration();
    const std::size_t n_scan = std::max<std::size_t>(trajectory.size() * 4, 64);
    const double dt = T / static_cast<double>(n_scan);
    double total = 0.0;
    double t_enter = 0.0;
    bool in = inside(0.0);
    for (std::size_t i = 1; i <= n_scan; ++i) {
        const double t = (i == n_scan) ? T : i * dt;
        const bool now = inside(t);
        if (now != in) {
            const double tc = refine(t - dt, t);
            if (in)
                total += tc - t_enter;
            else
                t_enter = tc;
            in = now;
        }
    }
    if (in) total += T - t_enter;
    return total;
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trajectory_csv(const MagneticSystem& system,
                           const Trajectory& trajectory) {
    const bool rev = std::holds_alternative<RevolutionChart>(system.chart);
    std::ostringstream os;
    os << (rev ? "t,s,theta,phi,k_residual\n" : "t,x,y,phi,k_residual\n");
    const auto res = geodesic_curvature_residuals(system, trajectory);
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const auto& st = trajectory.states[i];
        os << format17(trajectory.times[i]) << ',' << format17(st.x) << ','
           << format17(st.y) << ',' << format17(st.phi) << ','
           << format17(res[i]) << '\n';
    }
    return os.str();
}

}  // namespace magflow
