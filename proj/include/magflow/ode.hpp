// Adaptive Dormand-Prince 5(4) with cubic-Hermite dense output.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace magflow {

struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double max_local_error = 0.0;
};

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct OdeSolution {
    std::vector<double> t;
    std::vector<State<N>> y;
    std::vector<State<N>> dy;  // RHS at each sample, for Hermite interpolation
    StepStats stats;
    bool stopped_early = false;  // stop_condition fired
};

template <std::size_t N>
State<N> hermite_interpolate(double t, double t0, const State<N>& y0,
                             const State<N>& d0, double t1, const State<N>& y1,
                             const State<N>& d1) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
    return out;
}

template <std::size_t N>
State<N> hermite_derivative(double t, double t0, const State<N>& y0,
                            const State<N>& d0, double t1, const State<N>& y1,
                            const State<N>& d1) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u;
    const double g00 = (6 * u2 - 6 * u) / h;
    const double g10 = 3 * u2 - 4 * u + 1;
    const double g01 = (-6 * u2 + 6 * u) / h;
    const double g11 = 3 * u2 - 2 * u;
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = g00 * y0[i] + g10 * d0[i] + g01 * y1[i] + g11 * d1[i];
    return out;
}

template <std::size_t N>
struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.02;
    double initial_step = 1e-3;
    // Return true to stop after the step landing on state y at time t.
    std::function<bool(double, const State<N>&)> stop_condition;
};

// Integrates y' = f(t, y) over [0, T]; every accepted step is a sample.
template <std::size_t N, typename Rhs>
OdeSolution<N> integrate_ode(Rhs&& f, const State<N>& y_start, double T,
                             const OdeOptions<N>& opt) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeSolution<N> sol;
    double t = 0.0;
    State<N> y = y_start;
    State<N> k1 = f(t, y);
    sol.t.push_back(t);
    sol.y.push_back(y);
    sol.dy.push_back(k1);

    double h = std::min({opt.initial_step, opt.max_step, T});
    const double h_min = 1e-14 * std::max(1.0, T);

    while (t < T) {
        if (h < h_min)
            throw StiffnessError("integrate_ode: step size underflow at t=" +
                                 std::to_string(t));
        if (t + h > T) h = T - t;

        State<N> y2, y3, y4, y5, y6, y7;
        for (std::size_t i = 0; i < N; ++i) y2[i] = y[i] + h * a21 * k1[i];
        State<N> k2 = f(t + c2 * h, y2);
        for (std::size_t i = 0; i < N; ++i)
            y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        State<N> k3 = f(t + c3 * h, y3);
        for (std::size_t i = 0; i < N; ++i)
            y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        State<N> k4 = f(t + c4 * h, y4);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                a54 * k4[i]);
        State<N> k5 = f(t + c5 * h, y5);
        for (std::size_t i = 0; i < N; ++i)
            y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                a64 * k4[i] + a65 * k5[i]);
        State<N> k6 = f(t + h, y6);
        for (std::size_t i = 0; i < N; ++i)
            y7[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        State<N> k7 = f(t + h, y7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                opt.abs_tol +
                opt.rel_tol * std::max(std::abs(y[i]), std::abs(y7[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0 || !std::isfinite(err)) {
            if (!std::isfinite(err)) {
                // Non-finite states: shrink hard and retry.
                ++sol.stats.rejected;
                h *= 0.1;
                continue;
            }
            t += h;
            y = y7;
            k1 = k7;  // FSAL
            ++sol.stats.accepted;
            sol.stats.max_local_error = std::max(sol.stats.max_local_error, err);
            sol.t.push_back(t);
            sol.y.push_back(y);
            sol.dy.push_back(k1);
            if (opt.stop_condition && opt.stop_condition(t, y)) {
                sol.stopped_early = true;
                return sol;
            }
        } else {
            ++sol.stats.rejected;
        }
        const double fac =
            std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
        h = std::min(h * fac, opt.max_step);
    }
    return sol;
}

}  // namespace magflow
