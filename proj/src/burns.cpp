#include "magflow/burns.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlohmann/json.hpp"

namespace magflow {

namespace {

double smoothstep5(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Uniform-node cubic Hermite table; derivative values come from the ODE
// right-hand side, so the interpolant is locally O(h^4).
struct DenseTable {
    double a = 0.0, h = 1.0;
    std::vector<double> y, dy;

    double value(double s) const {
        const double pos = (s - a) / h;
        std::size_t i = static_cast<std::size_t>(std::floor(pos));
        if (pos <= 0) return y.front();
        if (i >= y.size() - 1) return y.back();
        const double t0 = a + i * h;
        return hermite_interpolate<1>(s, t0, {y[i]}, {dy[i]}, t0 + h,
                                      {y[i + 1]}, {dy[i + 1]})[0];
    }
};

struct QuinticCore {
    // u(s) = -a s + c3 s^3 + c4 s^4 + c5 s^5 on [0, delta], odd extension.
    double a = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, delta = 0.0;

    double eval(double s) const {
        const double sg = s < 0 ? -1.0 : 1.0;
        s = std::abs(s);
        return sg * (-a * s + c3 * s * s * s + c4 * s * s * s * s +
                     c5 * s * s * s * s * s);
    }
    double deriv(double s) const {
        s = std::abs(s);
        return -a + 3 * c3 * s * s + 4 * c4 * s * s * s +
               5 * c5 * s * s * s * s;
    }
    double integral(double s) const {  // ∫₀^s, even in s
        s = std::abs(s);
        const double s2 = s * s;
        return -a * s2 / 2 + c3 * s2 * s2 / 4 + c4 * s2 * s2 * s / 5 +
               c5 * s2 * s2 * s2 / 6;
    }
};

QuinticCore make_core(double delta, double slope) {
    QuinticCore q;
    q.a = slope;
    q.delta = delta;
    const double d = delta;
    const double th = std::tanh(d);
    const double sh2 = 1.0 / (std::cosh(d) * std::cosh(d));
    const double thpp = -2.0 * th * sh2;
    // Match value, first and second derivative of tanh at s = delta.
    const double r1 = th + slope * d;
    const double r2 = sh2 + slope;
    const double r3 = thpp;
    const double d2 = d * d, d3 = d2 * d, d4 = d3 * d, d5 = d4 * d;
    // [d^3 d^4 d^5; 3d^2 4d^3 5d^4; 6d 12d^2 20d^3] (c3 c4 c5)^T = r.
    const double m11 = d3, m12 = d4, m13 = d5;
    const double m21 = 3 * d2, m22 = 4 * d3, m23 = 5 * d4;
    const double m31 = 6 * d, m32 = 12 * d2, m33 = 20 * d3;
    const double det = m11 * (m22 * m33 - m23 * m32) -
                       m12 * (m21 * m33 - m23 * m31) +
                       m13 * (m21 * m32 - m22 * m31);
    q.c3 = (r1 * (m22 * m33 - m23 * m32) - m12 * (r2 * m33 - m23 * r3) +
            m13 * (r2 * m32 - m22 * r3)) /
           det;
    q.c4 = (m11 * (r2 * m33 - m23 * r3) - r1 * (m21 * m33 - m23 * m31) +
            m13 * (m21 * r3 - r2 * m31)) /
           det;
    q.c5 = (m11 * (m22 * r3 - r2 * m32) - m12 * (m21 * r3 - r2 * m31) +
            r1 * (m21 * m32 - m22 * m31)) /
           det;
    return q;
}

// RK4 over uniform nodes, storing values and derivatives.
template <typename F>
DenseTable rk4_table(F&& f, double a, double b, double y0, std::size_t n) {
    DenseTable tab;
    tab.a = a;
    tab.h = (b - a) / static_cast<double>(n);
    tab.y.reserve(n + 1);
    tab.dy.reserve(n + 1);
    double y = y0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = a + i * tab.h;
        tab.y.push_back(y);
        tab.dy.push_back(f(s, y));
        if (i == n) break;
        const double h = tab.h;
        const double k1 = f(s, y);
        const double k2 = f(s + h / 2, y + h / 2 * k1);
        const double k3 = f(s + h / 2, y + h / 2 * k2);
        const double k4 = f(s + h, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return tab;
}

}  // namespace

BurnsProfile make_burns_profile(const BurnsParams& p) {
    BurnsProfile out;
    out.params = p;

    const QuinticCore core = make_core(p.delta, p.core_slope);
    const auto u_fn = [core, p](double s) {
        return std::abs(s) <= p.delta ? core.eval(s) : std::tanh(s);
    };
    const auto du_fn = [core, p](double s) {
        if (std::abs(s) <= p.delta) return core.deriv(s);
        const double c = std::cosh(s);
        return 1.0 / (c * c);
    };
    const auto iu_fn = [core, p](double s) {  // ∫₀^s u, even
        const double as = std::abs(s);
        if (as <= p.delta) return core.integral(s);
        return core.integral(p.delta) + std::log(std::cosh(as)) -
               std::log(std::cosh(p.delta));
    };

    // v beyond delta1: prescribe K and recover v from the Riccati relation
    // v' = -K - v^2, so K^{g_v} matches the target exactly.
    const double eps = p.eps;
    const double d1 = p.delta1, d2 = p.delta2;
    const auto K_target = [eps, d1, d2](double s) {
        return -1.0 - eps * smoothstep5((s - d1) / (d2 - d1));
    };
    const DenseTable v_mid = rk4_table(
        [&](double s, double v) { return -K_target(s) - v * v; }, d1, d2,
        std::tanh(d1), 8192);
    const DenseTable iv_mid = rk4_table(
        [&](double s, double) { return v_mid.value(s); }, d1, d2, iu_fn(d1),
        8192);
    const double M = std::sqrt(1.0 + eps);
    const double v_d2 = v_mid.y.back();
    const double s20 = d2 - std::atanh(v_d2 / M) / M;
    const double iv_d2 = iv_mid.y.back();
    const double lc_d2 = std::log(std::cosh(M * (d2 - s20)));

    const auto v_fn = [=](double s) {
        const double sg = s < 0 ? -1.0 : 1.0;
        const double as = std::abs(s);
        if (as <= d1) return u_fn(s);
        if (as <= d2) return sg * v_mid.value(as);
        return sg * M * std::tanh(M * (as - s20));
    };
    const auto dv_fn = [=](double s) {
        const double as = std::abs(s);
        if (as <= d1) return du_fn(s);
        if (as <= d2) {
            const double v = v_mid.value(as);
            return -K_target(as) - v * v;
        }
        const double v = M * std::tanh(M * (as - s20));
        return M * M - v * v;
    };
    const auto iv_fn = [=](double s) {
        const double as = std::abs(s);
        if (as <= d1) return iu_fn(s);
        if (as <= d2) return iv_mid.value(as);
        return iv_d2 + std::log(std::cosh(M * (as - s20))) - lc_d2;
    };

    out.u = u_fn;
    out.du = du_fn;
    out.v = v_fn;
    out.dv = dv_fn;
    out.iv = iv_fn;
    return out;
}

BumpIntensity make_burns_bump(const BurnsParams& p) {
    BumpIntensity out;
    out.params = p;

    // Descent: b' = -ρ(s)(m² - b²) with m² = 1/4 + ε/2, so the pointwise
    // bound |db| + b² <= m² holds with margin ε/2. The ramp-down start is
    // tuned by bisection so the descent lands on zero exactly at δ₄.
    const double m2 = 0.25 + 0.5 * p.eps;
    const double d2 = p.delta2, d4 = p.delta4, w = p.ramp_width;
    const auto make_ramp = [=](double sd) {
        return [=](double s) {
            return smoothstep5((s - d2) / w) * (1.0 - smoothstep5((s - sd) / w));
        };
    };
    const auto end_value = [&](double sd) {
        const auto ramp = make_ramp(sd);
        return rk4_table(
                   [&](double s, double b) { return -ramp(s) * (m2 - b * b); },
                   d2, d4, 0.5, 2048)
            .y.back();
    };
    double lo = d2 + w, hi = d4 - w;
    if (end_value(hi) > 0.0)
        throw BurnsConstructionError(
            "make_burns_bump: descent cannot reach zero within [delta2, delta4]",
            {});
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (end_value(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double sd = 0.5 * (lo + hi);
    const auto ramp = make_ramp(sd);
    DenseTable tab = rk4_table(
        [&](double s, double b) { return -ramp(s) * (m2 - b * b); }, d2, d4,
        0.5, 16384);
    for (auto& y : tab.y) y = std::clamp(y, 0.0, 0.5);
    tab.y.back() = 0.0;
    tab.dy.back() = 0.0;

    out.b = [=](double s) {
        const double as = std::abs(s);
        if (as <= d2) return 0.5;
        if (as >= d4) return 0.0;
        return std::max(0.0, tab.value(as));
    };
    out.db = [=](double s) {
        const double as = std::abs(s);
        if (as <= d2 || as >= d4) return 0.0;
        const double b = std::max(0.0, tab.value(as));
        const double g = -ramp(as) * (m2 - b * b);
        return s < 0 ? -g : g;
    };
    return out;
}

namespace {

struct GridSup {
    double sup = -1e300;
    double arg = 0.0;
};

template <typename F>
GridSup grid_sup(F&& f, double a, double b, int n) {
    GridSup out;
    for (int i = 0; i <= n; ++i) {
        const double s = a + (b - a) * i / n;
        const double v = f(s);
        if (v > out.sup) {
            out.sup = v;
            out.arg = s;
        }
    }
    return out;
}

void add_clause(std::vector<ValidationClause>& clauses, const std::string& id,
                const GridSup& g, double bound, bool strict = false) {
    ValidationClause c;
    c.id = id;
    c.witness_s = g.arg;
    c.value = g.sup;
    c.bound = bound;
    c.pass = strict ? (g.sup < bound) : (g.sup <= bound);
    clauses.push_back(c);
}

constexpr int kGrid = 2001;

}  // namespace

std::vector<ValidationClause> validate_profile(const BurnsProfile& pr) {
    std::vector<ValidationClause> cl;
    const BurnsParams& p = pr.params;

    {
        ValidationClause c;
        c.id = "profile.ordering";
        c.pass = p.delta < 0.25 && 0.25 < p.delta1 && p.delta1 < p.delta2 &&
                 p.delta2 < p.delta3 && p.delta3 < p.delta4 && p.eps > 0;
        c.value = p.delta;
        c.bound = 0.25;
        cl.push_back(c);
    }
    add_clause(cl, "profile.u_tanh_outside_core",
               grid_sup([&](double s) { return std::abs(pr.u(s) - std::tanh(s)); },
                        p.delta * (1 + 1e-12), p.delta1, kGrid),
               1e-14);
    {
        auto g = grid_sup([&](double s) { return std::abs(pr.u(s)); }, -p.delta,
                          p.delta, kGrid);
        add_clause(cl, "profile.core_u_bound", g, std::tanh(0.25), true);
    }
    add_clause(cl, "profile.core_curvature",
               grid_sup(
                   [&](double s) {
                       return -pr.du(s) - pr.u(s) * pr.u(s);
                   },
                   -p.delta, p.delta, kGrid),
               0.25, true);
    {
        ValidationClause c;
        c.id = "profile.center_zero";
        c.value = pr.u(0.0);
        c.bound = 0.0;
        c.pass = std::abs(c.value) < 1e-12;
        cl.push_back(c);
    }
    {
        ValidationClause c;
        c.id = "profile.center_slope_negative";
        c.value = pr.du(0.0);
        c.bound = 0.0;
        c.pass = c.value < 0.0;
        cl.push_back(c);
    }
    add_clause(cl, "profile.v_matches_u_inside",
               grid_sup([&](double s) { return std::abs(pr.v(s) - pr.u(s)); },
                        -p.delta1, p.delta1, kGrid),
               1e-12);
    add_clause(cl, "profile.v_mid_curvature",
               grid_sup(
                   [&](double s) {
                       return -pr.dv(s) - pr.v(s) * pr.v(s);
                   },
                   p.delta1, p.delta2, kGrid),
               1.0);
    add_clause(cl, "profile.v_tail_curvature",
               grid_sup(
                   [&](double s) {
                       return std::abs(-pr.dv(s) - pr.v(s) * pr.v(s) + 1.0 +
                                       p.eps);
                   },
                   p.delta2 * (1 + 1e-12), p.s_extent, kGrid),
               1e-9);
    return cl;
}

std::vector<ValidationClause> validate_bump(const BumpIntensity& bp) {
    std::vector<ValidationClause> cl;
    const BurnsParams& p = bp.params;
    add_clause(cl, "bump.support",
               grid_sup([&](double s) { return std::abs(bp.b(s)); }, p.delta4,
                        p.s_extent, kGrid),
               0.0);
    add_clause(cl, "bump.range_upper",
               grid_sup([&](double s) { return bp.b(s); }, -p.s_extent,
                        p.s_extent, kGrid),
               0.5);
    add_clause(cl, "bump.range_lower",
               grid_sup([&](double s) { return -bp.b(s); }, -p.s_extent,
                        p.s_extent, kGrid),
               0.0);
    add_clause(cl, "bump.plateau",
               grid_sup([&](double s) { return std::abs(bp.b(s) - 0.5); },
                        -p.delta2, p.delta2, kGrid),
               1e-14);
    add_clause(cl, "bump.slope_bound",
               grid_sup(
                   [&](double s) {
                       return std::abs(bp.db(s)) + bp.b(s) * bp.b(s);
                   },
                   -p.s_extent, p.s_extent, 4 * kGrid),
               0.25 + p.eps, true);
    return cl;
}

BurnsSystem build_burns_system(const BurnsProfile& profile,
                               const BumpIntensity& bump) {
    BurnsSystem sys;
    sys.profile = profile;
    sys.bump = bump;
    sys.validation = validate_profile(profile);
    {
        auto bc = validate_bump(bump);
        sys.validation.insert(sys.validation.end(), bc.begin(), bc.end());
    }

    const BurnsParams& p = profile.params;
    RevolutionChart chart;
    chart.s_min = -p.s_extent;
    chart.s_max = p.s_extent;
    chart.profile = profile.v;
    chart.profile_derivative = profile.dv;
    chart.profile_integral = profile.iv;
    sys.system.chart = chart;
    sys.system.intensity = MagneticIntensity::from_profile(bump.b, bump.db);

    // System-level grid checks.
    const auto worst_mag_curv = [&](double s) {
        // sup over φ of K^{g_v} + db sinφ + b².
        const double K = -profile.dv(s) - profile.v(s) * profile.v(s);
        return K + std::abs(bump.db(s)) + bump.b(s) * bump.b(s);
    };
    {
        ValidationClause c;
        c.id = "system.parallel_witness";
        const double K0 = -profile.du(0.0) - profile.u(0.0) * profile.u(0.0);
        c.value = K0;
        c.bound = 0.0;
        c.pass = std::abs(profile.u(0.0)) < 1e-12 && K0 > 0.0;
        sys.validation.push_back(c);
    }
    add_clause(sys.validation, "system.mag_curvature_in_band",
               grid_sup(worst_mag_curv, -p.delta, p.delta, kGrid),
               0.5 + 1e-9);
    {
        auto g1 = grid_sup(worst_mag_curv, p.delta, p.s_extent, kGrid);
        auto g2 = grid_sup(worst_mag_curv, -p.s_extent, -p.delta, kGrid);
        add_clause(sys.validation, "system.mag_curvature_outside_band",
                   g1.sup >= g2.sup ? g1 : g2, -0.75 + 1e-9);
    }
    {
        // Exactness of the doubled system: the b₋ copy contributes the
        // negative of the b₊ flux.
        const Rect region{-p.s_extent, p.s_extent, 0.0, kTwoPi};
        const IntegralResult plus = area_integral(
            sys.system.chart, [&](double s, double) { return bump.b(s); },
            region, 1e-11);
        const IntegralResult minus = area_integral(
            sys.system.chart, [&](double s, double) { return -bump.b(s); },
            region, 1e-11);
        ValidationClause c;
        c.id = "system.exactness_doubled_flux";
        c.value = std::abs(plus.value + minus.value);
        c.bound = 1e-8;
        c.pass = c.value < c.bound;
        sys.validation.push_back(c);
    }

    std::vector<ValidationClause> failed;
    for (const auto& c : sys.validation)
        if (!c.pass) failed.push_back(c);
    if (!failed.empty()) {
        std::ostringstream os;
        os << "build_burns_system: " << failed.size() << " clause(s) violated:";
        for (const auto& c : failed)
            os << ' ' << c.id << " (value " << c.value << " vs bound " << c.bound
               << " at s=" << c.witness_s << ')';
        throw BurnsConstructionError(os.str(), failed);
    }
    return sys;
}

std::string validation_json(const std::vector<ValidationClause>& clauses) {
    nlohmann::ordered_json j;
    j["schema"] = "burns-validation/1";
    bool all = true;
    j["clauses"] = nlohmann::ordered_json::array();
    for (const auto& c : clauses) {
        all = all && c.pass;
        j["clauses"].push_back({{"id", c.id},
                                {"pass", c.pass},
                                {"value", c.value},
                                {"bound", c.bound},
                                {"witness_s", c.witness_s}});
    }
    j["pass"] = all;
    return j.dump(2) + "\n";
}

double cohomology_constant(const Chart& chart, const ScalarFn& b,
                           double euler_char, const Rect& region) {
    if (euler_char == 0.0)
        throw DomainError("cohomology_constant: Euler characteristic is zero");
    const IntegralResult r = area_integral(chart, b, region, 1e-11);
    return r.value / (kTwoPi * euler_char);
}

double homology_relation_check(double A1, double A2, double c1, double c2,
                               double euler_char) {
    if (!(A1 > 0) || !(A2 > 0))
        throw std::invalid_argument("homology_relation_check: areas must be > 0");
    const double lhs = A1 * (1.0 + kTwoPi * euler_char * c2 * c2 / A2);
    const double rhs = A2 * (1.0 + kTwoPi * euler_char * c1 * c1 / A1);
    return std::abs(lhs - rhs);
}

ExactPrimitive cylinder_constant_primitive(double b) {
    ExactPrimitive p;
    p.theta = [b](double, double y) -> Vec2 { return {b / y, 0.0}; };
    return p;
}

ExactPrimitive revolution_primitive(const RevolutionChart& chart,
                                    std::function<double(double)> b) {
    // θ = B(s) dθ-coordinate with B(s) = ∫₀^s b r, so dθ = b r ds∧dθ = bΩ.
    ExactPrimitive p;
    auto radius = [chart](double s) { return chart.radius(s); };
    p.theta = [b, radius](double s, double) -> Vec2 {
        // Composite Simpson from 0 to s; integrand is smooth and cheap.
        const int n = 512;
        const double h = s / n;
        double acc = b(0.0) * radius(0.0) + b(s) * radius(s);
        for (int i = 1; i < n; ++i)
            acc += (i % 2 ? 4.0 : 2.0) * b(i * h) * radius(i * h);
        return {0.0, acc * h / 3.0};
    };
    return p;
}

namespace {

// Composite Simpson over [0, 1] with n (even) subintervals.
template <typename F>
double simpson01(F&& f, int n) {
    if (n % 2) ++n;
    const double h = 1.0 / n;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

double curve_length(const Chart& chart, const ClosedCurve& curve,
                    int subdivisions) {
    return simpson01(
        [&](double t) {
            const Vec2 p = curve.pos(t);
            const Vec2 v = curve.vel(t);
            return metric_norm(chart, p[0], p[1], v[0], v[1]);
        },
        subdivisions);
}

double primitive_line_integral(const ExactPrimitive& primitive,
                               const ClosedCurve& curve, int subdivisions) {
    return simpson01(
        [&](double t) {
            const Vec2 p = curve.pos(t);
            const Vec2 v = curve.vel(t);
            const Vec2 th = primitive.theta(p[0], p[1]);
            return th[0] * v[0] + th[1] * v[1];
        },
        subdivisions);
}

double primitive_line_integral(const ExactPrimitive& primitive,
                               const Trajectory& orbit, int subdivisions) {
    const double T = orbit.duration();
    return T * simpson01(
                   [&](double t) {
                       const UnitTangent st = orbit.at(t * T);
                       const auto d = orbit.derivative_at(t * T);
                       const Vec2 th = primitive.theta(st.x, st.y);
                       return th[0] * d[0] + th[1] * d[1];
                   },
                   subdivisions);
}

double magnetic_length(const MagneticSystem& system,
                       const ExactPrimitive& primitive, const ClosedCurve& curve,
                       const ClosedOrbit& reference) {
    if (curve.winding != reference.winding)
        throw HomotopyError(
            "magnetic_length: curve winding does not match the reference class");
    const double len = curve_length(system.chart, curve);
    const double flux_curve = primitive_line_integral(primitive, curve);
    const double flux_ref =
        primitive_line_integral(primitive, reference.trajectory);
    return len + flux_ref - flux_curve;
}

BurnsExperimentResult burns_certificate_experiment(
    const BurnsSystem& burns, const BurnsExperimentConfig& config) {
    BurnsExperimentResult out;
    const BurnsParams& p = burns.profile.params;

    out.report = anosov_certificate(burns.system, config.certificate);

    // Band occupation across a certificate subsample.
    FlowSettings fs = config.certificate.flow;
    fs.horizon = config.certificate.horizon;
    const std::uint64_t band_samples =
        std::min<std::uint64_t>(config.certificate.samples, 200);
    for (std::uint64_t i = 0; i < band_samples; ++i) {
        const UnitTangent start = certificate_sample(
            config.certificate.box, config.certificate.seed, i);
        const Trajectory traj = integrate(burns.system, start, fs);
        out.max_band_time = std::max(
            out.max_band_time, band_occupation_time(traj, -p.delta, p.delta));
    }
    out.band_cap = config.band_cap;

    // Exactness bookkeeping for the doubled surface.
    const Rect region{-p.s_extent, p.s_extent, 0.0, kTwoPi};
    out.bplus_flux =
        area_integral(burns.system.chart,
                      [&](double s, double) { return burns.bump.b(s); }, region,
                      1e-11)
            .value;
    out.doubled_flux =
        out.bplus_flux +
        area_integral(burns.system.chart,
                      [&](double s, double) { return -burns.bump.b(s); }, region,
                      1e-11)
            .value;
    {
        // Bookkeeping variant without the radius factor of the area form.
        const int n = 20000;
        const double a = -p.delta4, b2 = p.delta4, h = (b2 - a) / n;
        double accp = burns.bump.b(a) + burns.bump.b(b2);
        double accm = -burns.bump.b(a) - burns.bump.b(b2);
        for (int i = 1; i < n; ++i) {
            const double w = i % 2 ? 4.0 : 2.0;
            accp += w * burns.bump.b(a + i * h);
            accm -= w * burns.bump.b(a + i * h);
        }
        out.no_radius_flux = kTwoPi * (accp + accm) * h / 3.0;
    }

    // Reversal: a time-reversed (g, b₊) orbit is a (g, -b₊) orbit.
    MagneticSystem flipped = burns.system;
    {
        auto b = burns.bump.b;
        auto db = burns.bump.db;
        flipped.intensity = MagneticIntensity::from_profile(
            [b](double s) { return -b(s); }, [db](double s) { return -db(s); });
    }
    for (int i = 0; i < config.reversal_checks; ++i) {
        const UnitTangent start = certificate_sample(
            config.certificate.box, config.certificate.seed + 1000,
            static_cast<std::uint64_t>(i));
        const Trajectory fwd = integrate(burns.system, start, fs);
        const UnitTangent end = fwd.states.back();
        const UnitTangent reversed{end.x, end.y, wrap_angle(end.phi + kPi)};
        FlowSettings back = fs;
        back.horizon = fwd.duration();
        const Trajectory rev = integrate(flipped, reversed, back);
        const UnitTangent re = rev.states.back();
        const double mismatch =
            std::max({std::abs(re.x - start.x), std::abs(re.y - start.y),
                      std::abs(angle_difference(re.phi, start.phi + kPi))});
        out.max_reversal_mismatch = std::max(out.max_reversal_mismatch, mismatch);
    }
    return out;
}

}  // namespace magflow
