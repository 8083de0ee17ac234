#include "magflow/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magflow {

HyperbolicCylinder::HyperbolicCylinder(double translation_length)
    : ell(translation_length) {
    if (!(ell > 0))
        throw std::invalid_argument("HyperbolicCylinder: ell must be > 0");
}

ConformalChart HyperbolicCylinder::chart() const { return half_plane_chart(); }

MagneticSystem HyperbolicCylinder::system(double b) const {
    return {chart(), MagneticIntensity::constant(b)};
}

Vec2 HyperbolicCylinder::deck(const Vec2& p, int power) const {
    const double f = std::exp(ell * power);
    return {f * p[0], f * p[1]};
}

UnitTangent HyperbolicCylinder::deck(const UnitTangent& s, int power) const {
    const Vec2 p = deck(Vec2{s.x, s.y}, power);
    return {p[0], p[1], s.phi};
}

double closed_orbit_length_formula(double ell, double b) {
    if (!(std::abs(b) < 1.0))
        throw DomainError(
            "closed_orbit_length_formula: no closed orbit for |b| >= 1");
    if (!(ell > 0)) throw DomainError("closed_orbit_length_formula: ell <= 0");
    return ell / std::sqrt(1.0 - b * b);
}

namespace {

// Endpoint residual, with the position error measured after pulling the
// endpoint back by deck^{-n} so the scale is O(1) for every winding.
std::array<double, 3> shooting_residual(const HyperbolicCylinder& cyl,
                                        const MagneticSystem& sys, double x0,
                                        double phi0, double T, int n,
                                        const FlowSettings& fs) {
    FlowSettings s = fs;
    s.horizon = T;
    const Trajectory traj = integrate(sys, {x0, 1.0, phi0}, s);
    const UnitTangent end = traj.states.back();
    const UnitTangent target = cyl.deck(UnitTangent{x0, 1.0, phi0}, n);
    const double f = std::exp(-cyl.ell * n);
    return {f * (end.x - target.x), f * (end.y - target.y),
            angle_difference(end.phi, target.phi)};
}

void solve3(double J[3][3], double r[3], double dx[3]) {
    // Gaussian elimination with partial pivoting.
    int idx[3] = {0, 1, 2};
    for (int k = 0; k < 3; ++k) {
        int p = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::abs(J[idx[i]][k]) > std::abs(J[idx[p]][k])) p = i;
        std::swap(idx[k], idx[p]);
        const double piv = J[idx[k]][k];
        if (piv == 0.0) throw ShootingError("singular shooting Jacobian", 1e30);
        for (int i = k + 1; i < 3; ++i) {
            const double m = J[idx[i]][k] / piv;
            for (int j = k; j < 3; ++j) J[idx[i]][j] -= m * J[idx[k]][j];
            r[idx[i]] -= m * r[idx[k]];
        }
    }
    for (int k = 2; k >= 0; --k) {
        double s = r[idx[k]];
        for (int j = k + 1; j < 3; ++j) s -= J[idx[k]][j] * dx[j];
        dx[k] = s / J[idx[k]][k];
    }
}

}  // namespace

ClosedOrbit find_closed_orbit(const HyperbolicCylinder& cylinder, double b,
                              int winding, std::optional<UnitTangent> guess,
                              std::optional<double> period_guess) {
    if (winding == 0)
        throw std::invalid_argument("find_closed_orbit: winding must be nonzero");
    if (!(std::abs(b) < 1.0))
        throw DomainError("find_closed_orbit: |b| must be < 1");

    const MagneticSystem sys = cylinder.system(b);
    const double root = std::sqrt(1.0 - b * b);

    // Deliberately offset defaults so the solver does real work rather than
    // starting on the closed-form ray.
    double x0 = guess ? guess->x : b / root + 0.03;
    double phi0 = guess ? guess->phi
                        : (winding > 0 ? std::atan2(root, b) + 0.02
                                       : wrap_angle(std::atan2(root, b) + kPi) + 0.02);
    double T = period_guess
                   ? *period_guess
                   : 1.03 * std::abs(winding) *
                         closed_orbit_length_formula(cylinder.ell, b);

    FlowSettings fs;
    fs.rel_tol = fs.abs_tol = 1e-12;
    fs.max_step = 0.05;

    const double fd_h = 1e-7;
    double res_norm = 1e30;
    for (int iter = 0; iter < 50; ++iter) {
        auto r = shooting_residual(cylinder, sys, x0, phi0, T, winding, fs);
        res_norm = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
        if (res_norm < 1e-11) break;

        double J[3][3];
        const double vars[3] = {x0, phi0, T};
        for (int j = 0; j < 3; ++j) {
            double v[3] = {vars[0], vars[1], vars[2]};
            const double h = fd_h * std::max(1.0, std::abs(vars[j]));
            v[j] += h;
            const auto rp = shooting_residual(cylinder, sys, v[0], v[1], v[2],
                                              winding, fs);
            for (int i = 0; i < 3; ++i) J[i][j] = (rp[i] - r[i]) / h;
        }
        double rr[3] = {r[0], r[1], r[2]};
        double dx[3];
        solve3(J, rr, dx);

        // Damped update: halve until the residual decreases.
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 8; ++k) {
            const double nx = x0 - lambda * dx[0];
            const double nphi = phi0 - lambda * dx[1];
            const double nT = T - lambda * dx[2];
            if (nT > 0) {
                const auto rn = shooting_residual(cylinder, sys, nx, nphi, nT,
                                                  winding, fs);
                const double nn =
                    std::max({std::abs(rn[0]), std::abs(rn[1]), std::abs(rn[2])});
                if (nn < res_norm) {
                    x0 = nx;
                    phi0 = nphi;
                    T = nT;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!improved)
            throw ShootingError("find_closed_orbit: Newton stalled", res_norm);
    }
    if (!(res_norm < 1e-10))
        throw ShootingError("find_closed_orbit: no convergence", res_norm);

    ClosedOrbit orbit;
    orbit.start = {x0, 1.0, phi0};
    orbit.period = T;
    orbit.winding = winding;
    orbit.residual = res_norm;
    FlowSettings fin = fs;
    fin.horizon = T;
    orbit.trajectory = integrate(sys, orbit.start, fin);
    return orbit;
}

std::vector<MlsRow> mls_scaling_table(const std::vector<double>& ells,
                                      const std::vector<double>& bs) {
    std::vector<MlsRow> rows;
    for (double ell : ells) {
        for (double b : bs) {
            MlsRow row;
            row.ell = ell;
            row.b = b;
            row.period_formula = closed_orbit_length_formula(ell, b);
            try {
                const HyperbolicCylinder cyl(ell);
                const ClosedOrbit orbit = find_closed_orbit(cyl, b, 1);
                row.period_shot = orbit.period;
                row.abs_err = std::abs(row.period_shot - row.period_formula);
                row.converged = true;
            } catch (const ShootingError&) {
                row.converged = false;
            }
            rows.push_back(row);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const MlsRow& a, const MlsRow& b) {
        return a.ell != b.ell ? a.ell < b.ell : a.b < b.b;
    });
    return rows;
}

std::string mls_table_csv(const std::vector<MlsRow>& rows) {
    std::ostringstream os;
    os << "ell,b,period_shot,period_formula,abs_err,converged\n";
    for (const auto& r : rows) {
        os << format17(r.ell) << ',' << format17(r.b) << ','
           << format17(r.period_shot) << ',' << format17(r.period_formula)
           << ',' << format17(r.abs_err) << ',' << (r.converged ? 1 : 0)
           << '\n';
    }
    return os.str();
}

double Mat2::max_norm() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
}

Mat2 Mat2::operator-(const Mat2& o) const {
    return {a - o.a, b - o.b, c - o.c, d - o.d};
}

Mat2 Mat2::operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

Mat2 psl_generator(double b) { return {0.5, 0.5 * b, -0.5 * b, -0.5}; }

Mat2 mat_exp(const Mat2& m, double t) {
    // Split off the trace: exp(tm) = e^{t tr/2} exp(t m0), m0 traceless.
    const double half_tr = 0.5 * m.trace();
    const Mat2 m0{m.a - half_tr, m.b, m.c, m.d - half_tr};
    const double q = -m0.det();  // m0^2 = q I
    double cosh_part, sinc_part;
    const double z = q * t * t;
    if (z > 1e-12) {
        const double mu = std::sqrt(q) * std::abs(t);
        cosh_part = std::cosh(mu);
        sinc_part = std::sinh(mu) / mu;
    } else if (z < -1e-12) {
        const double om = std::sqrt(-q) * std::abs(t);
        cosh_part = std::cos(om);
        sinc_part = std::sin(om) / om;
    } else {
        cosh_part = 1.0 + z / 2.0;
        sinc_part = 1.0 + z / 6.0;
    }
    const double scale = std::exp(t * half_tr);
    return Mat2{cosh_part + sinc_part * t * m0.a, sinc_part * t * m0.b,
                sinc_part * t * m0.c, cosh_part + sinc_part * t * m0.d} *
           scale;
}

Mat2 conjugacy_matrix(double s, double b) {
    const double denom = 1.0 - s * b * b;
    if (std::abs(denom) < 1e-12)
        throw DomainError("conjugacy_matrix: singular prefactor");
    const double f = 1.0 / denom;
    return {f, -f * s * b, -f * s * b, f};
}

double intertwining_residual(double b, double t) {
    if (!(std::abs(b) < 1.0))
        throw DomainError("intertwining_residual: |b| must be < 1");
    const Mat2 xp = psl_generator(b);
    const Mat2 xm = psl_generator(-b);
    const Mat2 c = conjugacy_matrix(1.0, b);
    const double lie = (xp * c - c * xm).max_norm();
    const double grp = (mat_exp(xp, t) * c - c * mat_exp(xm, t)).max_norm();
    return std::max(lie, grp);
}

}  // namespace magflow
