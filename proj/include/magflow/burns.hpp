// The Burns-type exact Anosov magnetic system on a surface of revolution,
// cohomology bookkeeping, and the magnetic length functional.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "magflow/hyperbolic.hpp"
#include "magflow/stability.hpp"

namespace magflow {

struct BurnsParams {
    double delta = 0.05;
    double delta1 = 0.5;
    double delta2 = 1.0;
    double delta3 = 3.0;   // carried for the ordering; no semantic role
    double delta4 = 7.0;
    double eps = 0.01;
    double core_slope = 0.1;   // -u'(0)
    double ramp_width = 0.35;  // bump descent ramp
    double s_extent = 20.0;    // chart half-width
};

// Profile u (tanh with the local core modification) and its flattened-tail
// variant v with K^{g_v} = -1-eps beyond delta2; iv(s) = ∫₀^s v.
struct BurnsProfile {
    BurnsParams params;
    std::function<double(double)> u, du;
    std::function<double(double)> v, dv, iv;
};

// Bump b₊ with plateau 1/2 on [-δ₂, δ₂] and a slope-bounded descent.
struct BumpIntensity {
    BurnsParams params;
    std::function<double(double)> b, db;
};

BurnsProfile make_burns_profile(const BurnsParams& params);
BumpIntensity make_burns_bump(const BurnsParams& params);

struct ValidationClause {
    std::string id;
    bool pass = false;
    double witness_s = 0.0;  // grid point realizing the extreme value
    double value = 0.0;
    double bound = 0.0;
};

std::vector<ValidationClause> validate_profile(const BurnsProfile& profile);
std::vector<ValidationClause> validate_bump(const BumpIntensity& bump);

struct BurnsConstructionError : std::runtime_error {
    std::vector<ValidationClause> failed;
    BurnsConstructionError(const std::string& msg,
                           std::vector<ValidationClause> clauses)
        : std::runtime_error(msg), failed(std::move(clauses)) {}
};

struct BurnsSystem {
    BurnsProfile profile;
    BumpIntensity bump;
    MagneticSystem system;  // (g_v, b₊); the b₋ copy is the sign flip
    std::vector<ValidationClause> validation;  // all clauses incl. grid checks
};

// Validates every clause; throws BurnsConstructionError listing the failed
// ones. The returned validation list also carries the system-level grid
// checks (magnetic-curvature bounds, the s = 0 witness, exactness).
BurnsSystem build_burns_system(const BurnsProfile& profile,
                               const BumpIntensity& bump);

std::string validation_json(const std::vector<ValidationClause>& clauses);

// (1/2πχ) ∫ b Ω_g over the region.
double cohomology_constant(const Chart& chart, const ScalarFn& b,
                           double euler_char, const Rect& region);

// |A1[1 + 2πχ c2²/A2] - A2[1 + 2πχ c1²/A1]|.
double homology_relation_check(double A1, double A2, double c1, double c2,
                               double euler_char);

// Closed curve on the half-plane cylinder, t in [0,1], with
// pos(1) = deck^winding(pos(0)).
struct ClosedCurve {
    std::function<Vec2(double)> pos;
    std::function<Vec2(double)> vel;
    int winding = 1;
};

struct ExactPrimitive {
    // Covector coefficients (θ_x, θ_y) with dθ = b Ω_g.
    std::function<Vec2(double, double)> theta;
};

ExactPrimitive cylinder_constant_primitive(double b);
ExactPrimitive revolution_primitive(const RevolutionChart& chart,
                                    std::function<double(double)> b);

struct HomotopyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double curve_length(const Chart& chart, const ClosedCurve& curve,
                    int subdivisions = 4096);
double primitive_line_integral(const ExactPrimitive& primitive,
                               const ClosedCurve& curve, int subdivisions = 4096);
double primitive_line_integral(const ExactPrimitive& primitive,
                               const Trajectory& orbit, int subdivisions = 4096);

// ℓ_g(curve) + ∫_ref θ - ∫_curve θ: the Stokes realization of the flux
// through a homotopy to the reference closed magnetic geodesic, with the
// boundary sense fixed so the reference minimizes.
double magnetic_length(const MagneticSystem& system,
                       const ExactPrimitive& primitive, const ClosedCurve& curve,
                       const ClosedOrbit& reference);

struct BurnsExperimentConfig {
    CertificateConfig certificate;
    int reversal_checks = 5;
    double band_cap = 1.0;  // empirical cap on 2t_δ, recorded not asserted
};

struct BurnsExperimentResult {
    CertificateReport report;
    double max_band_time = 0.0;
    double band_cap = 0.0;
    double bplus_flux = 0.0;            // ∫ b₊ Ω over one copy
    double doubled_flux = 0.0;          // b₊ copy plus b₋ copy
    double no_radius_flux = 0.0;        // 2π[∫b₊ ds + ∫b₋ ds], no radius factor
    double max_reversal_mismatch = 0.0;
};

BurnsExperimentResult burns_certificate_experiment(
    const BurnsSystem& burns, const BurnsExperimentConfig& config);

}  // namespace magflow
