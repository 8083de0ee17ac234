// Magnetic Riccati and Jacobi equations along trajectories, and the
// Monte-Carlo Anosov certificate.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magflow/flow.hpp"
#include "magflow/geom.hpp"

namespace magflow {

inline constexpr double kBlowUpThreshold = 1e8;

struct RiccatiRun {
    double u0 = 0.0;
    std::vector<double> times;
    std::vector<double> u;
    std::optional<double> blow_up;  // finite blow-up time, if detected

    double u_final() const { return u.back(); }
    double u_at(double t) const;  // linear interpolation between samples
};

struct JacobiRun {
    double y0 = 0.0, dy0 = 0.0;
    std::vector<double> times;
    std::vector<double> y;
    std::vector<double> dy;
};

// u' = -u^2 - K^{g,b}(γ(t), γ'(t)); K evaluated by dense interpolation of
// the trajectory. |u| > 1e8 records a finite blow-up time and stops.
RiccatiRun riccati_solve(const MagneticSystem& system,
                         const Trajectory& trajectory, double u0);

// y'' + K^{g,b} y = 0 with the same interpolated curvature.
JacobiRun jacobi_solve(const MagneticSystem& system,
                       const Trajectory& trajectory, double y0, double dy0);

// sup |u(t) - y'(t)/y(t)| over [0, t*] where t* is the first approach of
// |y| below 1e-6 (or the horizon).
double riccati_jacobi_consistency(const MagneticSystem& system,
                                  const Trajectory& trajectory, double y0,
                                  double dy0);

struct SamplerBox {
    double p_min = 0.0, p_max = 1.0;      // s or y
    double q_min = 0.0, q_max = kTwoPi;   // θ or x
    double phi_min = 0.0, phi_max = kTwoPi;
};

struct CertificateViolation {
    std::uint64_t sample_index = 0;
    UnitTangent state;
    double u0 = 0.0;
    std::optional<double> u_final;     // absent if the run blew up
    std::optional<double> blow_up_time;
    std::string reason;
};

struct CertificateConfig {
    SamplerBox box;
    double horizon = 8.0;
    double bound = 3.0;  // H
    std::uint64_t samples = 100;
    std::uint64_t seed = 1;
    std::vector<double> u0_policy;  // default {0, H}
    FlowSettings flow;
    int threads = 1;
};

struct CertificateReport {
    CertificateConfig config;
    bool pass = false;
    std::vector<CertificateViolation> violations;
    double min_u_final = 0.0;
    double max_u_final = 0.0;
};

// Draws N seeded initial unit tangents, integrates each to the horizon,
// solves Riccati for every u0 in the policy, and checks 1/H <= u(T) <= H.
// Empirical certificate only; not a proof.
CertificateReport anosov_certificate(const MagneticSystem& system,
                                     const CertificateConfig& config);

// Deterministic JSON serialization.
std::string certificate_json(const CertificateReport& report);

// The i-th sample of the seeded sampler (order-independent).
UnitTangent certificate_sample(const SamplerBox& box, std::uint64_t seed,
                               std::uint64_t index);

}  // namespace magflow
