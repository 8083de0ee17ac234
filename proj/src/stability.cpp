#include "magflow/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "nlohmann/json.hpp"

namespace magflow {

namespace {

double curvature_along(const MagneticSystem& system, const Trajectory& traj,
                       double t) {
    return magnetic_curvature(system, traj.at(t));
}

}  // namespace

double RiccatiRun::u_at(double t) const {
    if (times.empty()) throw std::runtime_error("RiccatiRun: empty run");
    if (t <= times.front()) return u.front();
    if (t >= times.back()) return u.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return (1 - w) * u[i] + w * u[i + 1];
}

RiccatiRun riccati_solve(const MagneticSystem& system,
                         const Trajectory& trajectory, double u0) {
    RiccatiRun run;
    run.u0 = u0;
    const double T = trajectory.duration();
    OdeOptions<1> opt;
    opt.rel_tol = opt.abs_tol = 1e-10;
    opt.max_step = 0.02;
    opt.stop_condition = [](double, const State<1>& y) {
        return std::abs(y[0]) > kBlowUpThreshold;
    };
    const auto rhs = [&](double t, const State<1>& y) -> State<1> {
        const double K = curvature_along(system, trajectory, std::min(t, T));
        return {-y[0] * y[0] - K};
    };
    OdeSolution<1> sol;
    try {
        sol = integrate_ode<1>(rhs, {u0}, T, opt);
    } catch (const StiffnessError&) {
        // Step rejection collapse near a pole counts as a blow-up; the
        // threshold crossing below locates it.
        sol.stopped_early = true;
    }
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        run.times.push_back(sol.t[i]);
        run.u.push_back(sol.y[i][0]);
    }
    if (sol.stopped_early) {
        // Refine the threshold crossing time inside the last step.
        if (run.times.size() >= 2) {
            const std::size_t i = run.times.size() - 2;
            double ta = run.times[i], tb = run.times[i + 1];
            const State<1> ya{run.u[i]}, yb{run.u[i + 1]};
            const State<1> da{-ya[0] * ya[0] -
                              curvature_along(system, trajectory, ta)};
            const State<1> db{-yb[0] * yb[0] -
                              curvature_along(system, trajectory,
                                              std::min(tb, T))};
            for (int k = 0; k < 60 && tb - ta > 1e-12; ++k) {
                const double tm = 0.5 * (ta + tb);
                const double um = hermite_interpolate<1>(
                    tm, run.times[i], ya, da, run.times[i + 1], yb, db)[0];
                if (std::abs(um) > kBlowUpThreshold)
                    tb = tm;
                else
                    ta = tm;
            }
            run.blow_up = 0.5 * (ta + tb);
        } else {
            run.blow_up = run.times.empty() ? 0.0 : run.times.back();
        }
    }
    return run;
}

JacobiRun jacobi_solve(const MagneticSystem& system,
                       const Trajectory& trajectory, double y0, double dy0) {
    JacobiRun run;
    run.y0 = y0;
    run.dy0 = dy0;
    const double T = trajectory.duration();
    OdeOptions<2> opt;
    opt.rel_tol = opt.abs_tol = 1e-10;
    opt.max_step = 0.02;
    const auto rhs = [&](double t, const State<2>& y) -> State<2> {
        const double K = curvature_along(system, trajectory, std::min(t, T));
        return {y[1], -K * y[0]};
    };
    const OdeSolution<2> sol = integrate_ode<2>(rhs, {y0, dy0}, T, opt);
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        run.times.push_back(sol.t[i]);
        run.y.push_back(sol.y[i][0]);
        run.dy.push_back(sol.y[i][1]);
    }
    return run;
}

double riccati_jacobi_consistency(const MagneticSystem& system,
                                  const Trajectory& trajectory, double y0,
                                  double dy0) {
    if (y0 == 0.0)
        throw std::invalid_argument("riccati_jacobi_consistency: y0 must be nonzero");
    const JacobiRun jac = jacobi_solve(system, trajectory, y0, dy0);
    const RiccatiRun ric = riccati_solve(system, trajectory, dy0 / y0);
    double sup = 0.0;
    for (std::size_t i = 0; i < jac.times.size(); ++i) {
        if (std::abs(jac.y[i]) < 1e-6) break;  // t* reached
        const double t = jac.times[i];
        if (ric.blow_up && t >= *ric.blow_up) break;
        sup = std::max(sup, std::abs(ric.u_at(t) - jac.dy[i] / jac.y[i]));
    }
    return sup;
}

UnitTangent certificate_sample(const SamplerBox& box, std::uint64_t seed,
                               std::uint64_t index) {
    // Per-sample engine so draws are independent of evaluation order.
    std::mt19937_64 eng(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    eng.discard(8);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double p = box.p_min + (box.p_max - box.p_min) * u01(eng);
    const double q = box.q_min + (box.q_max - box.q_min) * u01(eng);
    const double phi = box.phi_min + (box.phi_max - box.phi_min) * u01(eng);
    return {p, q, phi};
}

CertificateReport anosov_certificate(const MagneticSystem& system,
                                     const CertificateConfig& config_in) {
    CertificateConfig config = config_in;
    if (!(config.horizon > 0) || !(config.bound > 1) || config.samples < 1)
        throw std::invalid_argument("anosov_certificate: need T > 0, H > 1, N >= 1");
    if (config.u0_policy.empty()) config.u0_policy = {0.0, config.bound};
    if (!chart_contains(system.chart, config.box.p_min, config.box.q_min) ||
        !chart_contains(system.chart, config.box.p_max, config.box.q_max))
        throw DomainError("anosov_certificate: sampler box off chart");

    CertificateReport report;
    report.config = config;

    FlowSettings fs = config.flow;
    fs.horizon = config.horizon;

    struct SampleResult {
        std::vector<CertificateViolation> violations;
        double min_u = 1e300, max_u = -1e300;
    };

    const auto run_sample = [&](std::uint64_t i) -> SampleResult {
        SampleResult res;
        const UnitTangent start =
            certificate_sample(config.box, config.seed, i);
        Trajectory traj = integrate(system, start, fs);
        if (traj.exited_chart || traj.duration() < config.horizon * (1 - 1e-12)) {
            CertificateViolation v;
            v.sample_index = i;
            v.state = start;
            v.reason = "trajectory left chart before horizon";
            res.violations.push_back(v);
            return res;
        }
        for (double u0 : config.u0_policy) {
            const RiccatiRun run = riccati_solve(system, traj, u0);
            if (run.blow_up) {
                CertificateViolation v;
                v.sample_index = i;
                v.state = start;
                v.u0 = u0;
                v.blow_up_time = *run.blow_up;
                v.reason = "riccati blow-up before horizon";
                res.violations.push_back(v);
                continue;
            }
            const double uT = run.u_final();
            res.min_u = std::min(res.min_u, uT);
            res.max_u = std::max(res.max_u, uT);
            if (!(uT >= 1.0 / config.bound && uT <= config.bound)) {
                CertificateViolation v;
                v.sample_index = i;
                v.state = start;
                v.u0 = u0;
                v.u_final = uT;
                v.reason = "u(T) outside [1/H, H]";
                res.violations.push_back(v);
            }
        }
        return res;
    };

    const int threads = std::max(1, config.threads);
    std::vector<SampleResult> results(config.samples);
    if (threads == 1) {
        for (std::uint64_t i = 0; i < config.samples; ++i)
            results[i] = run_sample(i);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::uint64_t> next{0};
        for (int t = 0; t < threads; ++t) {
            futs.push_back(std::async(std::launch::async, [&]() {
                for (;;) {
                    const std::uint64_t i = next.fetch_add(1);
                    if (i >= config.samples) return;
                    results[i] = run_sample(i);
                }
            }));
        }
        for (auto& f : futs) f.get();
    }

    double min_u = 1e300, max_u = -1e300;
    for (auto& r : results) {
        for (auto& v : r.violations) report.violations.push_back(v);
        min_u = std::min(min_u, r.min_u);
        max_u = std::max(max_u, r.max_u);
    }
    std::sort(report.violations.begin(), report.violations.end(),
              [](const CertificateViolation& a, const CertificateViolation& b) {
                  return a.sample_index != b.sample_index
                             ? a.sample_index < b.sample_index
                             : a.u0 < b.u0;
              });
    report.min_u_final = min_u;
    report.max_u_final = max_u;
    report.pass = report.violations.empty();
    return report;
}

std::string certificate_json(const CertificateReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = "anosov-certificate/1";
    j["note"] = "empirical certificate, not a proof";
    j["config"] = {
        {"box",
         {{"p_min", report.config.box.p_min},
          {"p_max", report.config.box.p_max},
          {"q_min", report.config.box.q_min},
          {"q_max", report.config.box.q_max},
          {"phi_min", report.config.box.phi_min},
          {"phi_max", report.config.box.phi_max}}},
        {"T", report.config.horizon},
        {"H", report.config.bound},
        {"n", report.config.samples},
        {"u0_policy", report.config.u0_policy},
        {"rel_tol", report.config.flow.rel_tol},
        {"abs_tol", report.config.flow.abs_tol},
        {"max_step", report.config.flow.max_step},
    };
    j["seed"] = report.config.seed;
    j["n"] = report.config.samples;
    j["T"] = report.config.horizon;
    j["H"] = report.config.bound;
    j["pass"] = report.pass;
    j["min_u_final"] = report.min_u_final;
    j["max_u_final"] = report.max_u_final;
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.violations) {
        nlohmann::ordered_json jv;
        jv["sample_index"] = v.sample_index;
        jv["state"] = {v.state.x, v.state.y, v.state.phi};
        jv["u0"] = v.u0;
        if (v.u_final)
            jv["uT_or_blowup"] = *v.u_final;
        else if (v.blow_up_time)
            jv["uT_or_blowup"] = std::string("blowup@") + format17(*v.blow_up_time);
        jv["reason"] = v.reason;
        j["violations"].push_back(jv);
    }
    return j.dump(2) + "\n";
}

}  // namespace magflow
