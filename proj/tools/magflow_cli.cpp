// Experiment harness: each pipeline as a subcommand with file outputs.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "magflow/burns.hpp"
#include "magflow/hyperbolic.hpp"
#include "magflow/stability.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace magflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitValidation = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Plain-text key = value config with a mandatory schema version; unknown
// keys are errors.
struct Config {
    std::map<std::string, std::string> kv;
    std::string raw;

    bool has(const std::string& k) const { return kv.count(k) > 0; }
    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(k);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + k + "' is not a number: " +
                              it->second);
        }
    }
    std::int64_t integer(const std::string& k, std::int64_t dflt) const {
        const double v = num(k, static_cast<double>(dflt));
        const auto i = static_cast<std::int64_t>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("config: key '" + k + "' is not an integer");
        return i;
    }
    std::vector<double> list(const std::string& k,
                             std::vector<double> dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("config: bad list entry in '" + k + "': " + tok);
            }
        }
        if (out.empty())
            throw ConfigError("config: empty list for '" + k + "'");
        return out;
    }
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Config parse_config(const std::string& path,
                    const std::vector<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    Config cfg;
    std::ostringstream raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        raw << line << '\n';
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (cfg.kv.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        cfg.kv[key] = val;
    }
    cfg.raw = raw.str();
    if (cfg.str("schema", "") != "1")
        throw ConfigError("config: missing or unsupported schema (need schema = 1)");
    for (const auto& [k, v] : cfg.kv) {
        if (k == "schema") continue;
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("config: unknown key '" + k + "'");
    }
    return cfg;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

struct Manifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string started;
    json artifacts = json::array();

    void add(const fs::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        out << content;
        artifacts.push_back({{"path", p.filename().string()},
                             {"bytes", content.size()},
                             {"fnv1a", hex64(fnv1a(content))}});
    }
    void write(const fs::path& dir) const {
        json j;
        j["schema"] = "magflow-manifest/1";
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        j["started"] = started;
        j["finished"] = iso_now();
        j["artifacts"] = artifacts;
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << j.dump(2) << '\n';
    }
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

Chart make_chart(const Config& cfg) {
    const std::string name = cfg.str("chart", "halfplane");
    if (name == "halfplane") return half_plane_chart();
    if (name == "tanh") return tanh_revolution_chart();
    if (name == "flat") return flat_cylinder_chart();
    throw ConfigError("config: unknown chart '" + name + "'");
}

BurnsParams burns_params(const Config& cfg) {
    BurnsParams p;
    p.delta = cfg.num("delta", p.delta);
    p.delta1 = cfg.num("delta1", p.delta1);
    p.delta2 = cfg.num("delta2", p.delta2);
    p.delta3 = cfg.num("delta3", p.delta3);
    p.delta4 = cfg.num("delta4", p.delta4);
    p.eps = cfg.num("eps", p.eps);
    p.core_slope = cfg.num("core_slope", p.core_slope);
    p.ramp_width = cfg.num("ramp_width", p.ramp_width);
    p.s_extent = cfg.num("s_extent", p.s_extent);
    return p;
}

const std::vector<std::string> kBurnsKeys = {
    "delta",      "delta1",     "delta2",   "delta3",  "delta4",
    "eps",        "core_slope", "ramp_width", "s_extent"};

std::vector<std::string> with_burns(std::vector<std::string> keys) {
    keys.insert(keys.end(), kBurnsKeys.begin(), kBurnsKeys.end());
    return keys;
}

int write_numeric_failure(const fs::path& dir, const std::string& what) {
    json j;
    j["schema"] = "magflow-diagnostic/1";
    j["error"] = what;
    std::ofstream out(dir / "diagnostic.json", std::ios::binary);
    out << j.dump(2) << '\n';
    std::cerr << "numeric failure: " << what << '\n';
    return kExitNumeric;
}

int run_simulate(const Config& cfg, const CommonOpts& opt, Manifest& man) {
    MagneticSystem sys{make_chart(cfg), MagneticIntensity::constant(
                                            cfg.num("b", 0.5))};
    UnitTangent start{cfg.num("x0", 0.0), cfg.num("y0", 1.0),
                      cfg.num("phi0", 0.0)};
    FlowSettings fs;
    fs.horizon = cfg.num("horizon", 5.0);
    fs.rel_tol = cfg.num("rel_tol", fs.rel_tol);
    fs.abs_tol = cfg.num("abs_tol", fs.abs_tol);
    fs.max_step = cfg.num("max_step", fs.max_step);
    fs.validate();
    const Trajectory traj = integrate(sys, start, fs);
    man.add(fs::path(opt.out_dir) / "trajectory.csv", trajectory_csv(sys, traj));
    std::cout << "simulate: " << traj.size() << " samples over t in [0, "
              << format17(traj.duration()) << "]"
              << (traj.exited_chart ? " (left chart)" : "") << '\n';
    return kExitOk;
}

int run_mls(const Config& cfg, const CommonOpts& opt, Manifest& man) {
    const auto ells = cfg.list("ells", {1.0, 2.0, 3.7});
    const auto bs = cfg.list("bs", {0.0, 0.3, 0.5, 0.9});
    const auto rows = mls_scaling_table(ells, bs);
    man.add(fs::path(opt.out_dir) / "mls.csv", mls_table_csv(rows));
    double worst = 0.0;
    bool all_ok = true;
    for (const auto& r : rows) {
        all_ok = all_ok && r.converged;
        if (r.converged) worst = std::max(worst, r.abs_err);
    }
    std::cout << "mls-scaling: " << rows.size() << " rows, max |err| "
              << format17(worst) << '\n';
    if (!all_ok)
        return write_numeric_failure(opt.out_dir,
                                     "mls-scaling: shooting did not converge");
    return kExitOk;
}

int run_psl(const Config& cfg, const CommonOpts& opt, Manifest& man) {
    const auto n = static_cast<std::uint64_t>(cfg.integer("samples", 100));
    const std::uint64_t seed =
        opt.seed.value_or(static_cast<std::uint64_t>(cfg.integer("seed", 1)));
    const double t_max = cfg.num("t_max", 5.0);
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> ub(-0.99, 0.99), ut(-t_max, t_max);
    double worst = 0.0;
    double worst_b = 0.0, worst_t = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double b = ub(eng);
        const double t = ut(eng);
        const double r = intertwining_residual(b, t);
        if (r > worst) {
            worst = r;
            worst_b = b;
            worst_t = t;
        }
    }
    const Mat2 c0 = conjugacy_matrix(0.0, 0.7);
    json j;
    j["schema"] = "psl-conjugacy/1";
    j["seed"] = seed;
    j["samples"] = n;
    j["t_max"] = t_max;
    j["max_residual"] = worst;
    j["argmax"] = {{"b", worst_b}, {"t", worst_t}};
    j["c0_is_identity"] =
        (c0 - Mat2::identity()).max_norm() == 0.0;
    man.add(fs::path(opt.out_dir) / "psl.json", j.dump(2) + "\n");
    std::cout << "psl-conjugacy: max residual " << format17(worst) << " over "
              << n << " draws\n";
    return kExitOk;
}

int run_burns_build(const Config& cfg, const CommonOpts& opt, Manifest& man) {
    const BurnsParams p = burns_params(cfg);
    std::vector<ValidationClause> clauses;
    bool ok = true;
    try {
        const BurnsSystem sys =
            build_burns_system(make_burns_profile(p), make_burns_bump(p));
        clauses = sys.validation;
    } catch (const BurnsConstructionError& e) {
        ok = false;
        const BurnsProfile pr = make_burns_profile(p);
        clauses = validate_profile(pr);
        try {
            const auto bc = validate_bump(make_burns_bump(p));
            clauses.insert(clauses.end(), bc.begin(), bc.end());
        } catch (const BurnsConstructionError& e2) {
            ValidationClause c;
            c.id = "bump.construction";
            c.pass = false;
            clauses.push_back(c);
        }
        if (!e.failed.empty())
            for (const auto& c : e.failed)
                if (std::none_of(clauses.begin(), clauses.end(),
                                 [&](const ValidationClause& x) {
                                     return x.id == c.id;
                                 }))
                    clauses.push_back(c);
        std::cerr << e.what() << '\n';
    }
    man.add(fs::path(opt.out_dir) / "validation.json", validation_json(clauses));
    for (const auto& c : clauses) ok = ok && c.pass;
    std::cout << "burns-build: " << clauses.size() << " clauses, "
              << (ok ? "all pass" : "FAILED") << '\n';
    return ok ? kExitOk : kExitValidation;
}

CertificateConfig certificate_config(const Config& cfg, const CommonOpts& opt,
                                     const BurnsParams& p) {
    CertificateConfig cc;
    cc.box.p_min = cfg.num("box_s_min", -8.0);
    cc.box.p_max = cfg.num("box_s_max", 8.0);
    cc.box.q_min = cfg.num("box_theta_min", 0.0);
    cc.box.q_max = cfg.num("box_theta_max", kTwoPi);
    cc.box.phi_min = cfg.num("box_phi_min", 0.0);
    cc.box.phi_max = cfg.num("box_phi_max", kTwoPi);
    cc.horizon = cfg.num("T", 8.0);
    cc.bound = cfg.num("H", 3.0);
    cc.samples = static_cast<std::uint64_t>(cfg.integer("n", 10000));
    cc.seed = opt.seed.value_or(
        static_cast<std::uint64_t>(cfg.integer("seed", 1)));
    cc.u0_policy = cfg.list("u0_policy", {0.0, cc.bound});
    cc.flow.rel_tol = cfg.num("rel_tol", 1e-9);
    cc.flow.abs_tol = cfg.num("abs_tol", 1e-9);
    cc.flow.max_step = cfg.num("max_step", 0.05);
    cc.threads = opt.threads.value_or(
        static_cast<int>(cfg.integer("threads", 1)));
    (void)p;
    return cc;
}

int run_cert(const Config& cfg, const CommonOpts& opt, Manifest& man) {
    const BurnsParams p = burns_params(cfg);
    const BurnsSystem burns =
        build_burns_system(make_burns_profile(p), make_burns_bump(p));
    BurnsExperimentConfig ec;
    ec.certificate = certificate_config(cfg, opt, p);
    ec.reversal_checks = static_cast<int>(cfg.integer("reversal_checks", 5));
    ec.band_cap = cfg.num("band_cap", 1.0);
    const BurnsExperimentResult res = burns_certificate_experiment(burns, ec);
    man.add(fs::path(opt.out_dir) / "certificate.json",
            certificate_json(res.report));
    {
        json j;
        j["schema"] = "burns-experiment/1";
        j["max_band_time"] = res.max_band_time;
        j["band_cap"] = res.band_cap;
        j["bplus_flux"] = res.bplus_flux;
        j["doubled_flux"] = res.doubled_flux;
        j["no_radius_display_integral"] = res.no_radius_flux;
        j["max_reversal_mismatch"] = res.max_reversal_mismatch;
        man.add(fs::path(opt.out_dir) / "experiment.json", j.dump(2) + "\n");
    }
    std::cout << "anosov-cert: " << (res.report.pass ? "PASS" : "FAIL") << ", "
              << res.report.violations.size() << " violations over "
              << ec.certificate.samples << " samples; u(T) in ["
              << format17(res.report.min_u_final) << ", "
              << format17(res.report.max_u_final) << "]\n";
    return res.report.pass ? kExitOk : kExitValidation;
}

// Seeded smooth closed perturbations of the invariant-ray orbit, written in
// log-polar coordinates (rho, beta) where the deck map is rho -> rho + ell.
ClosedCurve perturbed_curve(double ell, double b, std::uint64_t seed,
                            std::uint64_t index, double amplitude) {
    const double root = std::sqrt(1.0 - b * b);
    const double rho0 = 0.5 * std::log(b * b + root * root);  // = 0
    const double beta0 = std::atan2(root, b);
    std::mt19937_64 eng(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    constexpr int kModes = 4;
    std::array<double, kModes> ar{}, br{}, ab{}, bb{};
    for (int k = 0; k < kModes; ++k) {
        const double w = amplitude / ((k + 1) * (k + 1));
        ar[k] = w * u(eng);
        br[k] = w * u(eng);
        ab[k] = w * u(eng);
        bb[k] = w * u(eng);
    }
    ClosedCurve c;
    c.winding = 1;
    c.pos = [=](double t) -> Vec2 {
        double rho = rho0 + ell * t, beta = beta0;
        for (int k = 0; k < kModes; ++k) {
            const double w = kTwoPi * (k + 1) * t;
            rho += ar[k] * std::cos(w) + br[k] * std::sin(w);
            beta += ab[k] * std::cos(w) + bb[k] * std::sin(w);
        }
        const double r = std::exp(rho);
        return {r * std::cos(beta), r * std::sin(beta)};
    };
    c.vel = [=](double t) -> Vec2 {
        double rho = rho0 + ell * t, beta = beta0;
        double drho = ell, dbeta = 0.0;
        for (int k = 0; k < kModes; ++k) {
            const double om = kTwoPi * (k + 1);
            const double w = om * t;
            rho += ar[k] * std::cos(w) + br[k] * std::sin(w);
            beta += ab[k] * std::cos(w) + bb[k] * std::sin(w);
            drho += om * (-ar[k] * std::sin(w) + br[k] * std::cos(w));
            dbeta += om * (-ab[k] * std::sin(w) + bb[k] * std::cos(w));
        }
        const double r = std::exp(rho);
        const double cb = std::cos(beta), sb = std::sin(beta);
        return {r * (drho * cb - dbeta * sb), r * (drho * sb + dbeta * cb)};
    };
    return c;
}

int run_magnetic_length(const Config& cfg, const CommonOpts& opt,
                        Manifest& man) {
    const double ell = cfg.num("ell", 2.0);
    const double b = cfg.num("b", 0.5);
    const auto n = static_cast<std::uint64_t>(cfg.integer("perturbations", 200));
    const double amplitude = cfg.num("amplitude", 0.05);
    const std::uint64_t seed =
        opt.seed.value_or(static_cast<std::uint64_t>(cfg.integer("seed", 1)));

    const HyperbolicCylinder cyl(ell);
    const MagneticSystem sys = cyl.system(b);
    const ClosedOrbit ref = find_closed_orbit(cyl, b, 1);
    const ExactPrimitive prim = cylinder_constant_primitive(b);
    const double ref_flux = primitive_line_integral(prim, ref.trajectory);
    const double L_ref = curve_length(
        sys.chart,
        ClosedCurve{[&](double t) -> Vec2 {
                        const UnitTangent s = ref.trajectory.at(t * ref.period);
                        return {s.x, s.y};
                    },
                    [&](double t) -> Vec2 {
                        const auto d =
                            ref.trajectory.derivative_at(t * ref.period);
                        return {ref.period * d[0], ref.period * d[1]};
                    },
                    1});

    std::ostringstream csv;
    csv << "index,length,magnetic_length,excess\n";
    double min_excess = 1e300;
    for (std::uint64_t i = 0; i < n; ++i) {
        const ClosedCurve curve = perturbed_curve(ell, b, seed, i, amplitude);
        const double L = magnetic_length(sys, prim, curve, ref);
        const double len = curve_length(sys.chart, curve);
        const double excess = L - L_ref;
        min_excess = std::min(min_excess, excess);
        csv << i << ',' << format17(len) << ',' << format17(L) << ','
            << format17(excess) << '\n';
    }
    man.add(fs::path(opt.out_dir) / "lengths.csv", csv.str());
    std::cout << "magnetic-length: reference L " << format17(L_ref)
              << " (flux term " << format17(ref_flux) << "), min excess "
              << format17(min_excess) << " over " << n << " perturbations\n";
    return min_excess >= -1e-9 ? kExitOk : kExitValidation;
}

int dispatch(const std::string& sub, const CommonOpts& opt) {
    static const std::map<std::string, std::vector<std::string>> kAllowed = {
        {"simulate",
         {"chart", "b", "x0", "y0", "phi0", "horizon", "rel_tol", "abs_tol",
          "max_step"}},
        {"mls-scaling", {"ells", "bs"}},
        {"psl-conjugacy", {"samples", "seed", "t_max"}},
        {"burns-build", with_burns({})},
        {"anosov-cert",
         with_burns({"box_s_min", "box_s_max", "box_theta_min", "box_theta_max",
                     "box_phi_min", "box_phi_max", "T", "H", "n", "seed",
                     "u0_policy", "rel_tol", "abs_tol", "max_step", "threads",
                     "reversal_checks", "band_cap"})},
        {"magnetic-length",
         {"ell", "b", "perturbations", "amplitude", "seed"}}};

    Config cfg;
    try {
        cfg = parse_config(opt.config_path, kAllowed.at(sub));
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << opt.out_dir << '\n';
        return kExitConfig;
    }

    Manifest man;
    man.config_hash = hex64(fnv1a(cfg.raw));
    man.seed = opt.seed.value_or(
        cfg.has("seed") ? static_cast<std::uint64_t>(cfg.integer("seed", 1)) : 1);
    man.started = iso_now();

    int code = kExitNumeric;
    try {
        if (sub == "simulate")
            code = run_simulate(cfg, opt, man);
        else if (sub == "mls-scaling")
            code = run_mls(cfg, opt, man);
        else if (sub == "psl-conjugacy")
            code = run_psl(cfg, opt, man);
        else if (sub == "burns-build")
            code = run_burns_build(cfg, opt, man);
        else if (sub == "anosov-cert")
            code = run_cert(cfg, opt, man);
        else if (sub == "magnetic-length")
            code = run_magnetic_length(cfg, opt, man);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        return write_numeric_failure(opt.out_dir, e.what());
    }
    man.write(opt.out_dir);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magflow experiment harness"};
    app.require_subcommand(1);

    CommonOpts opt;
    const std::vector<std::string> names = {"simulate",       "mls-scaling",
                                            "psl-conjugacy",  "burns-build",
                                            "anosov-cert",    "magnetic-length"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "config file path")
            ->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_option("--threads", opt.threads, "worker thread count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    return dispatch(app.get_subcommands().front()->get_name(), opt);
}
