// Drivers behind the command-line tool: shooting runs, f0 sweeps and the
// identity-verification battery. Everything here is independent of the
// argument parser so it can be exercised from tests.
#pragma once

#include "conformal_identities.hpp"
#include "deformation.hpp"
#include "shooter.hpp"
#include "space_form_identities.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace shrinklab::cli {

inline constexpr const char* version = "0.1.0";

inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;
inline constexpr int exit_integrator = 2;
inline constexpr int exit_usage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& verify_set_members() {
    static const std::vector<std::string> m{"lemma2_2", "eq14",    "appendixD",    "lemma6_1",   "gaussian6_2",
                                            "bochner",  "radial5_1", "deformationA", "gaussian5_3"};
    return m;
}

struct RunConfig {
    std::string command;
    int n = 2;
    double f0 = 0.1;
    std::vector<double> f0_grid{1e-1, 1e-2, 1e-3, 1e-4};
    double r0 = 1e-6;
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double intercept_tol = 1e-10;
    double r_max = 0.0; // 0 selects 3 sqrt(n)
    bool paper_start = false;
    bool mirror = false;
    std::string out_dir = ".";
    std::uint64_t seed = default_seed;
    std::vector<std::string> verify_set;
    std::optional<int> kappa;
    std::string r_squared = "4n";
    double radius = 1.0;  // geodesic ball radius for the kappa-dependent batteries
    double s = 0.05;      // deformation parameter

    ShootConfig shoot_config() const {
        ShootConfig c;
        c.f0 = f0;
        c.r0 = r0;
        c.rel_tol = rel_tol;
        c.abs_tol = abs_tol;
        c.r_max = r_max;
        c.paper_start = paper_start;
        return c;
    }

    std::vector<Curvature> kappas() const {
        if (kappa) return {curvature_from_int(*kappa)};
        return {Curvature::hyperbolic, Curvature::flat, Curvature::spherical};
    }
};

/// "4n", "3n", "2.5n" (multiples of n) or a plain number.
inline double parse_r_squared(const std::string& text, int n) {
    if (text.empty()) throw UsageError("empty --R-squared");
    std::string num = text;
    double mult = 1.0;
    if (num.back() == 'n') {
        num.pop_back();
        mult = n;
        if (num.empty()) num = "1";
    }
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(num, &used);
    } catch (const std::exception&) {
        throw UsageError("bad --R-squared value '" + text + "'");
    }
    if (used != num.size() || !(v > 0.0)) throw UsageError("bad --R-squared value '" + text + "'");
    return v * mult;
}

inline void validate(const RunConfig& c) {
    if (c.n < 1) throw UsageError("--n must be >= 1");
    if (c.kappa && (*c.kappa < -1 || *c.kappa > 1)) throw UsageError("--kappa must be -1, 0 or 1");
    if (c.command == "verify") {
        if (c.verify_set.empty()) throw UsageError("verify needs a nonempty --set");
        const auto& known = verify_set_members();
        for (const auto& m : c.verify_set)
            if (std::find(known.begin(), known.end(), m) == known.end())
                throw UsageError("unknown verify-set member '" + m + "'");
        parse_r_squared(c.r_squared, c.n);
    }
    if (c.command == "sweep") {
        if (c.f0_grid.empty()) throw UsageError("--f0-grid must be nonempty");
        for (std::size_t i = 0; i < c.f0_grid.size(); ++i) {
            if (!(c.f0_grid[i] > 0.0)) throw UsageError("--f0-grid values must be positive");
            if (i > 0 && !(c.f0_grid[i] < c.f0_grid[i - 1])) throw UsageError("--f0-grid must be descending");
        }
    }
    try {
        ShrinkerODE ode(c.n);
        ShootConfig sc = c.shoot_config();
        if (c.command == "sweep") sc.f0 = c.f0_grid.front();
        sc.validate(ode);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

inline nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json config_echo(const RunConfig& c) {
    nlohmann::json j{{"command", c.command},   {"n", c.n},
                     {"r0", c.r0},             {"rel_tol", c.rel_tol},
                     {"abs_tol", c.abs_tol},   {"intercept_tol", c.intercept_tol},
                     {"r_max", c.r_max > 0.0 ? c.r_max : ShrinkerODE(c.n).default_r_max()},
                     {"paper_start", c.paper_start}, {"seed", c.seed}};
    if (c.command == "shoot") j["f0"] = c.f0;
    if (c.command == "sweep") j["f0_grid"] = c.f0_grid;
    if (c.command == "verify") {
        j["f0"] = c.f0;
        j["verify_set"] = c.verify_set;
        j["kappa"] = c.kappa ? nlohmann::json(*c.kappa) : nlohmann::json("all");
        j["R_squared"] = c.r_squared;
        j["radius"] = c.radius;
        j["s"] = c.s;
    }
    return j;
}

inline void write_file(const RunConfig& c, const std::string& name, const std::string& content) {
    const std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << content;
}

// ---------------------------------------------------------------------------
// shoot

struct ShootOutcome {
    ShrinkerProfile profile;
    InterceptResult intercept;
    double ode_residual_max = 0.0;
};

inline ShootOutcome shoot_once(const RunConfig& c) {
    const ShrinkerODE ode(c.n);
    ShootOutcome o{shoot(ode, c.shoot_config()), {}, 0.0};
    o.intercept = find_intercept(o.profile, c.intercept_tol);
    o.ode_residual_max = ode_residual(ode, o.profile);
    return o;
}

inline nlohmann::json shoot_summary(const RunConfig& c, const ShootOutcome& o) {
    return {{"n", c.n},
            {"f0", c.f0},
            {"r_alpha", optional_number(o.intercept.r_alpha)},
            {"status", to_string(o.intercept.status)},
            {"ode_residual_max", o.ode_residual_max},
            {"termination", to_string(o.profile.termination)},
            {"bracket", {o.intercept.bracket_lo, o.intercept.bracket_hi}},
            {"bisection_iterations", o.intercept.iterations},
            {"samples", o.profile.samples.size()},
            {"config", config_echo(c)}};
}

inline int run_shoot(const RunConfig& c, std::ostream& log = std::cout) {
    validate(c);
    const ShootOutcome o = shoot_once(c);
    std::ostringstream csv;
    write_profile_csv(csv, o.profile, c.mirror);
    write_file(c, "profile.csv", csv.str());
    const nlohmann::json summary = shoot_summary(c, o);
    write_file(c, "summary.json", summary.dump(2) + "\n");
    log << summary.dump() << "\n";
    return o.intercept.status == InterceptStatus::integrator_failure ? exit_integrator : exit_ok;
}

// ---------------------------------------------------------------------------
// sweep

inline nlohmann::json sweep_trend(const RunConfig& c, const SweepResult& sw) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : sw.rows)
        rows.push_back({{"f0", r.f0},
                        {"r_alpha", optional_number(r.r_alpha)},
                        {"status", to_string(r.status)},
                        {"min_height_before_intercept", r.r_alpha ? nlohmann::json(r.min_height) : nlohmann::json(nullptr)}});
    const double conj = 2.0 * std::sqrt(static_cast<double>(c.n));
    nlohmann::json j{{"n", sw.n},
                     {"rel_tol", sw.rel_tol},
                     {"abs_tol", sw.abs_tol},
                     {"rows", rows},
                     {"increasing", sw.increasing},
                     {"extrapolated_limit", optional_number(sw.extrapolated_limit)},
                     {"extrapolation", "quadratic in f0^2 through the last three found rows"},
                     {"two_sqrt_n", conj},
                     {"gap_to_two_sqrt_n", sw.extrapolated_limit ? nlohmann::json(*sw.extrapolated_limit - conj)
                                                                 : nlohmann::json(nullptr)},
                     {"config", config_echo(c)}};
    return j;
}

inline int run_sweep(const RunConfig& c, std::ostream& log = std::cout) {
    validate(c);
    const SweepResult sw = sweep(ShrinkerODE(c.n), c.f0_grid, c.shoot_config(), c.intercept_tol);
    std::ostringstream csv;
    write_sweep_csv(csv, sw);
    write_file(c, "sweep.csv", csv.str());
    const nlohmann::json trend = sweep_trend(c, sw);
    write_file(c, "trend.json", trend.dump(2) + "\n");
    log << trend.dump() << "\n";
    const bool failed = std::any_of(sw.rows.begin(), sw.rows.end(),
                                    [](const SweepRow& r) { return r.status == InterceptStatus::integrator_failure; });
    return failed ? exit_integrator : exit_ok;
}

// ---------------------------------------------------------------------------
// verify

using Reports = std::vector<VerificationReport>;

inline void append(Reports& out, const Reports& more) { out.insert(out.end(), more.begin(), more.end()); }

inline Reports verify_radial_identity(const RunConfig& c) {
    const ShrinkerODE ode(c.n);
    ShootConfig sc = c.shoot_config();
    const ShrinkerProfile prof = shoot(ode, sc);
    const double along = radial_identity_check(c.n, prof);
    const double rs = std::sqrt(2.0 * c.n), rc = 2.0 * std::sqrt(static_cast<double>(c.n));
    // at the sphere radius both sides equal 2n^2; at 2 sqrt(n) both vanish
    const double u_s = 4.0 * c.n - rs * rs;
    const double lhs_s = u_s * ((c.n / rs - 0.5 * rs) * (-2.0 * rs) + 0.5 * u_s);
    const double spot = std::max({std::abs(lhs_s - 2.0 * c.n * c.n), radial_identity_residual(c.n, rs),
                                  radial_identity_residual(c.n, rc)});
    const std::string notes =
        "n=" + std::to_string(c.n) + " f0=" + format_short(c.f0) +
        "; u = 4n - r^2, identity u[(n/r - r/2)u' + u/2] = r^2(4n - r^2)/2; the stability-operator form "
        "u L u also carries |A|^2 u^2, which is not part of this algebraic check";
    return {make_report("radial_identity.profile_samples", along, 1e-12, static_cast<int>(prof.samples.size()), notes),
            make_report("radial_identity.spot_values", spot, 1e-12, 3,
                        "r = sqrt(2n): both sides 2n^2; r = 2 sqrt(n): both sides 0")};
}

inline Reports verify_deformation_battery(const RunConfig& c) {
    Reports out;
    for (Curvature k : c.kappas()) {
        const DiskDeformation d = DiskDeformation::from_radius(k, c.radius, c.s);
        const double Rbar = d.model_radius;
        out.push_back(verify_inverse_law(3, Rbar, 100, 1e-10, c.seed));
        append(out, verify_pullback_factor(3, Rbar, 100, 1e-6, 1e-8, c.seed));
        const DiskGrid grid = make_disk_grid(3, Rbar);
        std::vector<Vec> pts;
        for (const auto& u : grid.interior) pts.push_back(disk_point(u));
        append(out, verify_slope_law(k, Rbar, pts));
        if (k != Curvature::hyperbolic) {
            // the quoted coefficient is exact at x = 0 when Rbar = 1
            append(out, verify_slope_law(k, 1.0, {Vec::Zero(3)}, {}, true));
        }
        const bool quoted_differs = std::any_of(pts.begin(), pts.end(), [&](const Vec& x) {
            return std::abs(Rbar * Rbar * (1.0 + kappa_value(k) * x.squaredNorm()) - 1.0) > 1e-3;
        });
        if (quoted_differs)
            for (auto& r : verify_slope_law(k, Rbar, pts, {}, true)) {
                r.name += ".grid";
                out.push_back(as_negative_control(r));
            }
        append(out, verify_deformation(k, c.radius, c.s));
        for (auto r : verify_deformation(k, c.radius, 0.0)) {
            const bool boundary_case = r.name.starts_with("deformation.one_sided") ||
                                       r.name.starts_with("deformation.mean_convex[");
            out.push_back(boundary_case ? as_negative_control(r) : r);
        }
    }
    return out;
}

inline Reports run_verify_set(const RunConfig& c, const std::string& member) {
    Reports out;
    if (member == "lemma2_2") {
        for (Curvature k : c.kappas()) append(out, verify_test_function(k, 3, 100, 1e-6, {1e-4, 4}, c.seed));
    } else if (member == "eq14") {
        for (Curvature k : c.kappas())
            out.push_back(verify_totally_geodesic_laplacian(k, 3, 100, 1e-6, {1e-3, 4}, c.seed));
    } else if (member == "appendixD") {
        ConformalLawOptions o;
        o.seed = c.seed;
        append(out, verify_conformal_laws(o));
    } else if (member == "lemma6_1") {
        for (Curvature k : c.kappas()) {
            HalfSpaceConformalOptions o;
            o.radius = c.radius;
            o.seed = c.seed;
            append(out, verify_half_space_conformal(k, o));
        }
    } else if (member == "gaussian6_2") {
        const double R2 = parse_r_squared(c.r_squared, c.n);
        GaussianBallOptions o;
        o.seed = c.seed;
        Reports rs = verify_gaussian_conformal(std::sqrt(R2), c.n, o);
        if (R2 < 4.0 * c.n) rs.back() = as_negative_control(rs.back());
        append(out, rs);
    } else if (member == "bochner") {
        BochnerOptions o;
        o.seed = c.seed;
        append(out, verify_bochner(o));
    } else if (member == "radial5_1") {
        append(out, verify_radial_identity(c));
    } else if (member == "deformationA") {
        append(out, verify_deformation_battery(c));
    } else if (member == "gaussian5_3") {
        append(out, verify_offset_hyperplanes(c.n, 100, 1e-8, c.seed));
    } else {
        throw UsageError("unknown verify-set member '" + member + "'");
    }
    return out;
}

inline nlohmann::json verify_document(const RunConfig& c, const Reports& reports) {
    return {{"version", version},
            {"config", config_echo(c)},
            {"reports", reports},
            {"pass", all_as_expected(reports)}};
}

inline int run_verify(const RunConfig& c, std::ostream& log = std::cout) {
    validate(c);
    Reports reports;
    for (const auto& m : c.verify_set) append(reports, run_verify_set(c, m));
    for (const auto& r : reports)
        log << (r.as_expected() ? "ok   " : "FAIL ") << r.name << " residual=" << format_short(r.residual)
            << " tol=" << format_short(r.tol) << (r.negative_control ? " (negative control)" : "") << "\n";
    const nlohmann::json doc = verify_document(c, reports);
    write_file(c, "verify.json", doc.dump(2) + "\n");
    return doc["pass"].get<bool>() ? exit_ok : exit_failed;
}

inline int run(const RunConfig& c, std::ostream& log = std::cout) {
    if (c.command == "shoot") return run_shoot(c, log);
    if (c.command == "sweep") return run_sweep(c, log);
    if (c.command == "verify") return run_verify(c, log);
    throw UsageError("unknown command '" + c.command + "'");
}

} // namespace shrinklab::cli
