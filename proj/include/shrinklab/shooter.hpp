// Shooting solver for the rotationally symmetric shrinker profile
//   f''/(1+f'^2) - (r/2 - (n-1)/r) f' + f/2 = 0,   f'(0) = 0, f(0) = f0.
//
// The curve (r, f(r)) is integrated by arclength s with tangent angle
// theta = atan f':
//   r' = cos theta,  f' = sin theta,
//   theta' = (r/2 - (n-1)/r) sin theta - (f/2) cos theta,
// which stays regular where the graph becomes vertical (the sphere meets the
// axis at a right angle).
#pragma once

#include "dopri5.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shrinklab {

struct ShrinkerODE {
    int n = 2;

    explicit ShrinkerODE(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("shrinker dimension n must be >= 1");
    }

    using State = Eigen::Vector3d; // (r, f, theta)

    double drift(double r) const { return 0.5 * r - (n - 1) / r; }

    State operator()(double /*s*/, const State& y) const {
        const double c = std::cos(y(2)), s = std::sin(y(2));
        return {c, s, drift(y(0)) * s - 0.5 * y(1) * c};
    }

    /// f'' from the ODE at (r, f, f').
    double second_derivative(double r, double f, double fp) const {
        return (1.0 + fp * fp) * (drift(r) * fp - 0.5 * f);
    }

    double default_r_max() const { return 3.0 * std::sqrt(static_cast<double>(n)); }
};

/// f = sqrt(2n - r^2), the round sphere solution.
inline double sphere_profile(int n, double r) { return std::sqrt(2.0 * n - r * r); }

struct ShootConfig {
    double f0 = 0.1;
    double r0 = 1e-6;
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double r_max = 0.0; // 0 selects 3 sqrt(n)
    long max_steps = 200000;
    // Start from (r0, f0) with f'(r0) = 0 verbatim instead of the series start.
    bool paper_start = false;

    double resolved_r_max(const ShrinkerODE& ode) const { return r_max > 0.0 ? r_max : ode.default_r_max(); }

    void validate(const ShrinkerODE& ode) const {
        if (!std::isfinite(f0) || f0 < 0.0) throw std::invalid_argument("f0 must be finite and >= 0");
        if (!(r0 > 0.0) || !(r0 < 0.1)) throw std::invalid_argument("r0 must lie in (0, 0.1)");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
        if (!(resolved_r_max(ode) > r0)) throw std::invalid_argument("r_max must exceed r0");
        if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
    }
};

struct SeriesStart {
    double f = 0.0;
    double fprime = 0.0;
};

/// Second-order Taylor data at r0: f = f0 (1 - r0^2/(4n)), f' = -f0 r0/(2n).
inline SeriesStart series_start(const ShrinkerODE& ode, double f0, double r0) {
    return {f0 * (1.0 - r0 * r0 / (4.0 * ode.n)), -f0 * r0 / (2.0 * ode.n)};
}

enum class Termination { crossing, horizon, turned_back, step_failure, max_steps };

inline std::string to_string(Termination t) {
    switch (t) {
    case Termination::crossing: return "crossing";
    case Termination::horizon: return "horizon";
    case Termination::turned_back: return "turned_back";
    case Termination::step_failure: return "step_failure";
    case Termination::max_steps: return "max_steps";
    }
    return "unknown";
}

struct ProfileSample {
    double s = 0.0;
    double r = 0.0;
    double f = 0.0;
    double theta = 0.0;
    double fprime() const { return std::tan(theta); }
};

struct ShrinkerProfile {
    int n = 2;
    ShootConfig config;
    std::vector<ProfileSample> samples;    // start point, then every accepted step end with r increasing
    std::vector<DenseStep<3>> steps;       // arclength dense output, including the terminating step
    Termination termination = Termination::horizon;
    long rejected_steps = 0;
};

inline ProfileSample to_sample(double s, const ShrinkerODE::State& y) { return {s, y(0), y(1), y(2)}; }

inline ShrinkerProfile shoot(const ShrinkerODE& ode, const ShootConfig& config) {
    config.validate(ode);
    const double r_max = config.resolved_r_max(ode);

    ShrinkerProfile prof;
    prof.n = ode.n;
    prof.config = config;

    ShrinkerODE::State y0;
    if (config.paper_start) {
        y0 << config.r0, config.f0, 0.0;
    } else {
        const SeriesStart st = series_start(ode, config.f0, config.r0);
        y0 << config.r0, st.f, std::atan(st.fprime);
    }
    prof.samples.push_back(to_sample(0.0, y0));

    Dopri5Options opt;
    opt.rel_tol = config.rel_tol;
    opt.abs_tol = config.abs_tol;
    opt.max_steps = config.max_steps;
    // Generous arclength budget: the graph part is at most a few times r_max long.
    const double s_end = 20.0 * r_max + 10.0;

    bool stopped = false;
    auto observer = [&](const DenseStep<3>& step) {
        prof.steps.push_back(step);
        const ShrinkerODE::State a = step.start(), b = step.end();
        if (a(1) > 0.0 && b(1) <= 0.0) {
            prof.termination = Termination::crossing;
            stopped = true;
            return false;
        }
        if (std::cos(b(2)) <= 0.0 || b(0) <= a(0)) {
            prof.termination = Termination::turned_back;
            stopped = true;
            return false;
        }
        prof.samples.push_back(to_sample(step.t1(), b));
        if (b(0) >= r_max) {
            prof.termination = Termination::horizon;
            stopped = true;
            return false;
        }
        return true;
    };
    const auto res = dopri5_integrate<3>(ode, 0.0, y0, s_end, opt, observer);
    prof.rejected_steps = res.rejected;
    if (!stopped) {
        switch (res.stop) {
        case Dopri5Stop::max_steps: prof.termination = Termination::max_steps; break;
        case Dopri5Stop::reached_end: prof.termination = Termination::horizon; break;
        default: prof.termination = Termination::step_failure; break;
        }
    }
    return prof;
}

enum class InterceptStatus { found, no_crossing, integrator_failure };

inline std::string to_string(InterceptStatus s) {
    switch (s) {
    case InterceptStatus::found: return "found";
    case InterceptStatus::no_crossing: return "no-crossing";
    case InterceptStatus::integrator_failure: return "integrator-failure";
    }
    return "unknown";
}

struct InterceptResult {
    std::optional<double> r_alpha;
    double bracket_lo = 0.0; // r at the last positive height
    double bracket_hi = 0.0; // r at the first non-positive height
    double f_at_root = 0.0;
    int iterations = 0;
    InterceptStatus status = InterceptStatus::no_crossing;
};

/// Bisection in arclength on the dense output of the terminating step.
inline InterceptResult find_intercept(const ShrinkerProfile& prof, double abs_tol = 1e-10) {
    InterceptResult out;
    if (prof.termination == Termination::step_failure || prof.termination == Termination::max_steps) {
        out.status = InterceptStatus::integrator_failure;
        return out;
    }
    if (prof.termination != Termination::crossing || prof.steps.empty()) {
        out.status = InterceptStatus::no_crossing;
        return out;
    }
    const DenseStep<3>& step = prof.steps.back();
    double lo = step.t0, hi = step.t1();
    double f_lo = step.start()(1), f_hi = step.end()(1);
    double best = f_hi <= 0.0 && std::abs(f_hi) < f_lo ? hi : lo;
    double best_f = std::min(std::abs(f_lo), std::abs(f_hi));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = step(mid)(1);
        ++out.iterations;
        if (std::abs(fm) < best_f) {
            best_f = std::abs(fm);
            best = mid;
        }
        if (fm > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
        if (best_f <= abs_tol && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi)) break;
    }
    out.bracket_lo = step(lo)(0);
    out.bracket_hi = step(hi)(0);
    out.f_at_root = step(best)(1);
    if (std::abs(out.f_at_root) > abs_tol) {
        out.status = InterceptStatus::integrator_failure;
        return out;
    }
    out.r_alpha = step(best)(0);
    out.status = InterceptStatus::found;
    return out;
}

/// Smallest sampled height strictly before r_limit.
inline double min_height_before(const ShrinkerProfile& prof, double r_limit) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : prof.samples)
        if (p.r < r_limit) m = std::min(m, p.f);
    return m;
}

/// max |f''/(1+f'^2) - (r/2 - (n-1)/r) f' + f/2| over the samples, with f''
/// rebuilt from the arclength system: f'' = theta_s / cos^3 theta.
inline double ode_residual(const ShrinkerODE& ode, const ShrinkerProfile& prof) {
    double worst = 0.0;
    for (const auto& p : prof.samples) {
        const ShrinkerODE::State y(p.r, p.f, p.theta);
        const double theta_s = ode(p.s, y)(2);
        const double c = std::cos(p.theta);
        const double fp = std::tan(p.theta);
        const double fpp = theta_s / (c * c * c);
        const double res = fpp / (1.0 + fp * fp) - ode.drift(p.r) * fp + 0.5 * p.f;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

/// |u[(n/r - r/2) u' + u/2] - r^2 (4n - r^2)/2| for u = 4n - r^2 at radius r.
inline double radial_identity_residual(int n, double r) {
    const double u = 4.0 * n - r * r;
    const double du = -2.0 * r;
    const double lhs = u * ((n / r - 0.5 * r) * du + 0.5 * u);
    const double rhs = 0.5 * r * r * (4.0 * n - r * r);
    return std::abs(lhs - rhs);
}

inline double radial_identity_check(int n, const ShrinkerProfile& prof) {
    double worst = 0.0;
    for (const auto& p : prof.samples) worst = std::max(worst, radial_identity_residual(n, p.r));
    return worst;
}

struct SweepRow {
    double f0 = 0.0;
    std::optional<double> r_alpha;
    InterceptStatus status = InterceptStatus::no_crossing;
    double min_height = 0.0; // min f over samples before r_alpha
};

struct SweepResult {
    int n = 2;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    std::vector<SweepRow> rows;
    bool increasing = false;                   // r_alpha strictly increases as f0 decreases
    std::optional<double> extrapolated_limit;  // f0 -> 0 limit from the last three rows
};

/// Value at x = 0 of the polynomial through (x_i, y_i) (Neville).
inline double neville_at_zero(std::vector<double> x, std::vector<double> y) {
    const std::size_t m = x.size();
    for (std::size_t k = 1; k < m; ++k)
        for (std::size_t i = 0; i + k < m; ++i)
            y[i] = (x[i + k] * y[i] - x[i] * y[i + 1]) / (x[i + k] - x[i]);
    return y[0];
}

/// One shoot + intercept per f0. The ODE is odd in f, so r_alpha is even in
/// f0 and the limit is extrapolated in f0^2.
inline SweepResult sweep(const ShrinkerODE& ode, const std::vector<double>& f0s, const ShootConfig& tmpl,
                         double intercept_tol = 1e-10) {
    for (std::size_t i = 0; i < f0s.size(); ++i) {
        if (!(f0s[i] > 0.0)) throw std::invalid_argument("sweep f0 values must be positive");
        if (i > 0 && !(f0s[i] < f0s[i - 1])) throw std::invalid_argument("sweep f0 values must be descending");
    }
    SweepResult out;
    out.n = ode.n;
    out.rel_tol = tmpl.rel_tol;
    out.abs_tol = tmpl.abs_tol;
    for (double f0 : f0s) {
        ShootConfig cfg = tmpl;
        cfg.f0 = f0;
        SweepRow row;
        row.f0 = f0;
        try {
            const ShrinkerProfile prof = shoot(ode, cfg);
            const InterceptResult ir = find_intercept(prof, intercept_tol);
            row.status = ir.status;
            row.r_alpha = ir.r_alpha;
            if (ir.r_alpha) row.min_height = min_height_before(prof, *ir.r_alpha - intercept_tol);
        } catch (const std::exception&) {
            row.status = InterceptStatus::integrator_failure;
        }
        out.rows.push_back(row);
    }

    out.increasing = !out.rows.empty();
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        if (!out.rows[i].r_alpha) {
            out.increasing = false;
            break;
        }
        if (i > 0 && !(*out.rows[i].r_alpha > *out.rows[i - 1].r_alpha)) out.increasing = false;
    }

    std::vector<double> xs, ys;
    for (const auto& row : out.rows)
        if (row.r_alpha) {
            xs.push_back(row.f0 * row.f0);
            ys.push_back(*row.r_alpha);
        }
    if (xs.size() >= 3) {
        xs.erase(xs.begin(), xs.end() - 3);
        ys.erase(ys.begin(), ys.end() - 3);
        out.extrapolated_limit = neville_at_zero(xs, ys);
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Profile CSV `r,f,fprime`; `mirrored` prepends the reflected branch r < 0.
inline void write_profile_csv(std::ostream& os, const ShrinkerProfile& prof, bool mirrored = false) {
    os << "r,f,fprime\n";
    if (mirrored)
        for (auto it = prof.samples.rbegin(); it != prof.samples.rend(); ++it)
            os << format_double(-it->r) << ',' << format_double(it->f) << ',' << format_double(-it->fprime())
               << '\n';
    for (const auto& p : prof.samples)
        os << format_double(p.r) << ',' << format_double(p.f) << ',' << format_double(p.fprime()) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
    os << "f0,r_alpha,status\n";
    for (const auto& row : sw.rows)
        os << format_double(row.f0) << ',' << (row.r_alpha ? format_double(*row.r_alpha) : std::string()) << ','
           << to_string(row.status) << '\n';
}

} // namespace shrinklab
