// Named residual checks and their JSON form.
#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace shrinklab {

/// Outcome of one identity check. `pass` is always `residual <= tol`.
/// A negative control is a run that is supposed to fail; it is healthy
/// when pass is false.
struct VerificationReport {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    int samples = 0;
    bool pass = false;
    std::string notes;
    bool negative_control = false;

    bool as_expected() const { return pass != negative_control; }
};

inline VerificationReport make_report(std::string name, double residual, double tol, int samples,
                                      std::string notes = {}) {
    VerificationReport r;
    r.name = std::move(name);
    r.residual = residual;
    r.tol = tol;
    r.samples = samples;
    r.pass = std::isfinite(residual) && residual <= tol;
    r.notes = std::move(notes);
    return r;
}

/// Report for a strict inequality `min_value > 0`. The residual is the
/// shortfall below zero; an exact zero counts as the smallest positive
/// shortfall so that it fails against a zero tolerance.
inline VerificationReport strict_positivity_report(std::string name, double min_value, int samples,
                                                   std::string notes = {}) {
    double shortfall = 0.0;
    if (!(min_value > 0.0)) shortfall = std::max(-min_value, std::numeric_limits<double>::denorm_min());
    return make_report(std::move(name), shortfall, 0.0, samples, std::move(notes));
}

inline VerificationReport as_negative_control(VerificationReport r) {
    r.negative_control = true;
    r.notes += r.notes.empty() ? "negative control: expected to fail" : "; negative control: expected to fail";
    return r;
}

inline void to_json(nlohmann::json& j, const VerificationReport& r) {
    // non-finite residuals are not representable in JSON numbers
    j = nlohmann::json{{"name", r.name},
                       {"residual", std::isfinite(r.residual) ? nlohmann::json(r.residual) : nlohmann::json(nullptr)},
                       {"tol", r.tol},
                       {"samples", r.samples},
                       {"pass", r.pass},
                       {"notes", r.notes},
                       {"negative_control", r.negative_control}};
}

inline bool all_as_expected(const std::vector<VerificationReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.as_expected(); });
}

/// ||a - b||_inf / max(||b||_inf, 1): relative for large values, absolute near zero.
template <class A, class B>
double mixed_relative_error(const A& a, const B& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1.0);
}

inline double mixed_relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

/// Least-squares slope of log(residual) against log(step).
inline double loglog_slope(const std::vector<double>& steps, const std::vector<double>& residuals) {
    const std::size_t m = steps.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = std::log(steps[i]), ly = std::log(residuals[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Six significant digits, for names and notes.
inline std::string format_short(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace shrinklab
