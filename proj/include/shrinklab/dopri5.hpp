// Dormand-Prince 5(4) with Hairer's continuous extension of order 4.
// Every accepted step keeps its interpolation coefficients so callers can
// root-find on the dense output after the fact.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace shrinklab {

template <int N>
struct DenseStep {
    using State = Eigen::Matrix<double, N, 1>;
    double t0 = 0.0;
    double h = 0.0;
    std::array<State, 5> rcont{};

    double t1() const { return t0 + h; }
    State start() const { return rcont[0]; }
    State end() const { return rcont[0] + rcont[1]; }

    State operator()(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return rcont[0] + th * (rcont[1] + th1 * (rcont[2] + th * (rcont[3] + th1 * rcont[4])));
    }
};

struct Dopri5Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 200000;
};

enum class Dopri5Stop { reached_end, observer, step_underflow, max_steps, non_finite };

template <int N>
struct Dopri5Result {
    Dopri5Stop stop = Dopri5Stop::reached_end;
    double t = 0.0;
    Eigen::Matrix<double, N, 1> y;
    long accepted = 0;
    long rejected = 0;
};

namespace dopri5_tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace dopri5_tableau

/// Integrates y' = rhs(t, y) from t0 towards t_end. After each accepted step
/// `observer(step)` is called; returning false stops the integration.
template <int N, class Rhs, class Observer>
Dopri5Result<N> dopri5_integrate(const Rhs& rhs, double t0, const Eigen::Matrix<double, N, 1>& y0, double t_end,
                                 const Dopri5Options& opt, Observer&& observer) {
    using State = Eigen::Matrix<double, N, 1>;
    using namespace dopri5_tableau;
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol >= 0.0)) throw std::invalid_argument("dopri5: bad tolerances");
    if (!(t_end > t0)) throw std::invalid_argument("dopri5: t_end must exceed t0");

    const auto err_norm = [&](const State& e, const State& ya, const State& yb) {
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sk = opt.abs_tol + opt.rel_tol * std::max(std::abs(ya(i)), std::abs(yb(i)));
            s += (e(i) / sk) * (e(i) / sk);
        }
        return std::sqrt(s / N);
    };

    Dopri5Result<N> res;
    double t = t0;
    State y = y0;
    State k1 = rhs(t, y);

    // Initial step guess.
    double h;
    {
        State sk;
        for (int i = 0; i < N; ++i) sk(i) = opt.abs_tol + opt.rel_tol * std::abs(y(i));
        const double dnf = std::sqrt((k1.array() / sk.array()).square().sum() / N);
        const double dny = std::sqrt((y.array() / sk.array()).square().sum() / N);
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
        h = std::min({h, opt.h_max, t_end - t});
        const State k2 = rhs(t + h, (y + h * k1).eval());
        const double der2 = std::sqrt(((k2 - k1).array() / sk.array()).square().sum() / N) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, opt.h_max, t_end - t});
    }

    constexpr double safe = 0.9, fac_lo = 0.2, fac_hi = 10.0, beta = 0.04;
    const double expo = 0.2 - beta * 0.75;
    double facold = 1e-4;
    bool last_rejected = false;

    while (true) {
        if (res.accepted + res.rejected >= opt.max_steps) {
            res.stop = Dopri5Stop::max_steps;
            break;
        }
        if (h < 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            res.stop = Dopri5Stop::step_underflow;
            break;
        }
        const State k2 = rhs(t + c2 * h, (y + h * a21 * k1).eval());
        const State k3 = rhs(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
        const State k4 = rhs(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        const State k5 = rhs(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        const State k6 = rhs(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        const State y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const State k7 = rhs(t + h, y1);
        const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = err_norm(e, y, y1);

        if (!std::isfinite(err) || !y1.allFinite()) {
            if (h < 1e-300) {
                res.stop = Dopri5Stop::non_finite;
                break;
            }
            h *= 0.1;
            ++res.rejected;
            last_rejected = true;
            continue;
        }

        const double fac11 = std::pow(err, expo);
        if (err <= 1.0) {
            DenseStep<N> step;
            step.t0 = t;
            step.h = h;
            const State dy = y1 - y;
            step.rcont[0] = y;
            step.rcont[1] = dy;
            step.rcont[2] = h * k1 - dy;
            step.rcont[3] = dy - h * k7 - step.rcont[2];
            step.rcont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

            const double fac = std::clamp(fac11 / std::pow(facold, beta) / safe, 1.0 / fac_hi, 1.0 / fac_lo);
            facold = std::max(err, 1e-4);
            ++res.accepted;
            t += h;
            y = y1;
            k1 = k7;
            if (!observer(step)) {
                res.stop = Dopri5Stop::observer;
                break;
            }
            if (t >= t_end) {
                res.stop = Dopri5Stop::reached_end;
                break;
            }
            double hnew = std::min(h / fac, opt.h_max);
            if (last_rejected) hnew = std::min(hnew, h);
            last_rejected = false;
            h = std::min(hnew, t_end - t);
        } else {
            h /= std::min(1.0 / fac_lo, fac11 / safe);
            ++res.rejected;
            last_rejected = true;
        }
    }
    res.t = t;
    res.y = y;
    return res;
}

} // namespace shrinklab
