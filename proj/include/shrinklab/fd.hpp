// Central finite-difference stencils over Eigen vectors. Values may be
// scalars, vectors or matrices: anything closed under + and scalar *.
#pragma once

#include "spaceform.hpp"

#include <stdexcept>
#include <type_traits>
#include <utility>

namespace shrinklab {

struct FdOptions {
    double step = 1e-4;
    int order = 2; // 2 or 4

    void validate() const {
        if (!(step > 0.0)) throw std::invalid_argument("fd step must be positive");
        if (order != 2 && order != 4) throw std::invalid_argument("fd order must be 2 or 4");
    }
};

namespace fd_detail {

inline Vec shifted(const Vec& x, int i, double d) {
    Vec y = x;
    y(i) += d;
    return y;
}

// Plain value of an arithmetic or Eigen expression; Eigen expressions must
// not outlive the temporaries they reference.
template <class T>
auto materialize(T&& v) {
    if constexpr (std::is_arithmetic_v<std::decay_t<T>>)
        return static_cast<double>(v);
    else
        return v.eval();
}

} // namespace fd_detail

// Stencils are written as sums of symmetric differences so that constants
// differentiate to exactly zero.

/// d/dx_i of f at x.
template <class F>
auto fd_partial(const F& f, const Vec& x, int i, const FdOptions& opt) {
    using fd_detail::materialize;
    using fd_detail::shifted;
    const double h = opt.step;
    auto d1 = materialize(f(shifted(x, i, h)) - f(shifted(x, i, -h)));
    if (opt.order == 2) return materialize((0.5 / h) * d1);
    auto d2 = materialize(f(shifted(x, i, 2.0 * h)) - f(shifted(x, i, -2.0 * h)));
    return materialize((1.0 / (12.0 * h)) * (8.0 * d1 - d2));
}

/// d^2/dx_i dx_j of f at x. Mixed partials nest the first-derivative stencil.
template <class F>
auto fd_second(const F& f, const Vec& x, int i, int j, const FdOptions& opt) {
    using fd_detail::materialize;
    using fd_detail::shifted;
    const double h = opt.step;
    if (i == j) {
        const auto f0 = materialize(f(x));
        auto s1 = materialize((f(shifted(x, i, h)) - f0) + (f(shifted(x, i, -h)) - f0));
        if (opt.order == 2) return materialize((1.0 / (h * h)) * s1);
        auto s2 = materialize((f(shifted(x, i, 2.0 * h)) - f0) + (f(shifted(x, i, -2.0 * h)) - f0));
        return materialize((1.0 / (12.0 * h * h)) * (16.0 * s1 - s2));
    }
    const auto inner = [&](const Vec& y) { return fd_partial(f, y, j, opt); };
    return fd_partial(inner, x, i, opt);
}

/// Coordinate gradient (the differential) of a scalar function.
template <class F>
Vec fd_gradient(const F& f, const Vec& x, const FdOptions& opt) {
    Vec d(x.size());
    for (int i = 0; i < x.size(); ++i) d(i) = fd_partial(f, x, i, opt);
    return d;
}

/// Matrix of coordinate second partials of a scalar function.
template <class F>
Mat fd_hessian(const F& f, const Vec& x, const FdOptions& opt) {
    const int n = static_cast<int>(x.size());
    Mat H(n, n);
    for (int i = 0; i < n; ++i) {
        H(i, i) = fd_second(f, x, i, i, opt);
        for (int j = i + 1; j < n; ++j) H(i, j) = H(j, i) = fd_second(f, x, i, j, opt);
    }
    return H;
}

/// Jacobian of a vector-valued map: column i is d/dx_i.
template <class F>
Mat fd_jacobian(const F& f, const Vec& x, const FdOptions& opt) {
    const Vec y0 = f(x);
    Mat J(y0.size(), x.size());
    for (int i = 0; i < x.size(); ++i) J.col(i) = fd_partial(f, x, i, opt);
    return J;
}

} // namespace shrinklab
