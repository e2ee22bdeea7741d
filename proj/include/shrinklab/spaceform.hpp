// Closed-form geometry of the three simply connected space forms in the
// conformal ball model g = 4/(1 + k|x|^2)^2 * delta.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace shrinklab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Curvature : int { hyperbolic = -1, flat = 0, spherical = 1 };

constexpr double kappa_value(Curvature c) noexcept { return static_cast<double>(static_cast<int>(c)); }

inline Curvature curvature_from_int(int k) {
    switch (k) {
    case -1: return Curvature::hyperbolic;
    case 0: return Curvature::flat;
    case 1: return Curvature::spherical;
    default: throw std::invalid_argument("curvature class must be -1, 0 or 1, got " + std::to_string(k));
    }
}

inline std::string to_string(Curvature c) {
    switch (c) {
    case Curvature::hyperbolic: return "hyperbolic";
    case Curvature::flat: return "flat";
    case Curvature::spherical: return "spherical";
    }
    return "unknown";
}

enum class TrigFn { sn, cs, tn, ct };

/// sn solves sn'' = -k sn with sn(0) = 0, sn'(0) = 1; cs = sn', tn = sn/cs, ct = 1/tn.
inline double sn(Curvature k, double r) {
    switch (k) {
    case Curvature::hyperbolic: return std::sinh(r);
    case Curvature::flat: return r;
    case Curvature::spherical: return std::sin(r);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double cs(Curvature k, double r) {
    switch (k) {
    case Curvature::hyperbolic: return std::cosh(r);
    case Curvature::flat: return 1.0;
    case Curvature::spherical: return std::cos(r);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double tn(Curvature k, double r) {
    const double c = cs(k, r);
    if (c == 0.0) throw std::domain_error("tn: cs(r) vanishes");
    return sn(k, r) / c;
}

inline double ct(Curvature k, double r) {
    const double s = sn(k, r);
    if (s == 0.0) throw std::domain_error("ct: sn(r) vanishes");
    return cs(k, r) / s;
}

inline double trig(Curvature k, TrigFn which, double r) {
    switch (which) {
    case TrigFn::sn: return sn(k, r);
    case TrigFn::cs: return cs(k, r);
    case TrigFn::tn: return tn(k, r);
    case TrigFn::ct: return ct(k, r);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Inverse of sn on [0, diam/2]; the spherical branch takes values in [0, pi/2].
inline double asn(Curvature k, double s) {
    switch (k) {
    case Curvature::hyperbolic: return std::asinh(s);
    case Curvature::flat: return s;
    case Curvature::spherical: return std::asin(std::clamp(s, -1.0, 1.0));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Inverse of tn on the half-range used by the model radius R = 2 atn(|x|).
inline double atn(Curvature k, double t) {
    switch (k) {
    case Curvature::hyperbolic:
        if (std::abs(t) >= 1.0) throw std::domain_error("atn: |t| >= 1 has no hyperbolic preimage");
        return std::atanh(t);
    case Curvature::flat: return t;
    case Curvature::spherical: return std::atan(t);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Ball model of a space form of curvature kappa and dimension n+1.
struct SpaceFormChart {
    Curvature kappa = Curvature::flat;
    int dim = 3;

    SpaceFormChart() = default;
    SpaceFormChart(Curvature k, int d) : kappa(k), dim(d) {
        if (d < 1) throw std::invalid_argument("SpaceFormChart: dimension must be positive");
    }

    /// Supremum of |x| over the chart domain.
    double domain_radius() const noexcept {
        return kappa == Curvature::hyperbolic ? 1.0 : std::numeric_limits<double>::infinity();
    }

    bool contains(const Vec& x) const noexcept {
        return x.size() == dim && x.norm() < domain_radius();
    }

    void require_inside(const Vec& x) const {
        if (x.size() != dim) throw std::invalid_argument("point has wrong dimension");
        if (!(x.norm() < domain_radius())) throw std::domain_error("point outside chart domain");
    }

    /// e^{phi} with g = e^{2 phi} delta.
    double conformal_factor(const Vec& x) const {
        return 2.0 / (1.0 + kappa_value(kappa) * x.squaredNorm());
    }

    Mat metric(const Vec& x) const {
        const double a = conformal_factor(x);
        return a * a * Mat::Identity(dim, dim);
    }

    /// Isometric image in the standard quadric of R^{n+2}: the unit sphere
    /// (k = 1), the hyperboloid X_{n+1}^2 - |X|^2 = 1 (k = -1), or the
    /// tangent plane scaled by 2 (k = 0). Last component is cs of the
    /// distance to the origin.
    Vec to_quadric(const Vec& x) const {
        const double k = kappa_value(kappa);
        const double q = x.squaredNorm();
        const double d = 1.0 + k * q;
        Vec X(dim + 1);
        X.head(dim) = 2.0 * x / d;
        X(dim) = (1.0 - k * q) / d;
        return X;
    }
};

/// Geodesic distance from the origin of the chart.
inline double distance_to_center(const SpaceFormChart& chart, const Vec& x) {
    chart.require_inside(x);
    const double t = x.norm();
    switch (chart.kappa) {
    case Curvature::hyperbolic: return 2.0 * std::atanh(t);
    case Curvature::flat: return 2.0 * t;
    case Curvature::spherical: return 2.0 * std::atan(t);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Distance to the totally geodesic hyperplane {x_0 = 0}. In the quadric
/// the hyperplane is cut out by X_0 = 0 and sn(rho) = |X_0| there.
inline double distance_to_hyperplane(const SpaceFormChart& chart, const Vec& x) {
    chart.require_inside(x);
    const Vec X = chart.to_quadric(x);
    return asn(chart.kappa, std::abs(X(0)));
}

/// Geodesic distance between two chart points via the ambient quadric.
inline double distance_between(const SpaceFormChart& chart, const Vec& x, const Vec& y) {
    chart.require_inside(x);
    chart.require_inside(y);
    const Vec X = chart.to_quadric(x);
    const Vec Y = chart.to_quadric(y);
    const int n = chart.dim;
    switch (chart.kappa) {
    case Curvature::spherical: {
        // chord-based formula is stable for nearby points
        const double chord = (X - Y).norm();
        return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    }
    case Curvature::flat: return (X.head(n) - Y.head(n)).norm();
    case Curvature::hyperbolic: {
        // Minkowski chord: |X - Y|^2_L = 2(cosh d - 1) = 4 sinh^2(d/2)
        const double spatial = (X.head(n) - Y.head(n)).squaredNorm();
        const double dt = X(n) - Y(n);
        const double q = std::max(0.0, spatial - dt * dt);
        return 2.0 * std::asinh(0.5 * std::sqrt(q));
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Geodesic ball of radius R about a chart point. The model radius
/// tn(R/2) is the Euclidean radius of the ball when centred at the origin.
struct GeodesicBall {
    double radius = 1.0;
    Vec center;
    Curvature kappa = Curvature::flat;

    GeodesicBall(Curvature k, double R, Vec c) : radius(R), center(std::move(c)), kappa(k) {
        if (!(R > 0.0)) throw std::invalid_argument("GeodesicBall: radius must be positive");
        if (k == Curvature::spherical && !(R < std::numbers::pi))
            throw std::invalid_argument("GeodesicBall: spherical radius must be below pi");
    }

    double model_radius() const { return tn(kappa, 0.5 * radius); }
};

} // namespace shrinklab
