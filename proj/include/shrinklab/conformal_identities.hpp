// Verification batteries for conformal and weighted-curvature identities:
//  - hyperbolic half-space structure of (sn rho)^{-2} g on a space form,
//  - the Gaussian ball (R^2 - r^2)^{-2} g_euc with weight f + r^2/4,
//  - the general conformal-change laws against the finite-difference engine,
//  - the weighted Bochner formula under step refinement,
//  - Gaussian mean curvature of offset hyperplanes.
#pragma once

#include "conformal.hpp"
#include "report.hpp"
#include "sampling.hpp"
#include "space_form_identities.hpp"

#include <array>
#include <numeric>
#include <sstream>

namespace shrinklab {

// ---------------------------------------------------------------------------
// (sn rho)^{-2} g on the half-space {x_0 > 0} of a space form

struct HalfSpaceConformalOptions {
    int dim = 3;
    int count = 100;
    double radius = 1.0; // geodesic radius R of the sphere checked for total geodesy
    double exponent = -2.0; // g~ = (sn rho)^exponent g; anything but -2 is a falsification run
    FdOptions fd{1e-3, 4};
    double curvature_tol = 1e-5;
    double ricci_tol = 1e-6;
    double shape_tol = 1e-6;
    double volume_tol = 1e-12;
    std::uint64_t seed = default_seed;
};

/// log of the conformal factor: g~ = e^{2 phi} g with phi = (exponent/2) log sn(rho).
inline ScalarField half_space_conformal_exponent(const SpaceFormChart& chart, double exponent) {
    const ScalarField s = sn_rho_field(chart);
    return {"phi", [s, exponent](const Vec& x) { return 0.5 * exponent * std::log(s(x)); }};
}

/// Weight with e^{-f} = (sn rho)^n, n = dim - 1.
inline ScalarField half_space_weight(const SpaceFormChart& chart) {
    const ScalarField s = sn_rho_field(chart);
    const double n = chart.dim - 1.0;
    return {"f", [s, n](const Vec& x) { return -n * std::log(s(x)); }};
}

/// Patch of the geodesic sphere |x| = model_radius restricted to x_0 > 0,
/// oriented by the inward normal.
inline HypersurfacePatch upper_sphere_patch(int dim, double model_radius) {
    return {dim - 1,
            [model_radius, dim](const Vec& u) -> Vec {
                Vec v(dim);
                v(0) = 1.0;
                v.tail(dim - 1) = u;
                return model_radius * v.normalized();
            },
            [](const Vec& X) -> Vec { return -X; }, "inward (towards the centre)"};
}

/// Points of {x_0 > 0} at least `margin` from the hyperplane and from the centre.
inline std::vector<Vec> sample_upper_half(const SpaceFormChart& chart, int count, double margin, Sampler& sampler) {
    auto pts = sample_off_hyperplane(chart, count, margin, sampler);
    for (auto& x : pts) x(0) = std::abs(x(0));
    return pts;
}

inline std::vector<VerificationReport> verify_half_space_conformal(Curvature kappa,
                                                                   const HalfSpaceConformalOptions& o = {}) {
    const SpaceFormChart chart(kappa, o.dim);
    const MetricEvaluator g = chart_metric(chart);
    const ScalarField phi = half_space_conformal_exponent(chart, o.exponent);
    const MetricEvaluator gt = conformal_metric(g, phi);
    const ScalarField f = half_space_weight(chart);
    const int n = o.dim - 1;
    Sampler sampler(o.seed);
    const auto pts = sample_upper_half(chart, o.count, 0.1, sampler);

    double curv = 0.0, ric = 0.0;
    for (const auto& x : pts) {
        const Tensor4 R = riemann(gt, x, o.fd);
        const auto [lo, hi] = sectional_range(R, gt(x));
        curv = std::max({curv, std::abs(lo + 1.0), std::abs(hi + 1.0)});
        const Mat be = bakry_emery_ricci({gt, f, -static_cast<double>(n)}, x, o.fd);
        ric = std::max(ric, frame_max_abs(be, gt(x)));
    }

    // sphere of geodesic radius R about the origin, which lies on the hyperplane
    const double model_radius = tn(kappa, 0.5 * o.radius);
    const HypersurfacePatch sphere = upper_sphere_patch(o.dim, model_radius);
    double shape = 0.0, volume = 0.0;
    for (int i = 0; i < o.count; ++i) {
        const Vec u = sampler.in_ball(n, 2.0);
        const ShapeData st = second_fundamental_form(sphere, gt, u, o.fd);
        shape = std::max(shape, frame_max_abs(st.A, st.induced));
        const ShapeData sb = second_fundamental_form(sphere, g, u, o.fd);
        const double weighted = std::exp(-f(st.point)) * std::sqrt(st.induced.determinant());
        const double plain = std::sqrt(sb.induced.determinant());
        volume = std::max(volume, std::abs(weighted - plain) / plain);
    }

    std::ostringstream common;
    common << "kappa=" << static_cast<int>(kappa) << " dim=" << o.dim << " exponent=" << o.exponent
           << " fd_step=" << o.fd.step << " fd_order=" << o.fd.order;
    const std::string tag = "[kappa=" + std::to_string(static_cast<int>(kappa)) + ",R=" + format_short(o.radius) + "]";
    std::vector<VerificationReport> out;
    out.push_back(make_report("half_space.sectional_minus_one" + tag, curv, o.curvature_tol, o.count,
                              common.str() + "; max |K + 1| over coordinate planes"));
    out.push_back(make_report("half_space.weighted_volume" + tag, volume, o.volume_tol, o.count,
                              common.str() + "; e^{-f} dmu~ vs dmu on the geodesic sphere patch"));
    out.push_back(make_report("half_space.bakry_emery_alpha_minus_n" + tag, ric, o.ricci_tol, o.count,
                              common.str() + "; max component of Ric~ + nabla~^2 f + (1/n) df df in a g~-orthonormal frame"));
    out.push_back(make_report("half_space.sphere_totally_geodesic" + tag, shape, o.shape_tol, o.count,
                              common.str() + "; max principal curvature magnitude; normal: " + sphere.normal_convention));
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian ball: g~ = (R^2 - r^2)^{-2} g_euc, weight f + gamma with
// e^{-f} = (R^2 - r^2)^n and gamma = r^2/4, alpha = -n.

struct GaussianBall {
    double R = 2.0;
    int n = 2; // hypersurface dimension; ambient dimension n + 1

    int dim() const { return n + 1; }
    double gap(const Vec& x) const { return R * R - x.squaredNorm(); }

    ScalarField phi() const {
        const GaussianBall b = *this;
        return {"phi", [b](const Vec& x) { return -std::log(b.gap(x)); }};
    }
    ScalarField f() const {
        const GaussianBall b = *this;
        return {"f", [b](const Vec& x) { return -b.n * std::log(b.gap(x)); }};
    }
    static ScalarField gamma() {
        return {"gamma", [](const Vec& x) { return 0.25 * x.squaredNorm(); }};
    }
    MetricEvaluator metric() const { return conformal_metric(euclidean_metric(dim()), phi()); }

    /// 1/2 (R^2 - r^2)(R^2 + r^2 - 4n) g~ + (1/n) dgamma (x) dgamma, with dgamma read as dgamma (x) dgamma.
    Mat weighted_ricci_closed(const Vec& x) const {
        const double r2 = x.squaredNorm();
        const double gt = 1.0 / (gap(x) * gap(x));
        const Vec dgamma = 0.5 * x;
        return 0.5 * gap(x) * (R * R + r2 - 4.0 * n) * gt * Mat::Identity(dim(), dim()) +
               (1.0 / n) * dgamma * dgamma.transpose();
    }

    /// Smallest eigenvalue of the closed form relative to g~.
    double weighted_ricci_min_eigenvalue(const Vec& x) const {
        const double scale = gap(x) * gap(x); // g~^{-1} = (R^2 - r^2)^2 g_euc^{-1}
        Eigen::SelfAdjointEigenSolver<Mat> es(scale * weighted_ricci_closed(x));
        return es.eigenvalues().minCoeff();
    }
};

struct GaussianBallOptions {
    int count = 100;        // finite-difference comparison points
    int radii = 200;        // sampled radii for the sign check
    FdOptions fd{1e-3, 4};
    double curvature_tol = 1e-5;
    double ricci_tol = 1e-5;
    double psd_tol = 1e-10;
    std::uint64_t seed = default_seed;
};

inline std::vector<VerificationReport> verify_gaussian_conformal(double R, int n, const GaussianBallOptions& o = {}) {
    const GaussianBall ball{R, n};
    const MetricEvaluator gt = ball.metric();
    const ScalarField weight = ball.f() + GaussianBall::gamma();
    Sampler sampler(o.seed);

    double curv = 0.0, ric = 0.0;
    const double target = -4.0 * R * R;
    for (int i = 0; i < o.count; ++i) {
        Vec x = sampler.in_ball(ball.dim(), 0.8 * R);
        const Tensor4 Rm = riemann(gt, x, o.fd);
        const auto [lo, hi] = sectional_range(Rm, gt(x));
        curv = std::max({curv, std::abs(lo - target), std::abs(hi - target)});
        const Mat engine = bakry_emery_ricci({gt, weight, -static_cast<double>(n)}, x, o.fd);
        ric = std::max(ric, mixed_relative_error(engine, ball.weighted_ricci_closed(x)));
    }

    double min_eig = std::numeric_limits<double>::infinity();
    double at_radius = 0.0;
    for (int i = 0; i < o.radii; ++i) {
        const double r = R * (i + 0.5) / o.radii;
        const Vec x = r * sampler.unit_vector(ball.dim());
        const double e = ball.weighted_ricci_min_eigenvalue(x);
        if (e < min_eig) {
            min_eig = e;
            at_radius = r;
        }
    }

    std::ostringstream common;
    common << "R=" << R << " n=" << n << " R^2-4n=" << R * R - 4.0 * n << " fd_step=" << o.fd.step
           << " fd_order=" << o.fd.order << "; dgamma^2 read as dgamma (x) dgamma";
    const std::string tag = "[R^2=" + format_short(R * R) + ",n=" + std::to_string(n) + "]";
    std::ostringstream psd_notes;
    psd_notes << common.str() << "; min eigenvalue " << min_eig << " at r=" << at_radius;
    return {make_report("gaussian_ball.constant_curvature" + tag, curv, o.curvature_tol, o.count,
                        common.str() + "; target sectional -4R^2"),
            make_report("gaussian_ball.weighted_ricci_closed_form" + tag, ric, o.ricci_tol, o.count,
                        common.str() + "; mixed relative error"),
            make_report("gaussian_ball.weighted_ricci_nonnegative" + tag, std::max(0.0, -min_eig), o.psd_tol, o.radii,
                        psd_notes.str())};
}

// ---------------------------------------------------------------------------
// Random smooth data for the conformal-change laws

/// Smooth scalar a sin(b.x + c) + d |x|^2 + e.x.
inline ScalarField random_smooth_field(Sampler& s, int dim, std::string name) {
    const double a = s.uniform(-0.5, 0.5), c = s.uniform(-1.0, 1.0), d = s.uniform(-0.3, 0.3);
    Vec b(dim), e(dim);
    for (int i = 0; i < dim; ++i) {
        b(i) = s.uniform(-1.5, 1.5);
        e(i) = s.uniform(-0.5, 0.5);
    }
    return {std::move(name), [=](const Vec& x) { return a * std::sin(b.dot(x) + c) + d * x.squaredNorm() + e.dot(x); }};
}

/// A ball-model chart metric plus a small smooth symmetric perturbation, so
/// the base metric is neither flat nor conformally flat.
inline MetricEvaluator random_smooth_metric(Sampler& s, int dim) {
    const SpaceFormChart chart(curvature_from_int(static_cast<int>(std::floor(s.uniform(-1.0, 2.0)))), dim);
    std::vector<Vec> freq;
    std::vector<double> phase;
    for (int i = 0; i < dim * dim; ++i) {
        Vec w(dim);
        for (int k = 0; k < dim; ++k) w(k) = s.uniform(-1.0, 1.0);
        freq.push_back(w);
        phase.push_back(s.uniform(-1.0, 1.0));
    }
    const double eps = 0.05;
    return {dim, [=](const Vec& x) -> Mat {
                Mat P(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) P(i, j) = std::sin(freq[i * dim + j].dot(x) + phase[i * dim + j]);
                return chart.metric(x) + eps * (P + P.transpose());
            }};
}

/// Graph patch x_0 = z(u) over the remaining coordinates, normal towards +x_0.
inline HypersurfacePatch random_graph_patch(Sampler& s, int dim) {
    const int m = dim - 1;
    Vec lin(m), w(m);
    Mat Q(m, m);
    for (int i = 0; i < m; ++i) {
        lin(i) = s.uniform(-0.5, 0.5);
        w(i) = s.uniform(-2.0, 2.0);
        for (int j = 0; j < m; ++j) Q(i, j) = s.uniform(-0.5, 0.5);
    }
    const double z0 = s.uniform(-0.2, 0.2), amp = s.uniform(-0.2, 0.2);
    return {m,
            [=](const Vec& u) -> Vec {
                Vec X(dim);
                X(0) = z0 + lin.dot(u) + u.dot(Q * u) + amp * std::sin(w.dot(u));
                X.tail(m) = u;
                return X;
            },
            [dim](const Vec&) -> Vec { return Vec::Unit(dim, 0); }, "+x_0 side of the graph"};
}

struct ConformalLawOptions {
    int dim = 3;
    int count = 100;
    FdOptions fd{1e-3, 4};
    double tol = 1e-5;
    double control_tol = 1e-12;
    std::uint64_t seed = default_seed;
};

/// Closed-form conformal Riemann, Ricci, Hessian, second fundamental form and
/// mean curvature against the engine applied directly to e^{2 phi} g.
inline std::vector<VerificationReport> verify_conformal_laws(const ConformalLawOptions& o = {}) {
    Sampler s(o.seed);
    double riem = 0.0, ricc = 0.0, hess = 0.0, shape = 0.0, mean = 0.0;
    double control = 0.0;
    for (int i = 0; i < o.count; ++i) {
        const MetricEvaluator g = random_smooth_metric(s, o.dim);
        const ScalarField phi = random_smooth_field(s, o.dim, "phi");
        const ScalarField h = random_smooth_field(s, o.dim, "h");
        const HypersurfacePatch patch = random_graph_patch(s, o.dim);
        const Vec x = s.in_ball(o.dim, 0.5);
        const Vec u = s.in_ball(o.dim - 1, 0.3);
        const MetricEvaluator gt = conformal_metric(g, phi);

        const Tensor4 closed = conformal_riemann_closed(g, phi, x, o.fd);
        const Tensor4 direct = riemann(gt, x, o.fd);
        riem = std::max(riem, max_abs_diff(closed, direct) / std::max(direct.max_abs(), 1.0));
        ricc = std::max(ricc, mixed_relative_error(conformal_ricci_closed(g, phi, x, o.fd), ricci(gt, x, o.fd)));
        hess = std::max(hess, mixed_relative_error(conformal_hessian_closed(h, phi, g, x, o.fd),
                                                   covariant_hessian(h, gt, x, o.fd)));
        const ConformalShape cs = conformal_shape_closed(patch, g, phi, u, o.fd);
        const ShapeData st = second_fundamental_form(patch, gt, u, o.fd);
        shape = std::max(shape, mixed_relative_error(cs.A, st.A));
        mean = std::max(mean, mixed_relative_error(cs.H, st.H));

        // phi = 0 and phi = c reproduce the base data up to the constant scale
        const double c = s.uniform(-1.0, 1.0);
        const Tensor4 base = riemann(g, x, o.fd);
        Tensor4 scaled_base = base;
        for (double& v : scaled_base.data) v *= std::exp(2.0 * c);
        const double rscale = std::max(base.max_abs(), 1.0);
        control = std::max(control, max_abs_diff(conformal_riemann_closed(g, constant_field(0.0), x, o.fd), base) / rscale);
        control = std::max(control,
                           max_abs_diff(conformal_riemann_closed(g, constant_field(c), x, o.fd), scaled_base) /
                               (std::exp(2.0 * c) * rscale));
        control = std::max(control, mixed_relative_error(conformal_hessian_closed(h, constant_field(0.0), g, x, o.fd),
                                                         covariant_hessian(h, g, x, o.fd)));
        control = std::max(control, mixed_relative_error(conformal_hessian_closed(h, constant_field(c), g, x, o.fd),
                                                         covariant_hessian(h, g, x, o.fd)));
        const ShapeData sb = second_fundamental_form(patch, g, u, o.fd);
        const ConformalShape c0 = conformal_shape_closed(patch, g, constant_field(0.0), u, o.fd);
        control = std::max({control, mixed_relative_error(c0.A, sb.A), mixed_relative_error(c0.H, sb.H)});
    }
    std::ostringstream notes;
    notes << "dim=" << o.dim << " fd_step=" << o.fd.step << " fd_order=" << o.fd.order
          << "; mixed relative error ||a-b||_inf / max(||b||_inf, 1); normal convention: +x_0 side of the graph";
    return {make_report("conformal.riemann", riem, o.tol, o.count, notes.str()),
            make_report("conformal.ricci", ricc, o.tol, o.count, notes.str()),
            make_report("conformal.hessian", hess, o.tol, o.count, notes.str()),
            make_report("conformal.second_fundamental_form", shape, o.tol, o.count, notes.str()),
            make_report("conformal.mean_curvature", mean, o.tol, o.count, notes.str()),
            make_report("conformal.constant_phi_controls", control, o.control_tol, o.count,
                        "phi = 0 and phi = c against the base-metric engine")};
}

// ---------------------------------------------------------------------------
// Weighted Bochner formula

struct BochnerOptions {
    int dim = 3;
    int triples = 20;
    std::vector<double> steps{0.04, 0.02, 0.01, 0.005};
    double slope_target = 2.0;
    double slope_tol = 0.3;
    std::uint64_t seed = default_seed;
};

/// Step-refinement study of bochner_residual on random (metric, f, u)
/// triples. The residual is pure discretization error, so its log-log slope
/// is the stencil order. Also reports the f = 0, u linear control.
inline std::vector<VerificationReport> verify_bochner(const BochnerOptions& o = {}) {
    Sampler s(o.seed);
    double worst_slope_dev = 0.0, min_slope = 1e300, max_slope = -1e300;
    for (int t = 0; t < o.triples; ++t) {
        const MetricEvaluator g = random_smooth_metric(s, o.dim);
        const ScalarField f = random_smooth_field(s, o.dim, "f");
        const ScalarField u = random_smooth_field(s, o.dim, "u");
        const Vec x = s.in_ball(o.dim, 0.4);
        std::vector<double> res;
        for (double h : o.steps) res.push_back(bochner_residual(u, f, g, x, {h, 2}));
        const double slope = loglog_slope(o.steps, res);
        min_slope = std::min(min_slope, slope);
        max_slope = std::max(max_slope, slope);
        worst_slope_dev = std::max(worst_slope_dev, std::abs(slope - o.slope_target));
    }
    std::ostringstream notes;
    notes << "dim=" << o.dim << " steps=";
    for (double h : o.steps) notes << h << ",";
    notes << " fd_order=2 slope range [" << min_slope << ", " << max_slope << "]";

    // control: Euclidean, f = 0, u linear; every term vanishes
    Sampler cs(o.seed + 1);
    Vec a(o.dim);
    for (int i = 0; i < o.dim; ++i) a(i) = cs.uniform(-1.0, 1.0);
    const ScalarField lin{"linear", [a](const Vec& x) { return a.dot(x); }};
    double control = 0.0;
    for (int i = 0; i < 10; ++i)
        control = std::max(control, bochner_residual(lin, constant_field(0.0), euclidean_metric(o.dim),
                                                     cs.in_ball(o.dim, 1.0), {1e-3, 2}));
    return {make_report("bochner.richardson_slope", worst_slope_dev, o.slope_tol, o.triples, notes.str()),
            make_report("bochner.flat_linear_control", control, 1e-8, 10, "Euclidean, f = 0, u linear")};
}

// ---------------------------------------------------------------------------
// Gaussian mean curvature of offset hyperplanes {x_0 = eps}

/// Gaussian metric e^{-|x|^2/(2n)} g_euc on R^{n+1}: phi = -|x|^2/(4n).
inline ScalarField gaussian_conformal_exponent(int n) {
    return {"-|x|^2/4n", [n](const Vec& x) { return -x.squaredNorm() / (4.0 * n); }};
}

inline HypersurfacePatch offset_hyperplane(int dim, double eps) {
    return {dim - 1,
            [dim, eps](const Vec& u) -> Vec {
                Vec X(dim);
                X(0) = eps;
                X.tail(dim - 1) = u;
                return X;
            },
            [dim](const Vec&) -> Vec { return Vec::Unit(dim, 0); }, "+e_0"};
}

/// (eps/2) e^{|x|^2/(4n)}.
inline double offset_hyperplane_gaussian_mean_curvature(int n, const Vec& x) {
    return 0.5 * x(0) * std::exp(x.squaredNorm() / (4.0 * n));
}

inline std::vector<VerificationReport> verify_offset_hyperplanes(int n, int count, double tol,
                                                                 std::uint64_t seed = default_seed) {
    const int dim = n + 1;
    const ScalarField phi = gaussian_conformal_exponent(n);
    const MetricEvaluator euc = euclidean_metric(dim);
    const MetricEvaluator gauss = conformal_metric(euc, phi);
    const FdOptions fd{1e-3, 4};
    Sampler s(seed);
    double closed_err = 0.0, engine_err = 0.0;
    for (int i = 0; i < count; ++i) {
        const double eps = s.uniform(0.01, 1.0);
        const HypersurfacePatch plane = offset_hyperplane(dim, eps);
        const Vec u = s.in_ball(n, 2.0 * std::sqrt(static_cast<double>(n)));
        const double expected = offset_hyperplane_gaussian_mean_curvature(n, plane(u));
        closed_err = std::max(closed_err, mixed_relative_error(conformal_shape_closed(plane, euc, phi, u, fd).H, expected));
        engine_err = std::max(engine_err, mixed_relative_error(second_fundamental_form(plane, gauss, u, fd).H, expected));
    }
    const std::string notes = "n=" + std::to_string(n) + "; normal +e_0, mixed relative error";
    return {make_report("offset_hyperplane.closed_form", closed_err, tol, count, notes),
            make_report("offset_hyperplane.engine", engine_err, tol, count, notes)};
}

} // namespace shrinklab
