// Pointwise checks of the hyperplane-distance test function sn(rho) on the
// ball model of a space form:
//   nabla^2 sn(rho) = -k sn(rho) g,
//   <grad sn(rho), grad r> = ct(r) sn(rho),
//   (Delta_Sigma + n k) sn(rho) = 0 on a totally geodesic Sigma.
#pragma once

#include "report.hpp"
#include "sampling.hpp"
#include "tensorlab.hpp"

#include <sstream>

namespace shrinklab {

inline ScalarField sn_rho_field(const SpaceFormChart& chart) {
    return {"sn(rho)", [chart](const Vec& x) { return sn(chart.kappa, distance_to_hyperplane(chart, x)); }};
}

inline ScalarField center_distance_field(const SpaceFormChart& chart) {
    return {"r", [chart](const Vec& x) { return distance_to_center(chart, x); }};
}

enum class StencilStatus { ok, step_warning };

struct TestFunctionResidual {
    double hessian = 0.0; // ||nabla^2 sn(rho) + k sn(rho) g||_inf
    double radial = 0.0;  // |<grad sn(rho), grad r> - ct(r) sn(rho)|
    StencilStatus status = StencilStatus::ok;
};

/// The stencil must stay inside the chart and on one side of the
/// hyperplane and of the centre, where sn(rho) and r are smooth.
inline StencilStatus stencil_status(const SpaceFormChart& chart, const Vec& x, const FdOptions& opt) {
    const double reach = (opt.order == 4 ? 2.0 : 1.0) * opt.step * std::sqrt(2.0);
    if (x.norm() + reach >= chart.domain_radius()) return StencilStatus::step_warning;
    if (std::abs(x(0)) <= reach || x.norm() <= reach) return StencilStatus::step_warning;
    return StencilStatus::ok;
}

inline TestFunctionResidual check_test_function(const SpaceFormChart& chart, const Vec& x,
                                                const FdOptions& opt = {}) {
    chart.require_inside(x);
    const MetricEvaluator g = chart_metric(chart);
    const ScalarField s = sn_rho_field(chart);
    const ScalarField r = center_distance_field(chart);
    const Mat gx = g(x);
    const double k = kappa_value(chart.kappa);
    const double sx = s(x);

    TestFunctionResidual res;
    res.status = stencil_status(chart, x, opt);
    res.hessian = (covariant_hessian(s, g, x, opt) + k * sx * gx).cwiseAbs().maxCoeff();
    const double pairing = inner_differentials(fd_gradient(s, x, opt), fd_gradient(r, x, opt), spd_inverse(gx));
    res.radial = std::abs(pairing - ct(chart.kappa, r(x)) * sx);
    return res;
}

/// Random chart points at least `margin` away from the hyperplane, the centre
/// and the chart boundary.
inline std::vector<Vec> sample_off_hyperplane(const SpaceFormChart& chart, int count, double margin,
                                              Sampler& sampler) {
    std::vector<Vec> pts;
    const double R = sampling_radius(chart.kappa);
    while (static_cast<int>(pts.size()) < count) {
        Vec x = sampler.in_ball(chart.dim, R);
        if (std::abs(x(0)) < margin || x.norm() < margin || x.norm() + margin >= chart.domain_radius()) continue;
        pts.push_back(std::move(x));
    }
    return pts;
}

/// Sweep of check_test_function; returns the Hessian and radial reports.
inline std::vector<VerificationReport> verify_test_function(Curvature kappa, int dim, int count, double tol,
                                                            const FdOptions& opt, std::uint64_t seed = default_seed) {
    const SpaceFormChart chart(kappa, dim);
    Sampler sampler(seed);
    const auto pts = sample_off_hyperplane(chart, count, 10.0 * opt.step, sampler);
    double hess = 0.0, radial = 0.0;
    int warnings = 0;
    for (const auto& x : pts) {
        const auto r = check_test_function(chart, x, opt);
        hess = std::max(hess, r.hessian);
        radial = std::max(radial, r.radial);
        warnings += r.status == StencilStatus::step_warning;
    }
    std::ostringstream notes;
    notes << "kappa=" << static_cast<int>(kappa) << " dim=" << dim << " fd_step=" << opt.step
          << " fd_order=" << opt.order << " stencil_warnings=" << warnings
          << "; rho from the quadric embedding (model-dependent plumbing)";
    const std::string tag = "[kappa=" + std::to_string(static_cast<int>(kappa)) + "]";
    return {make_report("test_function.hessian" + tag, hess, tol, count, notes.str()),
            make_report("test_function.radial_pairing" + tag, radial, tol, count, notes.str())};
}

/// Linear n-plane through the origin with unit normal `normal`; it is
/// totally geodesic in every ball-model chart.
inline HypersurfacePatch plane_through_origin(const Vec& normal) {
    const int dim = static_cast<int>(normal.size());
    Eigen::HouseholderQR<Mat> qr(normal.normalized());
    const Mat Q = qr.householderQ() * Mat::Identity(dim, dim);
    const Mat basis = Q.rightCols(dim - 1);
    const Vec nu = normal.normalized();
    return {dim - 1, [basis](const Vec& u) -> Vec { return basis * u; }, [nu](const Vec&) -> Vec { return nu; },
            "fixed normal of the plane"};
}

/// |(Delta_Sigma + n k) sn(rho)| at a parameter of a totally geodesic plane.
inline double totally_geodesic_laplacian_residual(const SpaceFormChart& chart, const HypersurfacePatch& plane,
                                                  const Vec& u, const FdOptions& opt = {}) {
    const MetricEvaluator h = induced_metric(plane, chart_metric(chart), opt);
    const ScalarField s = restrict_to(sn_rho_field(chart), plane);
    const int n = plane.param_dim;
    return std::abs(laplacian(s, h, u, opt) + n * kappa_value(chart.kappa) * s(u));
}

inline VerificationReport verify_totally_geodesic_laplacian(Curvature kappa, int dim, int count, double tol,
                                                            const FdOptions& opt,
                                                            std::uint64_t seed = default_seed) {
    const SpaceFormChart chart(kappa, dim);
    Sampler sampler(seed);
    Vec normal = sampler.unit_vector(dim);
    normal(0) *= 0.5; // keep the plane transverse to {x_0 = 0}
    const HypersurfacePatch plane = plane_through_origin(normal);
    const double margin = 10.0 * opt.step;
    double worst = 0.0;
    int taken = 0;
    while (taken < count) {
        const Vec u = sampler.in_ball(dim - 1, sampling_radius(kappa));
        const Vec x = plane(u);
        if (std::abs(x(0)) < margin || x.norm() + margin >= chart.domain_radius()) continue;
        worst = std::max(worst, totally_geodesic_laplacian_residual(chart, plane, u, opt));
        ++taken;
    }
    std::ostringstream notes;
    notes << "kappa=" << static_cast<int>(kappa) << " dim=" << dim << " fd_step=" << opt.step
          << " fd_order=" << opt.order << "; Sigma = plane through the origin";
    return make_report("totally_geodesic_laplacian[kappa=" + std::to_string(static_cast<int>(kappa)) + "]", worst, tol,
                       count, notes.str());
}

} // namespace shrinklab
