// Closed-form transformation laws under a conformal change g~ = e^{2 phi} g.
// Each function evaluates the right-hand side from quantities of the base
// metric only; the finite-difference engine on g~ is the independent check.
#pragma once

#include "tensorlab.hpp"

namespace shrinklab {

/// Phi = nabla^2 phi - dphi (x) dphi + 1/2 |dphi|^2 g.
inline Mat conformal_schouten_term(const ScalarField& phi, const MetricEvaluator& g, const Vec& x,
                                   const FdOptions& opt = {}) {
    const Mat gx = g(x);
    const Vec dphi = fd_gradient(phi, x, opt);
    const double norm2 = inner_differentials(dphi, dphi, spd_inverse(gx));
    return covariant_hessian(phi, g, x, opt) - dphi * dphi.transpose() + 0.5 * norm2 * gx;
}

/// R~_ijkl = e^{2phi}(R_ijkl - g_ik Phi_jl - g_jl Phi_ik + g_il Phi_jk + g_jk Phi_il).
inline Tensor4 conformal_riemann_closed(const MetricEvaluator& g, const ScalarField& phi, const Vec& x,
                                        const FdOptions& opt = {}) {
    const int n = g.dim;
    const Mat gx = g(x);
    const Mat P = conformal_schouten_term(phi, g, x, opt);
    const double e2 = std::exp(2.0 * phi(x));
    Tensor4 R = riemann(g, x, opt);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    R(i, j, k, l) = e2 * (R(i, j, k, l) - gx(i, k) * P(j, l) - gx(j, l) * P(i, k) + gx(i, l) * P(j, k) +
                                          gx(j, k) * P(i, l));
    return R;
}

/// Ric~ = Ric - (m-2)(nabla^2 phi - dphi (x) dphi) - (Delta phi + (m-2)|dphi|^2) g, m = dim.
inline Mat conformal_ricci_closed(const MetricEvaluator& g, const ScalarField& phi, const Vec& x,
                                  const FdOptions& opt = {}) {
    const Mat gx = g(x);
    const Mat ginv = spd_inverse(gx);
    const Vec dphi = fd_gradient(phi, x, opt);
    const Mat hess = covariant_hessian(phi, g, x, opt);
    const double lap = (ginv * hess).trace();
    const double m2 = g.dim - 2.0;
    return ricci(g, x, opt) - m2 * (hess - dphi * dphi.transpose()) -
           (lap + m2 * inner_differentials(dphi, dphi, ginv)) * gx;
}

/// nabla~^2 h = nabla^2 h - dphi (x) dh - dh (x) dphi + g(grad phi, grad h) g.
inline Mat conformal_hessian_closed(const ScalarField& h, const ScalarField& phi, const MetricEvaluator& g,
                                    const Vec& x, const FdOptions& opt = {}) {
    const Mat gx = g(x);
    const Vec dphi = fd_gradient(phi, x, opt);
    const Vec dh = fd_gradient(h, x, opt);
    return covariant_hessian(h, g, x, opt) - dphi * dh.transpose() - dh * dphi.transpose() +
           inner_differentials(dphi, dh, spd_inverse(gx)) * gx;
}

struct ConformalShape {
    Mat A;
    double H = 0.0;
};

/// A~ = e^phi (A - g(grad phi, nu) g|_Sigma), H~ = e^{-phi}(H - n g(grad phi, nu)).
/// The normal is the base-metric unit normal chosen by the patch orientation.
inline ConformalShape conformal_shape_closed(const HypersurfacePatch& patch, const MetricEvaluator& g,
                                             const ScalarField& phi, const Vec& u, const FdOptions& opt = {}) {
    const ShapeData base = second_fundamental_form(patch, g, u, opt);
    const double dphi_nu = fd_gradient(phi, base.point, opt).dot(base.normal);
    const double e = std::exp(phi(base.point));
    return {e * (base.A - dphi_nu * base.induced), (base.H - patch.param_dim * dphi_nu) / e};
}

} // namespace shrinklab
