// Finite-difference Riemannian geometry in coordinates: Christoffel symbols,
// curvature, covariant Hessians, drift Laplacians, weighted Ricci tensors and
// second fundamental forms of parametrized hypersurfaces.
//
// Conventions
//   R_{ijkl} = 1/2 (g_il,jk + g_jk,il - g_ik,jl - g_jl,ik)
//              + g_mp (G^m_jk G^p_il - G^m_jl G^p_ik),
// so a space of constant curvature K has R_{ijkl} = K (g_ik g_jl - g_il g_jk)
// and the round sphere reports sectional curvature +1.
//   Ric_jk = g^il R_ijlk.
//   A(X, Y) = g(nabla_X Y, nu) for the unit normal nu selected by the patch.
#pragma once

#include "fd.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shrinklab {

/// Raised when a metric is singular or indefinite at a stencil point.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ScalarField {
    std::string name;
    std::function<double(const Vec&)> eval;

    double operator()(const Vec& x) const { return eval(x); }
};

inline ScalarField constant_field(double c, std::string name = "const") {
    return {std::move(name), [c](const Vec&) { return c; }};
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return {a.name + "+" + b.name, [a, b](const Vec& x) { return a(x) + b(x); }};
}

inline ScalarField scaled(double s, const ScalarField& a) {
    return {std::to_string(s) + "*" + a.name, [s, a](const Vec& x) { return s * a(x); }};
}

struct MetricEvaluator {
    int dim = 0;
    std::function<Mat(const Vec&)> eval;

    Mat operator()(const Vec& x) const { return eval(x); }
};

inline MetricEvaluator euclidean_metric(int dim) {
    return {dim, [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); }};
}

inline MetricEvaluator chart_metric(const SpaceFormChart& chart) {
    return {chart.dim, [chart](const Vec& x) { return chart.metric(x); }};
}

/// e^{2 phi} g.
inline MetricEvaluator conformal_metric(const MetricEvaluator& g, const ScalarField& phi) {
    return {g.dim, [g, phi](const Vec& x) -> Mat { return std::exp(2.0 * phi(x)) * g(x); }};
}

/// Three-index array, stored as one dim x dim matrix per leading index.
struct Tensor3 {
    std::vector<Mat> slices;

    explicit Tensor3(int n = 0) : slices(static_cast<std::size_t>(n), Mat::Zero(n, n)) {}
    int dim() const { return static_cast<int>(slices.size()); }
    double& operator()(int k, int i, int j) { return slices[static_cast<std::size_t>(k)](i, j); }
    double operator()(int k, int i, int j) const { return slices[static_cast<std::size_t>(k)](i, j); }
};

/// Four-index array with row-major flat storage.
struct Tensor4 {
    int n = 0;
    std::vector<double> data;

    explicit Tensor4(int dim = 0) : n(dim), data(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
    double& operator()(int i, int j, int k, int l) { return data[index(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return data[index(i, j, k, l)]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    std::size_t index(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
    }
};

inline double max_abs_diff(const Tensor4& a, const Tensor4& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

/// Inverse of a symmetric positive-definite matrix; throws on failure.
inline Mat spd_inverse(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite");
    return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

/// Largest component of a symmetric 2-tensor in a g-orthonormal frame.
inline double frame_max_abs(const Mat& T, const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite");
    const Mat L = llt.matrixL();
    const Mat Linv = L.triangularView<Eigen::Lower>().solve(Mat::Identity(g.rows(), g.cols()));
    return (Linv * T * Linv.transpose()).cwiseAbs().maxCoeff();
}

/// Coordinate derivatives of the metric: slice k is d_k g.
inline std::vector<Mat> metric_first_derivatives(const MetricEvaluator& g, const Vec& x, const FdOptions& opt) {
    std::vector<Mat> d;
    d.reserve(static_cast<std::size_t>(g.dim));
    for (int k = 0; k < g.dim; ++k) d.push_back(fd_partial(g, x, k, opt));
    return d;
}

/// Christoffel symbols of the second kind, G(k, i, j) = G^k_ij.
inline Tensor3 christoffels(const MetricEvaluator& g, const Vec& x, const FdOptions& opt = {}) {
    opt.validate();
    const int n = g.dim;
    const Mat ginv = spd_inverse(g(x));
    const auto dg = metric_first_derivatives(g, x, opt);
    Tensor3 lower(n); // G_{l,ij}
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                lower(l, i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
    Tensor3 G(n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) G.slices[k] += ginv(k, l) * lower.slices[l];
    return G;
}

/// Fully covariant Riemann tensor.
inline Tensor4 riemann(const MetricEvaluator& g, const Vec& x, const FdOptions& opt = {}) {
    opt.validate();
    const int n = g.dim;
    const Mat gx = g(x);
    const Tensor3 G = christoffels(g, x, opt);
    // d2g[a][b] = d_a d_b g
    std::vector<std::vector<Mat>> d2g(static_cast<std::size_t>(n), std::vector<Mat>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) d2g[a][b] = d2g[b][a] = fd_second(g, x, a, b, opt);

    Tensor4 R(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = 0.5 * (d2g[j][k](i, l) + d2g[i][l](j, k) - d2g[j][l](i, k) - d2g[i][k](j, l));
                    for (int m = 0; m < n; ++m)
                        for (int p = 0; p < n; ++p)
                            v += gx(m, p) * (G(m, j, k) * G(p, i, l) - G(m, j, l) * G(p, i, k));
                    R(i, j, k, l) = v;
                }
    return R;
}

inline Mat ricci_from_riemann(const Tensor4& R, const Mat& ginv) {
    const int n = R.n;
    Mat Ric = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) Ric(j, k) += ginv(i, l) * R(i, j, l, k);
    return Ric;
}

inline Mat ricci(const MetricEvaluator& g, const Vec& x, const FdOptions& opt = {}) {
    return ricci_from_riemann(riemann(g, x, opt), spd_inverse(g(x)));
}

/// Sectional curvature of the coordinate plane spanned by e_a, e_b.
inline double sectional_curvature(const Tensor4& R, const Mat& g, int a, int b) {
    const double area2 = g(a, a) * g(b, b) - g(a, b) * g(a, b);
    return R(a, b, a, b) / area2;
}

/// Smallest and largest sectional curvature over all coordinate planes.
inline std::pair<double, double> sectional_range(const Tensor4& R, const Mat& g) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int a = 0; a < R.n; ++a)
        for (int b = a + 1; b < R.n; ++b) {
            const double K = sectional_curvature(R, g, a, b);
            lo = std::min(lo, K);
            hi = std::max(hi, K);
        }
    return {lo, hi};
}

/// Largest violation of the algebraic Riemann symmetries: antisymmetry in
/// each pair, pair symmetry and the first Bianchi identity.
inline double riemann_symmetry_defect(const Tensor4& R) {
    double m = 0.0;
    const int n = R.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    m = std::max(m, std::abs(R(i, j, k, l) + R(j, i, k, l)));
                    m = std::max(m, std::abs(R(i, j, k, l) + R(i, j, l, k)));
                    m = std::max(m, std::abs(R(i, j, k, l) - R(k, l, i, j)));
                    m = std::max(m, std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)));
                }
    return m;
}

/// Covariant Hessian nabla^2 u = d^2 u - G^k du_k.
inline Mat covariant_hessian(const ScalarField& u, const MetricEvaluator& g, const Vec& x, const FdOptions& opt = {}) {
    opt.validate();
    const Tensor3 G = christoffels(g, x, opt);
    const Vec du = fd_gradient(u, x, opt);
    Mat H = fd_hessian(u, x, opt);
    for (int k = 0; k < g.dim; ++k) H -= du(k) * G.slices[k];
    return H;
}

inline double laplacian(const ScalarField& u, const MetricEvaluator& g, const Vec& x, const FdOptions& opt = {}) {
    return (spd_inverse(g(x)) * covariant_hessian(u, g, x, opt)).trace();
}

/// g(grad a, grad b) from coordinate differentials.
inline double inner_differentials(const Vec& da, const Vec& db, const Mat& ginv) { return da.dot(ginv * db); }

/// Delta_f u = Delta u - g(grad f, grad u).
inline double drift_laplacian(const ScalarField& u, const ScalarField& f, const MetricEvaluator& g, const Vec& x,
                              const FdOptions& opt = {}) {
    const Mat ginv = spd_inverse(g(x));
    const double lap = (ginv * covariant_hessian(u, g, x, opt)).trace();
    return lap - inner_differentials(fd_gradient(f, x, opt), fd_gradient(u, x, opt), ginv);
}

/// Metric measure structure (g, e^{-f} dvol) with Bakry-Emery parameter alpha.
/// alpha = +/-infinity selects Ric + nabla^2 f.
struct WeightedStructure {
    MetricEvaluator metric;
    ScalarField f;
    double alpha = std::numeric_limits<double>::infinity();
};

/// Ric + nabla^2 f - (1/alpha) df (x) df.
inline Mat bakry_emery_ricci(const WeightedStructure& ws, const Vec& x, const FdOptions& opt = {}) {
    if (ws.alpha == 0.0 || std::isnan(ws.alpha)) throw std::invalid_argument("bakry_emery_ricci: alpha must be nonzero");
    Mat T = ricci(ws.metric, x, opt) + covariant_hessian(ws.f, ws.metric, x, opt);
    if (std::isfinite(ws.alpha)) {
        const Vec df = fd_gradient(ws.f, x, opt);
        T -= (1.0 / ws.alpha) * (df * df.transpose());
    }
    return T;
}

/// |LHS - RHS| of the weighted Bochner formula
///   1/2 Delta_f |grad u|^2 = |nabla^2 u|^2 + Ric_f(grad u, grad u) + g(grad Delta_f u, grad u)
/// with every term evaluated by nested finite differences at one step size.
inline double bochner_residual(const ScalarField& u, const ScalarField& f, const MetricEvaluator& g, const Vec& x,
                               const FdOptions& opt = {}) {
    const ScalarField grad_sq{"|grad u|^2", [u, g, opt](const Vec& y) {
                                  const Vec du = fd_gradient(u, y, opt);
                                  return inner_differentials(du, du, spd_inverse(g(y)));
                              }};
    const ScalarField drift_u{"Delta_f u", [u, f, g, opt](const Vec& y) { return drift_laplacian(u, f, g, y, opt); }};

    const Mat ginv = spd_inverse(g(x));
    const Vec du = fd_gradient(u, x, opt);
    const Vec grad_u = ginv * du;
    const Mat hess = covariant_hessian(u, g, x, opt);
    const Mat raised = ginv * hess;
    const double hess_sq = (raised * raised).trace();
    const Mat ric_f = bakry_emery_ricci({g, f, std::numeric_limits<double>::infinity()}, x, opt);

    const double lhs = 0.5 * drift_laplacian(grad_sq, f, g, x, opt);
    const double rhs = hess_sq + grad_u.dot(ric_f * grad_u) + fd_gradient(drift_u, x, opt).dot(grad_u);
    return std::abs(lhs - rhs);
}

/// Parametrized hypersurface u in R^n -> X(u) in R^{n+1}. The unit normal is
/// the one with positive Euclidean pairing against orientation(X).
struct HypersurfacePatch {
    int param_dim = 0;
    std::function<Vec(const Vec&)> embedding;
    std::function<Vec(const Vec&)> orientation;
    std::string normal_convention;

    Vec operator()(const Vec& u) const { return embedding(u); }
};

struct ShapeData {
    Mat A;              // second fundamental form in parameter coordinates
    double H = 0.0;     // trace of A against the induced metric
    Vec normal;         // unit normal (coordinate components)
    Mat induced;        // induced metric in parameter coordinates
    Vec point;          // X(u)
};

/// Unit g-normal and tangent frame at X(u).
struct NormalFrame {
    Mat tangents; // columns d_a X
    Vec normal;
    Vec point;
};

inline NormalFrame normal_frame(const HypersurfacePatch& patch, const MetricEvaluator& g, const Vec& u,
                                const FdOptions& opt) {
    NormalFrame fr;
    fr.point = patch(u);
    fr.tangents = fd_jacobian(patch.embedding, u, opt);
    if (fr.tangents.rows() != g.dim || fr.tangents.cols() != g.dim - 1)
        throw std::invalid_argument("patch dimensions do not match a hypersurface of the metric");
    Eigen::FullPivLU<Mat> lu(fr.tangents.transpose());
    if (lu.rank() != g.dim - 1) throw NumericalError("patch is not an immersion at the sampled parameter");
    const Vec covector = lu.kernel().col(0);
    const Mat gx = g(fr.point);
    Vec nu = spd_inverse(gx) * covector;
    nu /= std::sqrt(nu.dot(gx * nu));
    if (patch.orientation && patch.orientation(fr.point).dot(nu) < 0.0) nu = -nu;
    fr.normal = nu;
    return fr;
}

inline ShapeData second_fundamental_form(const HypersurfacePatch& patch, const MetricEvaluator& g, const Vec& u,
                                         const FdOptions& opt = {}) {
    opt.validate();
    const int m = patch.param_dim;
    const NormalFrame fr = normal_frame(patch, g, u, opt);
    const Mat gx = g(fr.point);
    const Tensor3 G = christoffels(g, fr.point, opt);
    const Vec gnu = gx * fr.normal;

    ShapeData s;
    s.point = fr.point;
    s.normal = fr.normal;
    s.induced = fr.tangents.transpose() * gx * fr.tangents;
    s.A = Mat::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            Vec accel = fd_second(patch.embedding, u, a, b, opt);
            for (int k = 0; k < g.dim; ++k)
                accel(k) += fr.tangents.col(a).dot(G.slices[k] * fr.tangents.col(b));
            s.A(a, b) = s.A(b, a) = accel.dot(gnu);
        }
    s.H = (spd_inverse(s.induced) * s.A).trace();
    return s;
}

/// Induced metric of a patch pulled back to parameter space, usable as a
/// metric in its own right for intrinsic computations on the hypersurface.
inline MetricEvaluator induced_metric(const HypersurfacePatch& patch, const MetricEvaluator& g,
                                      const FdOptions& opt = {}) {
    return {patch.param_dim, [patch, g, opt](const Vec& u) -> Mat {
                const Mat J = fd_jacobian(patch.embedding, u, opt);
                return J.transpose() * g(patch(u)) * J;
            }};
}

/// Field restricted to a patch, as a function of the parameters.
inline ScalarField restrict_to(const ScalarField& f, const HypersurfacePatch& patch) {
    return {f.name + "|patch", [f, patch](const Vec& u) { return f(patch(u)); }};
}

} // namespace shrinklab
