#include <shrinklab/shooter.hpp>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include <sstream>

using namespace shrinklab;

namespace {
double intercept(int n, double f0, ShootConfig c = {}) {
    c.f0 = f0;
    const auto res = find_intercept(shoot(ShrinkerODE(n), c));
    EXPECT_EQ(res.status, InterceptStatus::found);
    return res.r_alpha.value_or(std::nan(""));
}

// Linearising the profile equation about f = 0 gives Kummer's equation
// whose regular solution is 1F1(-1/2; n/2; r^2/4); its first zero is the
// small-f0 limit of the intercept.
double kummer_first_zero(int n) {
    auto phi = [n](double r) { return boost::math::hypergeometric_1F1(-0.5, 0.5 * n, 0.25 * r * r); };
    std::uintmax_t iters = 100;
    const auto [lo, hi] = boost::math::tools::toms748_solve(phi, 1.5, 2.0 * std::sqrt(n) + 0.5,
                                                            boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (lo + hi);
}
} // namespace

TEST(Dopri5, ExponentialWithDenseOutput) {
    using V = Eigen::Matrix<double, 1, 1>;
    std::vector<DenseStep<1>> steps;
    const auto rhs = [](double, const V& y) -> V { return y; };
    const auto res = dopri5_integrate<1>(rhs, 0.0, V(1.0), 2.0, {1e-10, 1e-12},
                                         [&](const DenseStep<1>& s) { steps.push_back(s); return true; });
    EXPECT_EQ(res.stop, Dopri5Stop::reached_end);
    EXPECT_DOUBLE_EQ(res.t, 2.0);
    EXPECT_NEAR(res.y(0), std::exp(2.0), 1e-8);
    for (const auto& s : steps) {
        const double mid = s.t0 + 0.37 * s.h;
        EXPECT_NEAR(s(mid)(0), std::exp(mid), 1e-7 * std::exp(mid));
        EXPECT_NEAR(s(s.t1())(0), s.end()(0), 1e-14 * std::abs(s.end()(0)));
    }
}

TEST(Dopri5, ObserverStopAndBadArguments) {
    using V = Eigen::Matrix<double, 1, 1>;
    const auto rhs = [](double, const V& y) -> V { return -y; };
    const auto res = dopri5_integrate<1>(rhs, 0.0, V(1.0), 10.0, {}, [](const DenseStep<1>&) { return false; });
    EXPECT_EQ(res.stop, Dopri5Stop::observer);
    EXPECT_EQ(res.accepted, 1);
    EXPECT_THROW(dopri5_integrate<1>(rhs, 1.0, V(1.0), 0.0, {}, [](const auto&) { return true; }), std::invalid_argument);
    EXPECT_THROW(dopri5_integrate<1>(rhs, 0.0, V(1.0), 1.0, {0.0, 1e-12}, [](const auto&) { return true; }),
                 std::invalid_argument);
}

TEST(Series, StartValues) {
    const auto s = series_start(ShrinkerODE(2), 1.0, 0.1);
    EXPECT_DOUBLE_EQ(s.f, 1.0 - 0.01 / 8.0);
    EXPECT_DOUBLE_EQ(s.fprime, -0.1 / 4.0);
    const auto z = series_start(ShrinkerODE(3), 0.0, 1e-6);
    EXPECT_EQ(z.f, 0.0);
    EXPECT_EQ(z.fprime, 0.0);
}

TEST(Ode, SphereSolvesProfileEquation) {
    for (int n = 1; n <= 4; ++n) {
        const ShrinkerODE ode(n);
        for (double r : {0.3, 0.8, 1.1}) {
            const double f = sphere_profile(n, r), fp = -r / f;
            const double h = 1e-4;
            const double fpp = (sphere_profile(n, r + h) - 2 * f + sphere_profile(n, r - h)) / (h * h);
            EXPECT_NEAR(ode.second_derivative(r, f, fp), fpp, 1e-5);
        }
    }
    EXPECT_THROW(ShrinkerODE(0), std::invalid_argument);
    EXPECT_DOUBLE_EQ(ShrinkerODE(4).default_r_max(), 6.0);
}

TEST(Shoot, SphereRegression) {
    for (int n = 1; n <= 6; ++n) {
        const double f0 = std::sqrt(2.0 * n);
        ShootConfig c;
        c.f0 = f0;
        const ShrinkerODE ode(n);
        const auto prof = shoot(ode, c);
        EXPECT_EQ(prof.termination, Termination::crossing);
        const auto res = find_intercept(prof);
        ASSERT_TRUE(res.r_alpha);
        EXPECT_NEAR(*res.r_alpha, f0, 1e-8) << "n=" << n;
        EXPECT_LT(ode_residual(ode, prof), 1e-8);
        double profile_err = 0.0;
        for (const auto& p : prof.samples)
            if (p.r < 0.9 * f0) profile_err = std::max(profile_err, std::abs(p.f - sphere_profile(n, p.r)));
        EXPECT_LT(profile_err, 1e-9) << "n=" << n;
    }
}

TEST(Shoot, ZeroHeightNeverCrosses) {
    ShootConfig c;
    c.f0 = 0.0;
    const auto prof = shoot(ShrinkerODE(2), c);
    EXPECT_EQ(prof.termination, Termination::horizon);
    const auto res = find_intercept(prof);
    EXPECT_EQ(res.status, InterceptStatus::no_crossing);
    EXPECT_FALSE(res.r_alpha);
    EXPECT_EQ(to_string(res.status), "no-crossing");
}

TEST(Shoot, SmallHeightStaysPositiveBeforeIntercept) {
    ShootConfig c;
    c.f0 = 0.1;
    const ShrinkerODE ode(2);
    const auto prof = shoot(ode, c);
    const auto res = find_intercept(prof);
    ASSERT_TRUE(res.r_alpha);
    EXPECT_GT(*res.r_alpha, 2.0);
    EXPECT_LT(*res.r_alpha, 2.0 * std::sqrt(2.0));
    EXPECT_GT(min_height_before(prof, *res.r_alpha), 0.0);
    EXPECT_LE(res.bracket_lo, *res.r_alpha);
    EXPECT_GE(res.bracket_hi, *res.r_alpha);
    EXPECT_LT(std::abs(res.f_at_root), 1e-9);
    EXPECT_LT(ode_residual(ode, prof), 1e-8);
}

TEST(Shoot, LiteralStartAgreesWithSeriesStart) {
    ShootConfig c;
    c.paper_start = true;
    EXPECT_NEAR(intercept(2, 0.1, c), intercept(2, 0.1), 1e-9);
}

TEST(Shoot, ConfigValidation) {
    ShootConfig c;
    c.r0 = 0.5;
    EXPECT_THROW(shoot(ShrinkerODE(2), c), std::invalid_argument);
    c = {};
    c.f0 = -1.0;
    EXPECT_THROW(shoot(ShrinkerODE(2), c), std::invalid_argument);
    c = {};
    c.rel_tol = 0.0;
    EXPECT_THROW(shoot(ShrinkerODE(2), c), std::invalid_argument);
}

TEST(Shoot, InsensitiveToStartRadius) {
    const double ref = intercept(2, 0.1);
    for (double r0 : {1e-7, 1e-8}) {
        ShootConfig c;
        c.r0 = r0;
        EXPECT_NEAR(intercept(2, 0.1, c), ref, 1e-6);
    }
}

// Halving the tolerance must not increase the change in r_alpha.
TEST(Shoot, ConvergesUnderToleranceRefinement) {
    std::vector<double> r;
    for (double tol = 1e-6; tol > 1e-7; tol *= 0.5) {
        ShootConfig c;
        c.rel_tol = tol;
        c.abs_tol = tol * 1e-2;
        r.push_back(intercept(2, 0.1, c));
    }
    ASSERT_EQ(r.size(), 4u);
    for (std::size_t i = 2; i < r.size(); ++i)
        EXPECT_LE(std::abs(r[i] - r[i - 1]), std::abs(r[i - 1] - r[i - 2]));
}

TEST(Sweep, SingleRowHasNoLimit) {
    const auto sw = sweep(ShrinkerODE(1), {std::sqrt(2.0)}, {});
    ASSERT_EQ(sw.rows.size(), 1u);
    EXPECT_NEAR(*sw.rows[0].r_alpha, std::sqrt(2.0), 1e-8);
    EXPECT_FALSE(sw.extrapolated_limit);
}

TEST(Sweep, RejectsBadGrids) {
    EXPECT_THROW(sweep(ShrinkerODE(2), {0.01, 0.1}, {}), std::invalid_argument);
    EXPECT_THROW(sweep(ShrinkerODE(2), {0.1, 0.0}, {}), std::invalid_argument);
}

TEST(Sweep, InterceptIncreasesAsHeightShrinks) {
    const auto sw = sweep(ShrinkerODE(2), {1e-1, 1e-2, 1e-3, 1e-4}, {});
    EXPECT_TRUE(sw.increasing);
    for (const auto& row : sw.rows) EXPECT_GT(row.min_height, 0.0);
}

// The f0 -> 0 limit is the first Kummer zero, which lies below 2 sqrt(n).
TEST(Sweep, LimitMatchesKummerZero) {
    for (int n : {2, 3}) {
        const auto sw = sweep(ShrinkerODE(n), {1e-1, 1e-2, 1e-3, 1e-4}, {});
        ASSERT_TRUE(sw.extrapolated_limit);
        const double zero = kummer_first_zero(n);
        EXPECT_NEAR(*sw.extrapolated_limit, zero, 1e-6) << "n=" << n;
        EXPECT_LT(zero, 2.0 * std::sqrt(n) - 0.3);
    }
}

TEST(Neville, ExactForQuadratic) {
    EXPECT_NEAR(neville_at_zero({1.0, 2.0, 3.0}, {6.0, 11.0, 18.0}), 3.0, 1e-12);
}

TEST(RadialIdentity, HoldsAlongProfile) {
    EXPECT_LT(radial_identity_residual(2, 1.3), 1e-12);
    EXPECT_LT(radial_identity_residual(3, 0.2), 1e-12);
    ShootConfig c;
    const auto prof = shoot(ShrinkerODE(3), c);
    EXPECT_LT(radial_identity_check(3, prof), 1e-10);
}

TEST(Csv, ProfileAndSweepFormat) {
    ShootConfig c;
    c.f0 = 2.0;
    const auto prof = shoot(ShrinkerODE(2), c);
    std::ostringstream os, mirrored;
    write_profile_csv(os, prof);
    write_profile_csv(mirrored, prof, true);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("r,f,fprime\n", 0), 0u);
    const auto lines = std::count(s.begin(), s.end(), '\n');
    EXPECT_EQ(lines, static_cast<long>(prof.samples.size()) + 1);
    const std::string m = mirrored.str();
    EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 2 * static_cast<long>(prof.samples.size()) + 1);
    EXPECT_EQ(m.substr(11, 1), "-");

    std::ostringstream sw;
    write_sweep_csv(sw, sweep(ShrinkerODE(2), {2.0}, {}));
    EXPECT_EQ(sw.str().rfind("f0,r_alpha,status\n2,", 0), 0u);
    EXPECT_NE(sw.str().find(",found\n"), std::string::npos);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
