#include <shrinklab/spaceform.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>


using namespace shrinklab;

namespace {
const Curvature kAll[] = {Curvature::hyperbolic, Curvature::flat, Curvature::spherical};

double radial_arclength(Curvature k, double t) {
    const double kv = kappa_value(k);
    auto integrand = [kv](double u) { return 2.0 / (1.0 + kv * u * u); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t, 10, 1e-14);
}
} // namespace

TEST(Trig, SatisfiesDefiningRelations) {
    for (Curvature k : kAll) {
        const double kv = kappa_value(k);
        for (double r : {0.1, 0.5, 1.2}) {
            EXPECT_NEAR(cs(k, r) * cs(k, r) + kv * sn(k, r) * sn(k, r), 1.0, 1e-14) << to_string(k);
            EXPECT_NEAR(tn(k, r), sn(k, r) / cs(k, r), 1e-14);
            EXPECT_NEAR(ct(k, r) * tn(k, r), 1.0, 1e-14);
            EXPECT_DOUBLE_EQ(trig(k, TrigFn::sn, r), sn(k, r));
            EXPECT_DOUBLE_EQ(trig(k, TrigFn::ct, r), ct(k, r));
            // sn' = cs by central difference
            const double h = 1e-5;
            EXPECT_NEAR((sn(k, r + h) - sn(k, r - h)) / (2 * h), cs(k, r), 1e-9);
        }
    }
}

TEST(Trig, InversesRoundTrip) {
    for (Curvature k : kAll) {
        for (double r : {0.05, 0.4, 0.9}) {
            EXPECT_NEAR(asn(k, sn(k, r)), r, 1e-13);
            EXPECT_NEAR(atn(k, tn(k, r)), r, 1e-13);
        }
    }
}

TEST(Trig, DomainErrors) {
    EXPECT_THROW(ct(Curvature::flat, 0.0), std::domain_error);
    EXPECT_THROW(ct(Curvature::hyperbolic, 0.0), std::domain_error);
    EXPECT_THROW(ct(Curvature::spherical, 0.0), std::domain_error);
    EXPECT_THROW(trig(Curvature::flat, TrigFn::ct, 0.0), std::domain_error);
}

TEST(Trig, HyperbolicAtnRejectsUnitArgument) {
    EXPECT_THROW(atn(Curvature::hyperbolic, 1.0), std::domain_error);
    EXPECT_THROW(atn(Curvature::hyperbolic, -1.5), std::domain_error);
    EXPECT_NO_THROW(atn(Curvature::spherical, 5.0));
}

TEST(Curvature, FromIntAndNames) {
    EXPECT_EQ(curvature_from_int(-1), Curvature::hyperbolic);
    EXPECT_EQ(curvature_from_int(0), Curvature::flat);
    EXPECT_EQ(curvature_from_int(1), Curvature::spherical);
    EXPECT_THROW(curvature_from_int(2), std::invalid_argument);
    EXPECT_EQ(to_string(Curvature::spherical), "spherical");
    EXPECT_EQ(kappa_value(Curvature::hyperbolic), -1.0);
}

TEST(Chart, DomainAndMetric) {
    SpaceFormChart hyp(Curvature::hyperbolic, 3);
    Vec x(3);
    x << 0.3, -0.2, 0.1;
    EXPECT_TRUE(hyp.contains(x));
    EXPECT_FALSE(hyp.contains(Vec::Constant(3, 0.9)));
    EXPECT_THROW(hyp.require_inside(Vec::Constant(3, 0.9)), std::domain_error);
    EXPECT_THROW(hyp.require_inside(Vec::Zero(2)), std::invalid_argument);
    EXPECT_THROW(SpaceFormChart(Curvature::flat, 0), std::invalid_argument);

    const double a = 2.0 / (1.0 - x.squaredNorm());
    EXPECT_NEAR((hyp.metric(x) - a * a * Mat::Identity(3, 3)).norm(), 0.0, 1e-14);
    SpaceFormChart flat(Curvature::flat, 2);
    EXPECT_NEAR(flat.conformal_factor(Vec::Constant(2, 7.0)), 2.0, 0.0);
}

TEST(Chart, QuadricMembership) {
    Vec x(3);
    x << 0.4, 0.1, -0.3;
    const Vec S = SpaceFormChart(Curvature::spherical, 3).to_quadric(x);
    EXPECT_NEAR(S.squaredNorm(), 1.0, 1e-14);
    const Vec H = SpaceFormChart(Curvature::hyperbolic, 3).to_quadric(x);
    EXPECT_NEAR(H(3) * H(3) - H.head(3).squaredNorm(), 1.0, 1e-13);
    EXPECT_GT(H(3), 0.0);
    const Vec F = SpaceFormChart(Curvature::flat, 3).to_quadric(x);
    EXPECT_NEAR((F.head(3) - 2.0 * x).norm(), 0.0, 1e-15);
    EXPECT_EQ(F(3), 1.0);
}

TEST(Distance, CenterMatchesRadialArclength) {
    for (Curvature k : kAll) {
        SpaceFormChart chart(k, 3);
        for (double t : {0.1, 0.5, 0.8}) {
            Vec x = Vec::Zero(3);
            x(1) = t;
            const double exact = radial_arclength(k, t);
            EXPECT_NEAR(distance_to_center(chart, x), exact, 1e-8 * exact) << to_string(k) << " t=" << t;
            EXPECT_NEAR(distance_between(chart, x, Vec::Zero(3)), exact, 1e-12 * std::max(1.0, exact));
        }
    }
}

TEST(Distance, BetweenIsSymmetricWithTriangleInequality) {
    for (Curvature k : kAll) {
        SpaceFormChart chart(k, 3);
        Vec a(3), b(3), c(3);
        a << 0.1, 0.2, -0.3;
        b << -0.4, 0.1, 0.2;
        c << 0.3, -0.5, 0.1;
        EXPECT_NEAR(distance_between(chart, a, b), distance_between(chart, b, a), 1e-15);
        EXPECT_LE(distance_between(chart, a, c),
                  distance_between(chart, a, b) + distance_between(chart, b, c) + 1e-14);
        EXPECT_EQ(distance_between(chart, a, a), 0.0);
    }
}

// The hyperplane {x_0 = 0} is totally geodesic, so the nearest point to
// (a, b e_1) lies on the line {(0, t e_1)}; a coarse scan brackets the
// global minimum and Brent refines it.
TEST(Distance, HyperplaneMatchesMinimisation) {
    for (Curvature k : kAll) {
        SpaceFormChart chart(k, 3);
        for (auto [a, b] : {std::pair{0.3, 0.2}, std::pair{-0.5, 0.4}, std::pair{0.1, -0.6}}) {
            Vec x = Vec::Zero(3);
            x(0) = a;
            x(1) = b;
            auto dist_to_foot = [&](double t) {
                Vec y = Vec::Zero(3);
                y(1) = t;
                return distance_between(chart, x, y);
            };
            const double hi = k == Curvature::hyperbolic ? 0.999 : 20.0;
            const int cells = 4000;
            const double w = 2.0 * hi / cells;
            double t_best = -hi;
            for (int i = 0; i <= cells; ++i)
                if (dist_to_foot(-hi + i * w) < dist_to_foot(t_best)) t_best = -hi + i * w;
            const double a_lo = std::max(-hi, t_best - w), a_hi = std::min(hi, t_best + w);
            const double d_min = boost::math::tools::brent_find_minima(dist_to_foot, a_lo, a_hi, 50).second;
            EXPECT_NEAR(distance_to_hyperplane(chart, x), d_min, 1e-6) << to_string(k);
        }
        EXPECT_EQ(distance_to_hyperplane(chart, Vec::Unit(3, 2) * 0.3), 0.0);
    }
}

TEST(GeodesicBallTest, ModelRadiusAndValidation) {
    const GeodesicBall b(Curvature::spherical, 1.0, Vec::Zero(3));
    EXPECT_NEAR(b.model_radius(), std::tan(0.5), 1e-15);
    // the model radius is the Euclidean radius of the ball centred at 0
    Vec edge = Vec::Zero(3);
    edge(0) = b.model_radius();
    EXPECT_NEAR(distance_to_center(SpaceFormChart(Curvature::spherical, 3), edge), 1.0, 1e-14);
    EXPECT_NEAR(GeodesicBall(Curvature::hyperbolic, 2.0, Vec::Zero(2)).model_radius(), std::tanh(1.0), 1e-15);
    EXPECT_THROW(GeodesicBall(Curvature::flat, 0.0, Vec::Zero(2)), std::invalid_argument);
    EXPECT_THROW(GeodesicBall(Curvature::spherical, 4.0, Vec::Zero(2)), std::invalid_argument);
}
