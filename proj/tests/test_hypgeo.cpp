#include <hypcocycle/hypgeo.hpp>
#include <hypcocycle/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace hypcocycle;

namespace {

// Oracle: inverts R(r) = log((1 + r) / (1 - r)) by bisection.
double bisect_radius(double R)
{
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::log((1.0 + mid) / (1.0 - mid)) < R)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Oracle: moves p to 0 with z -> (z - p) / (1 - conj(p) z), then uses the radial formula.
double mobius_reduced_distance(Complex p, Complex q)
{
    const double r = std::abs((q - p) / (1.0 - std::conj(p) * q));
    return std::log((1.0 + r) / (1.0 - r));
}

DiscPoint random_point(RngStream& rng, double max_radius = 0.95)
{
    return DiscPoint(std::polar(max_radius * std::sqrt(rng.uniform()), kTwoPi * rng.uniform()));
}

MobiusMap random_map(RngStream& rng)
{
    return MobiusMap::rotation(kTwoPi * rng.uniform()) * MobiusMap::translation(rng.uniform(), 4.0 * rng.uniform());
}

} // namespace

TEST(DiscPoint, RejectsBoundaryAndNonFinite)
{
    EXPECT_THROW(DiscPoint(1.0, 0.0), GeometryError);
    EXPECT_THROW(DiscPoint(0.0, -1.0 + 1e-16), GeometryError);
    EXPECT_THROW(DiscPoint(std::nan(""), 0.0), GeometryError);
    EXPECT_THROW(DiscPoint::polar(-1.0, 0.0), GeometryError);
    EXPECT_NO_THROW(DiscPoint(0.999, 0.0));
}

TEST(DiscPoint, PolarKeepsLargeRadiusExactly)
{
    const DiscPoint p = DiscPoint::polar(80.0, 0.3);
    EXPECT_EQ(p.radius(), 80.0);
    EXPECT_NEAR(dist_P(DiscPoint{}, p), 80.0, 1e-10);
}

TEST(Distance, Examples)
{
    EXPECT_EQ(dist_P(DiscPoint{}, DiscPoint{}), 0.0);
    EXPECT_NEAR(dist_P(DiscPoint{}, DiscPoint(0.5, 0.0)), std::log(3.0), 1e-12);
    const double oracle = mobius_reduced_distance({0.3, 0.0}, {0.0, 0.3});
    EXPECT_NEAR(dist_P(DiscPoint(0.3, 0.0), DiscPoint(0.0, 0.3)), oracle, 1e-12);
}

TEST(Distance, AgreesWithMobiusOracleOnRandomPairs)
{
    RngStream rng(1, 0);
    for (int i = 0; i < 500; ++i) {
        const DiscPoint p = random_point(rng), q = random_point(rng);
        EXPECT_NEAR(dist_P(p, q), mobius_reduced_distance(p.z(), q.z()), 1e-9);
    }
}

TEST(Distance, FarPointsUsePolarFormConsistently)
{
    const DiscPoint p = DiscPoint::polar(30.0, 0.1);
    const DiscPoint q = DiscPoint::polar(25.0, 0.1);
    EXPECT_NEAR(dist_P(p, q), 5.0, 1e-9);
    EXPECT_NEAR(dist_P(p, DiscPoint{}), 30.0, 1e-9);
}

TEST(RadiusConversion, Examples)
{
    EXPECT_EQ(radius_for_R(0.0), 0.0);
    EXPECT_NEAR(radius_for_R(std::log(3.0)), 0.5, 1e-15);
    EXPECT_NEAR(radius_for_R(2.0), bisect_radius(2.0), 1e-14);
    EXPECT_NEAR(radius_for_R(2.0), 0.7615942, 1e-7);
    EXPECT_THROW(radius_for_R(-1.0), GeometryError);
    EXPECT_THROW(R_for_radius(1.0), GeometryError);
}

TEST(RadiusConversion, RoundTrip)
{
    for (double r : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99})
        EXPECT_NEAR(radius_for_R(dist_P(DiscPoint{}, DiscPoint(r, 0.0))), r, 1e-12) << "r = " << r;
}

TEST(GeodesicRay, Examples)
{
    EXPECT_EQ(geodesic_eval({DiscPoint{}, 0.37}, 0.0).z(), Complex(0.0, 0.0));
    const DiscPoint up = geodesic_eval({DiscPoint{}, 0.25}, std::log(3.0));
    EXPECT_NEAR(up.re(), 0.0, 1e-15);
    EXPECT_NEAR(up.im(), 0.5, 1e-15);
    const DiscPoint left = geodesic_eval({DiscPoint{}, 0.5}, 2.0);
    EXPECT_NEAR(left.re(), -bisect_radius(2.0), 1e-14);
    EXPECT_NEAR(left.im(), 0.0, 1e-14);
}

TEST(GeodesicRay, NonOriginBaseStartsAtBase)
{
    const DiscPoint base(0.2, -0.4);
    const DiscPoint p = geodesic_eval({base, 0.6}, 0.0);
    EXPECT_NEAR(std::abs(p.z() - base.z()), 0.0, 1e-15);
}

TEST(GeodesicRay, UnitSpeedOnGrid)
{
    const DiscPoint bases[] = {DiscPoint{}, DiscPoint(0.5, 0.3), DiscPoint(-0.7, 0.1)};
    for (const auto& base : bases)
        for (double theta = 0.0; theta < 1.0; theta += 0.125)
            for (double r1 : {0.0, 0.5, 2.0, 7.0})
                for (double r2 : {0.3, 3.0, 12.0}) {
                    const GeodesicRay ray{base, theta};
                    EXPECT_NEAR(dist_P(geodesic_eval(ray, r1), geodesic_eval(ray, r2)), std::abs(r1 - r2), 1e-10);
                }
}

TEST(Mobius, Examples)
{
    const DiscPoint p(0.3, 0.2);
    EXPECT_EQ(mobius_apply(MobiusMap::identity(), p).z(), p.z());
    const DiscPoint q = MobiusMap::rotation(0.5 * std::numbers::pi)(DiscPoint(0.5, 0.0));
    EXPECT_NEAR(q.re(), 0.0, 1e-15);
    EXPECT_NEAR(q.im(), 0.5, 1e-15);
    const DiscPoint t = mobius_translation(0.0, 1.0)(DiscPoint{});
    EXPECT_NEAR(t.re(), bisect_radius(1.0), 1e-14);
    EXPECT_NEAR(t.re(), 0.4621172, 1e-7);
}

TEST(Mobius, NormalizationAndInverse)
{
    RngStream rng(2, 0);
    for (int i = 0; i < 200; ++i) {
        const MobiusMap m = random_map(rng) * random_map(rng);
        EXPECT_NEAR(std::norm(m.a()) - std::norm(m.b()), 1.0, 1e-10);
        const DiscPoint p = random_point(rng);
        EXPECT_NEAR(std::abs(mobius_inverse(m)(m(p)).z() - p.z()), 0.0, 1e-10);
        EXPECT_LT(mobius_compose(m, mobius_inverse(m)).distance_to(MobiusMap::identity()), 1e-10);
    }
}

TEST(Mobius, CompositionAppliesInnerFirst)
{
    const MobiusMap outer = MobiusMap::translation(0.1, 1.5);
    const MobiusMap inner = MobiusMap::rotation(0.7) * MobiusMap::translation(0.6, 0.4);
    const DiscPoint p(0.1, 0.35);
    EXPECT_NEAR(std::abs(mobius_compose(outer, inner)(p).z() - outer(inner(p)).z()), 0.0, 1e-14);
}

TEST(Property, IsometryInvariance)
{
    RngStream rng(3, 0);
    for (int i = 0; i < 1000; ++i) {
        const MobiusMap m = random_map(rng);
        const DiscPoint p = random_point(rng, 0.9), q = random_point(rng, 0.9);
        EXPECT_NEAR(dist_P(m(p), m(q)), dist_P(p, q), 1e-10);
    }
}

TEST(Property, TriangleInequality)
{
    RngStream rng(4, 0);
    for (int i = 0; i < 1000; ++i) {
        const DiscPoint a = random_point(rng, 0.999), b = random_point(rng, 0.999), c = random_point(rng, 0.999);
        EXPECT_GE(dist_P(a, b) + dist_P(b, c) - dist_P(a, c), -1e-10);
    }
}

TEST(GeodesicStep, MovesExactlyTheRequestedLength)
{
    RngStream rng(5, 0);
    for (int i = 0; i < 300; ++i) {
        const DiscPoint p = DiscPoint::polar(8.0 * rng.uniform(), kTwoPi * rng.uniform());
        const double len = 0.5 * rng.uniform();
        const GeodesicStep s = geodesic_step(p, len, kTwoPi * rng.uniform());
        EXPECT_NEAR(dist_P(p, s.point), len, 1e-9);
        EXPECT_NEAR(std::remainder(s.point.angle() - p.angle() - s.angle_change, kTwoPi), 0.0, 1e-9);
    }
}

TEST(GeodesicStep, FarFromOriginKeepsLengthViaAngleChange)
{
    // Oracle: haversine form of the law of cosines, fed with the reported
    // angle change since the absolute angles cannot resolve it.
    RngStream rng(6, 0);
    for (int i = 0; i < 300; ++i) {
        const DiscPoint p = DiscPoint::polar(12.0 + 30.0 * rng.uniform(), kTwoPi * rng.uniform());
        const double len = 0.5 * rng.uniform();
        const GeodesicStep s = geodesic_step(p, len, kTwoPi * rng.uniform());
        const double r1 = p.radius(), r2 = s.point.radius();
        const double h = std::sinh(0.5 * (r1 - r2));
        const double a = std::sin(0.5 * s.angle_change);
        const double d = 2.0 * std::asinh(std::sqrt(h * h + std::sinh(r1) * std::sinh(r2) * a * a));
        EXPECT_NEAR(d, len, 1e-9 * std::max(1.0, len));
    }
}

TEST(GeodesicStep, ExpMapOfZeroIsIdentity)
{
    const DiscPoint p(0.4, 0.1);
    EXPECT_EQ(exp_map(p, {0.0, 0.0}).z(), p.z());
}
