#include <hypcocycle/lyapunov.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hypcocycle;

namespace {

const FuchsianGroup& group()
{
    static const FuchsianGroup g = build_genus2();
    return g;
}

Vector vec(std::initializer_list<Complex> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (Complex x : xs)
        v(i++) = x;
    return v;
}

Matrix column(const Vector& v)
{
    Matrix m(v.size(), 1);
    m.col(0) = v;
    return m;
}

const PathOptions serial{0.01, 1};

} // namespace

TEST(Benettin, TrivialRepresentationHasOneZeroBlock)
{
    const SpectrumReport s = benettin_spectrum(Representation::trivial(3), 5.0, 0.01, 10, 20, RngStream(50, 0), 1);
    ASSERT_EQ(s.exponents.size(), 1u);
    EXPECT_EQ(s.exponents[0], 0.0);
    EXPECT_EQ(s.multiplicities[0], 3);
    EXPECT_EQ(s.exponent_sum.mean, 0.0);
    EXPECT_EQ(brownian_rate(Representation::trivial(3), vec({1, 2, 3}), 2.0, 10, RngStream(50, 1), serial).mean, 0.0);
    EXPECT_EQ(brownian_norm_rate(Representation::trivial(3), 2.0, 10, RngStream(50, 2), serial).mean, 0.0);
}

TEST(Benettin, DiagonalPairIsSymmetric)
{
    const SpectrumReport s = benettin_spectrum(Representation::diagonal({2.0, 0.5}), 20.0, 0.01, 10, 300, RngStream(51, 0), 1);
    ASSERT_EQ(s.dim(), 2);
    EXPECT_GT(s.raw_exponents[0], 0.0);
    EXPECT_NEAR(s.raw_exponents[0], -s.raw_exponents[1], 1e-12);
    EXPECT_NEAR(s.exponent_sum.mean, 0.0, 1e-12);
}

TEST(Benettin, DiagonalTripleMatchesPerAxisOracle)
{
    // With the standard frame the QR stays diagonal, so per path the sorted
    // exponents are (|k|, 0, -|k|) log 3 / t for the signed count k of first
    // generator crossings. The norm rate along the same paths sees |k| log 3 / t.
    const Representation rep = Representation::diagonal({3.0, 1.0, 1.0 / 3.0});
    const RngStream rng(52, 0);
    const SpectrumReport s = benettin_spectrum(rep, 20.0, 0.01, 10, 200, rng, 1);
    const Estimate oracle = brownian_norm_rate(rep, 20.0, 200, rng, serial);
    ASSERT_EQ(s.dim(), 3);
    EXPECT_NEAR(s.raw_exponents[0], oracle.mean, 1e-9);
    EXPECT_NEAR(s.raw_exponents[1], 0.0, 1.96 * s.raw_std_errors[1] + 1e-12);
    EXPECT_NEAR(s.raw_exponents[0], -s.raw_exponents[2], 1e-12);
}

TEST(Benettin, WorkerCountDoesNotChangeResult)
{
    const Representation h = Representation::fuchsian_holonomy(group());
    const SpectrumReport a = benettin_spectrum(h, 3.0, 0.01, 10, 8, RngStream(53, 0), 1);
    const SpectrumReport b = benettin_spectrum(h, 3.0, 0.01, 10, 8, RngStream(53, 0), 3);
    EXPECT_EQ(a.raw_exponents, b.raw_exponents);
    EXPECT_EQ(a.raw_std_errors, b.raw_std_errors);
}

TEST(Benettin, HolonomySpectrumIsSymmetricAndPositive)
{
    const SpectrumReport s =
        benettin_spectrum(Representation::fuchsian_holonomy(group()), 10.0, 0.01, 10, 60, RngStream(54, 0), 1);
    ASSERT_EQ(s.exponents.size(), 2u);
    EXPECT_GT(s.top(), 0.3);
    EXPECT_NEAR(s.top(), -s.bottom(), 1e-9);
    EXPECT_NEAR(s.exponent_sum.mean, 0.0, 1e-9);
}

TEST(Benettin, RejectsBadArguments)
{
    const Representation rep = Representation::trivial(2);
    EXPECT_THROW(benettin_spectrum(rep, 5.0, 0.01, 10, 1, RngStream()), LyapunovError);
    EXPECT_THROW(benettin_spectrum(rep, 5.0, 0.01, 0, 10, RngStream()), LyapunovError);
    EXPECT_THROW(benettin_spectrum(rep, 5.0, 0.01, 200, 10, RngStream()), LyapunovError);
    EXPECT_THROW(brownian_rate(rep, vec({0, 0}), 5.0, 10, RngStream()), LyapunovError);
    EXPECT_THROW(brownian_rate(rep, vec({1, 0}), 0.5, 10, RngStream()), LyapunovError);
    const Matrix id = Matrix::Identity(2, 2);
    Matrix a(2, 2), b(2, 2);
    a << 1, 1, 0, 1;
    b << 1, 0, 1, 1;
    const Representation skew(Field::real, {a, b, id, id});
    EXPECT_THROW(benettin_spectrum(skew, 5.0, 0.01, 10, 10, RngStream()), CocycleError);
}

TEST(BrownianRate, DominantComponentWins)
{
    // Along each path log|A (e1 + e2)| differs from log||A|| by at most log sqrt 2.
    const Representation rep = Representation::diagonal({2.0, 0.5});
    const double t = 20.0;
    const Estimate mixed = brownian_rate(rep, vec({1, 1}), t, 200, RngStream(55, 0), serial);
    const Estimate norm = brownian_norm_rate(rep, t, 200, RngStream(55, 0), serial);
    EXPECT_LE(mixed.mean, norm.mean + 1e-12);
    EXPECT_GE(mixed.mean, norm.mean - 0.5 * std::log(2.0) / t - 1e-12);

    // Generic vectors under the holonomy share the top rate.
    const Representation h = Representation::fuchsian_holonomy(group());
    const Estimate e1 = brownian_rate(h, vec({1, 0}), 10.0, 100, RngStream(55, 1), serial);
    const Estimate e12 = brownian_rate(h, vec({1, 1}), 10.0, 100, RngStream(55, 1), serial);
    EXPECT_NEAR(e1.mean, e12.mean, 3.0 * std::hypot(e1.std_error, e12.std_error));
}

TEST(BrownianRate, UnipotentGrowthIsSubexponential)
{
    Matrix u(2, 2);
    u << 1, 1, 0, 1;
    const Representation rep = Representation::single(u);
    const Estimate r10 = brownian_norm_rate(rep, 10.0, 200, RngStream(56, 0), serial);
    const Estimate r40 = brownian_norm_rate(rep, 40.0, 200, RngStream(56, 1), serial);
    EXPECT_GT(r10.mean, 0.0);
    EXPECT_LT(r40.mean, r10.mean);
    EXPECT_LT(r40.mean, 0.05);
}

TEST(Geodesic, NormRateDominatesVectorRate)
{
    const Representation h = Representation::fuchsian_holonomy(group());
    RngStream rng(57, 0);
    for (int i = 0; i < 20; ++i) {
        const double theta = rng.uniform();
        const Vector v = vec({Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal())});
        EXPECT_LE(geodesic_rate(h, theta, 6.0, v, group()).value, geodesic_norm_rate(h, theta, 6.0, group()).value + 1e-12);
    }
}

TEST(Geodesic, GrowthIsSubadditive)
{
    // A(2R) = A(R -> 2R) A(R), so the extra growth is bounded by the tail's norm.
    const Representation h = Representation::fuchsian_holonomy(group());
    const double R = 4.0;
    const Vector v = vec({1, Complex(0.3, -0.2)});
    for (double theta : {0.0, 0.11, 0.37, 0.5, 0.83}) {
        const double head = R * geodesic_rate(h, theta, R, v, group()).value;
        const double full = 2.0 * R * geodesic_rate(h, theta, 2.0 * R, v, group()).value;
        const GeodesicRay ray{DiscPoint{}, theta};
        const double tail = cocycle_between(h, geodesic_eval(ray, R), geodesic_eval(ray, 2.0 * R), group()).log_norm();
        EXPECT_LE(full - head, tail + 1e-9) << "theta " << theta;
        EXPECT_GE(full - head, -tail - 1e-9) << "theta " << theta;
    }
}

TEST(ExpansionInterval, LineAndTrivialCases)
{
    const Representation h = Representation::fuchsian_holonomy(group());
    const Interval line = expansion_interval(h, 3.0, column(vec({1, 2})), 64, 64, 1);
    EXPECT_EQ(line.a, line.b);
    const Interval triv = expansion_interval(Representation::trivial(2), 3.0, Matrix::Identity(2, 2), 64, 64, 1);
    EXPECT_EQ(triv.a, 0.0);
    EXPECT_EQ(triv.b, 0.0);
    EXPECT_THROW(expansion_interval(h, 3.0, Matrix::Identity(2, 2), 32, 64, 1), LyapunovError);
    EXPECT_THROW(expansion_interval(h, 3.0, Matrix::Identity(3, 3), 64, 64, 1), LyapunovError);
}

TEST(ExpansionInterval, FullSpaceBracketsLine)
{
    const Representation rep = Representation::diagonal({2.0, 0.5});
    const Interval full = expansion_interval(rep, 6.0, Matrix::Identity(2, 2), 64, 64, 1);
    const Interval e1 = expansion_interval(rep, 6.0, column(vec({1, 0})), 64, 64, 1);
    EXPECT_LE(full.a, e1.a + 1e-9);
    EXPECT_GE(full.b, e1.b - 1e-9);
}

TEST(ExpectationFunctions, LineAndTrivialCases)
{
    const Representation h = Representation::fuchsian_holonomy(group());
    const ExpectationInterval line = expectation_functions(h, column(vec({1, 0})), 2.0, 20, 64, RngStream(58, 0), serial);
    EXPECT_EQ(line.m, line.M);
    const ExpectationInterval triv =
        expectation_functions(Representation::trivial(2), Matrix::Identity(2, 2), 2.0, 20, 64, RngStream(58, 1), serial);
    EXPECT_EQ(triv.m, 0.0);
    EXPECT_EQ(triv.M, 0.0);
    EXPECT_THROW(expectation_functions(h, Matrix::Identity(2, 2), 0.5, 20, 64, RngStream()), LyapunovError);
}

TEST(ExpConversion, TrivialAndSharedStreams)
{
    const PathOptions opt{0.01, 1};
    const ComparisonReport triv =
        check_exp_conversion(Representation::trivial(2), vec({1, 0}), DiscPoint(0.2, 0.1), 1.0, 100, RngStream(59, 0), opt);
    EXPECT_EQ(triv.lhs, 0.0);
    EXPECT_EQ(triv.rhs, 0.0);
    EXPECT_TRUE(triv.passed);

    // At eta = 0 both sides are the same functional of the same paths.
    const ComparisonReport shared = check_exp_conversion(Representation::fuchsian_holonomy(group()),
                                                         vec({1, Complex(0, 0.5)}), DiscPoint{}, 1.0, 100,
                                                         RngStream(59, 1), opt, true);
    EXPECT_NEAR(shared.lhs, shared.rhs, 1e-10);
}

TEST(ExpConversion, AgreesAwayFromBase)
{
    const Representation rep = Representation::diagonal({2.0, 0.5});
    const DiscPoint eta = group().generator(1)(DiscPoint{});
    const ComparisonReport r = check_exp_conversion(rep, vec({1, 1}), eta, 2.0, 400, RngStream(60, 0), serial);
    EXPECT_LE(std::abs(r.difference()), 3.0 * r.combined_se() + 1e-12);
}

TEST(Shadowing, ZeroTimeRowsVanish)
{
    const ShadowingReport r = shadowing_report(40, {0.0, 5.0, 20.0}, 0.01, RngStream(61, 0), 10.0, 1);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].shadow_median, 0.0);
    EXPECT_EQ(r.rows[0].drift_q95, 0.0);
    EXPECT_EQ(r.final_time, 30.0);
    EXPECT_GT(r.rows[2].drift_ratio_median, 0.8);
    EXPECT_LT(r.rows[2].drift_ratio_median, 1.2);
    EXPECT_THROW(shadowing_report(40, {0.0, 5.0}, 0.01, RngStream(), 10.0, 1), LyapunovError);
}

TEST(Uniformity, SingleBinAndRotation)
{
    const UniformityReport one = direction_distribution_check(50, 40.0, 0.01, 1, RngStream(62, 0), 0.0, 1);
    EXPECT_EQ(one.counts, std::vector<std::size_t>{50});
    EXPECT_EQ(one.p_value, 1.0);
    EXPECT_TRUE(one.passed);

    // A shift by whole bins permutes the counts and keeps the statistic.
    const std::size_t bins = 16;
    const UniformityReport base = direction_distribution_check(300, 40.0, 0.02, bins, RngStream(62, 1), 0.0, 1);
    const UniformityReport moved =
        direction_distribution_check(300, 40.0, 0.02, bins, RngStream(62, 1), kTwoPi * 3.0 / bins, 1);
    EXPECT_NEAR(base.chi_square, moved.chi_square, 1e-9);
    for (std::size_t b = 0; b < bins; ++b)
        EXPECT_EQ(base.counts[b], moved.counts[(b + 3) % bins]);
}

TEST(SphereSearch, FindsExtremesOfKnownQuadratic)
{
    auto first_share = [](const Vector& c) { return std::norm(c(0)) / c.squaredNorm(); };
    const SphereExtremes real = optimize_on_sphere(first_share, 3, Field::real, 64);
    EXPECT_NEAR(real.max_value, 1.0, 1e-6);
    EXPECT_NEAR(real.min_value, 0.0, 1e-6);
    const SphereExtremes cplx = optimize_on_sphere(first_share, 2, Field::complex, 64);
    EXPECT_NEAR(cplx.max_value, 1.0, 1e-6);
    EXPECT_NEAR(cplx.min_value, 0.0, 1e-6);
    EXPECT_NEAR(cplx.argmax.norm(), 1.0, 1e-12);
}

TEST(Clustering, MergesCloseExponents)
{
    // Exact diagonal samples: two rates within the gap floor and one far away.
    std::vector<CocycleValue> values;
    const double t = 10.0;
    for (int i = 0; i < 5; ++i) {
        CocycleValue a = CocycleValue::identity(3);
        Matrix m = Matrix::Zero(3, 3);
        const double jitter = 0.001 * i;
        m(0, 0) = std::exp(t * (1.0 + jitter));
        m(1, 1) = std::exp(t * (0.995 + jitter));
        m(2, 2) = std::exp(-t * 2.0);
        a.left_multiply(m);
        values.push_back(a);
    }
    const SpectrumReport s = spectrum_from_values(values, t, "test", 0, 1);
    ASSERT_EQ(s.exponents.size(), 2u);
    EXPECT_EQ(s.multiplicities, (std::vector<int>{2, 1}));
    EXPECT_NEAR(s.exponents[0], 0.9995, 1e-9);
    EXPECT_NEAR(s.exponents[1], -2.0, 1e-9);
    EXPECT_NEAR(s.exponent_sum.mean, 1.0 + 0.995 + 0.004 - 2.0, 1e-9);
    EXPECT_EQ(s.oseledec_basis.rows(), 3);
}
