#pragma once

// Validation suites shared by `hypcocycle_cli validate` and the acceptance
// binary. Every suite returns named checks with a one-line detail.

#include <hypcocycle/cocycle.hpp>
#include <hypcocycle/diffusion.hpp>
#include <hypcocycle/hypgeo.hpp>
#include <hypcocycle/lyapunov.hpp>
#include <hypcocycle/random.hpp>
#include <hypcocycle/report.hpp>
#include <hypcocycle/surface.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace hypcocycle {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteResult {
    std::string name;
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool passed() const
    {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        return !checks.empty();
    }
};

inline std::string strprintf(const char* fmt, ...)
{
    char buf[1024];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

/// Shared settings and the cached reference spectrum of diag(2, 1/2).
struct ValidationContext {
    std::uint64_t seed = 0;
    unsigned workers = default_workers();
    double scale = 1.0; // multiplies Monte Carlo sample counts

    std::size_t scaled(std::size_t n, std::size_t minimum = 100) const
    {
        return std::max(minimum, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
    }

    RngStream stream(std::uint64_t index) const { return RngStream(seed, index); }

    const FuchsianGroup& group()
    {
        if (!group_)
            group_ = build_genus2();
        return *group_;
    }

    /// Benettin spectrum of diag(2, 1/2) at t = 60 (computed once).
    const SpectrumReport& reference_spectrum()
    {
        if (!reference_)
            reference_ = benettin_spectrum(Representation::diagonal({2.0, 0.5}), 60.0, 0.01, 10, scaled(2000),
                                           stream(600), workers);
        return *reference_;
    }

private:
    std::optional<FuchsianGroup> group_;
    std::optional<SpectrumReport> reference_;
};

/// Numerical floor for "within CI of zero" on quantities that vanish exactly
/// up to rounding.
inline constexpr double kRoundingFloor = 1e-12;

namespace detail {

inline double relative_matrix_error(const Matrix& a, const Matrix& b)
{
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double relative_error(const CocycleValue& a, const CocycleValue& b)
{
    // Compare at a common scale so that log-scaled values stay finite.
    const double s = std::max(a.log_scale, b.log_scale);
    return relative_matrix_error(a.matrix * std::exp(a.log_scale - s), b.matrix * std::exp(b.log_scale - s));
}

inline CocycleValue product(const CocycleValue& left, const CocycleValue& right)
{
    return {left.matrix * right.matrix, left.log_scale + right.log_scale};
}

/// The geodesic segment from `base` in direction theta sampled at spacing h.
inline LeafPath geodesic_segment(const DiscPoint& base, double theta, double length, double h)
{
    LeafPath p;
    p.step = h;
    const GeodesicRay ray{base, theta};
    const auto n = static_cast<std::size_t>(std::ceil(length / h - 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = std::min(length, static_cast<double>(k) * h);
        p.times.push_back(s);
        p.points.push_back(geodesic_eval(ray, s));
        p.angle_steps.push_back(0.0);
    }
    return p;
}

} // namespace detail

inline SuiteResult geometry_suite(ValidationContext& ctx)
{
    SuiteResult s{"geometry", {}, 0.0};
    RngStream rng = ctx.stream(200);
    auto random_point = [&](double rmax) {
        return DiscPoint(std::polar(rmax * std::sqrt(rng.uniform()), kTwoPi * rng.uniform()));
    };

    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const MobiusMap m =
            MobiusMap::translation(rng.uniform(), 3.0 * rng.uniform()) * MobiusMap::rotation(kTwoPi * rng.uniform());
        const DiscPoint p = random_point(0.95), q = random_point(0.95);
        worst = std::max(worst, std::abs(dist_P(m(p), m(q)) - dist_P(p, q)));
    }
    s.checks.push_back({"isometry invariance", worst <= 1e-10, strprintf("max error %.3g over 1000 maps (tol 1e-10)", worst)});

    worst = 0.0;
    const double lengths[] = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    for (const DiscPoint& base : {DiscPoint{}, DiscPoint(0.3, -0.2)})
        for (int k = 0; k < 10; ++k)
            for (double r1 : lengths)
                for (double r2 : lengths) {
                    const GeodesicRay ray{base, 0.1 * k};
                    const double d = dist_P(geodesic_eval(ray, r1), geodesic_eval(ray, r2));
                    worst = std::max(worst, std::abs(d - std::abs(r1 - r2)));
                }
    s.checks.push_back({"ray unit speed", worst <= 1e-10, strprintf("max error %.3g on the (theta, R1, R2) grid (tol 1e-10)", worst)});

    worst = 0.0;
    for (double r : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99})
        worst = std::max(worst, std::abs(radius_for_R(dist_P(DiscPoint{}, DiscPoint(r, 0.0))) - r));
    s.checks.push_back({"r <-> R round trip", worst <= 1e-12, strprintf("max error %.3g (tol 1e-12)", worst)});

    double slack = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const DiscPoint a = random_point(0.99), b = random_point(0.99), c = random_point(0.99);
        slack = std::min(slack, dist_P(a, b) + dist_P(b, c) - dist_P(a, c));
    }
    s.checks.push_back({"triangle inequality", slack >= -1e-10, strprintf("min slack %.3g over 1000 triples", slack)});

    const FuchsianGroup& g = ctx.group();
    const double residual = g.relator_residual();
    s.checks.push_back({"octagon relator residual", residual <= 1e-8, strprintf("%.3g (tol 1e-8)", residual)});
    const double angle_err = std::abs(g.interior_angle() - std::numbers::pi / 4.0);
    s.checks.push_back({"octagon interior angle", angle_err <= 1e-9, strprintf("|angle - pi/4| = %.3g", angle_err)});
    double pairing = 0.0, inverse = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const Side& from = g.side(k);
        const Side& to = g.side((k + 3) % 8 + 1);
        const MobiusMap& m = g.generator(k);
        // Orientation reverses: start maps to end.
        pairing = std::max({pairing, std::abs(m(from.start).z() - to.end.z()), std::abs(m(from.end).z() - to.start.z())});
        inverse = std::max(inverse, g.generator((k + 3) % 8 + 1).distance_to(m.inverse()));
    }
    s.checks.push_back({"side pairing", pairing <= 1e-9 && inverse <= 1e-10,
                        strprintf("endpoint error %.3g, inverse-pair error %.3g", pairing, inverse)});
    return s;
}

inline SuiteResult cocycle_law_suite(ValidationContext& ctx)
{
    SuiteResult s{"cocycle laws", {}, 0.0};
    const FuchsianGroup& g = ctx.group();
    const std::vector<Representation> reps{Representation::fuchsian_holonomy(g), Representation::diagonal({2.0, 0.5}),
                                           Representation::diagonal({3.0, 1.0, 1.0 / 3.0})};
    const RngStream rng = ctx.stream(100);
    constexpr std::size_t kPaths = 100;
    std::vector<double> identity_err(kPaths), split_err(kPaths), rediscretize_err(kPaths);
    parallel_for(kPaths, ctx.workers, [&](std::size_t i) {
        const LeafPath path = sample_path(DiscPoint{}, 2.0, 5e-5, rng.child(i));
        const std::size_t mid = path.size() / 2;
        const LeafPath head = path.head(mid);
        const LeafPath tail = path.shifted(mid);
        LeafPath coarse;
        coarse.step = 2.0 * path.step;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            coarse.times.push_back(path.times[k]);
            coarse.points.push_back(path.points[k]);
            coarse.angle_steps.push_back(0.0);
        }
        if ((path.size() - 1) % 2 != 0) {
            coarse.times.push_back(path.times.back());
            coarse.points.push_back(path.points.back());
            coarse.angle_steps.push_back(0.0);
        }
        double e0 = 0.0, e1 = 0.0, e2 = 0.0;
        for (const auto& rep : reps) {
            const CocycleValue id = evaluate(rep, path.head(0), g);
            e0 = std::max(e0, detail::relative_matrix_error(id.value(), Matrix::Identity(rep.dim(), rep.dim())));
            const CocycleValue full = evaluate(rep, path, g);
            e1 = std::max(e1, detail::relative_error(full, detail::product(evaluate(rep, tail, g), evaluate(rep, head, g))));
            e2 = std::max(e2, detail::relative_error(full, evaluate(rep, coarse, g)));
        }
        identity_err[i] = e0;
        split_err[i] = e1;
        rediscretize_err[i] = e2;
    });
    const double id_max = *std::max_element(identity_err.begin(), identity_err.end());
    const double split_max = *std::max_element(split_err.begin(), split_err.end());
    const double redisc_max = *std::max_element(rediscretize_err.begin(), rediscretize_err.end());
    s.checks.push_back({"identity law", id_max == 0.0, strprintf("max |A(omega,0) - I| = %.3g over %zu paths", id_max, kPaths)});
    s.checks.push_back({"multiplicative law (split at midpoint)", split_max <= 1e-10,
                        strprintf("max relative error %.3g over %zu paths x %zu reps (tol 1e-10)", split_max, kPaths, reps.size())});

    std::size_t word_mismatch = 0;
    double geo_err = 0.0;
    RngStream grng = ctx.stream(101);
    for (std::size_t i = 0; i < kPaths; ++i) {
        const DiscPoint base(std::polar(0.5 * std::sqrt(grng.uniform()), kTwoPi * grng.uniform()));
        const double theta = grng.uniform();
        const double length = 2.0 + 6.0 * grng.uniform();
        const LeafPath a = detail::geodesic_segment(base, theta, length, 0.05);
        const LeafPath b = detail::geodesic_segment(base, theta, length, 0.02);
        const DeckWord wa = track(a, g), wb = track(b, g);
        if (!(wa == wb))
            ++word_mismatch;
        for (const auto& rep : reps)
            geo_err = std::max(geo_err, detail::relative_error(evaluate(rep, a, g), evaluate(rep, b, g)));
    }
    const bool homotopy_ok = word_mismatch == 0 && geo_err <= 1e-10 && redisc_max <= 1e-10;
    s.checks.push_back({"homotopy law (re-discretization)", homotopy_ok,
                        strprintf("geodesic spacing 0.05 vs 0.02: %zu word mismatches, value error %.3g; "
                                  "Brownian paths subsampled x2: value error %.3g (tol 1e-10)",
                                  word_mismatch, geo_err, redisc_max)});
    return s;
}

/// Total mass of the heat kernel by radial quadrature.
inline double heat_kernel_mass(double t)
{
    auto integrand = [t](double rho) { return kTwoPi * std::sinh(rho) * heat_kernel(rho, t); };
    const double rho_max = t + 20.0 * std::sqrt(t) + 5.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, rho_max, 15, 1e-10);
}

inline SuiteResult heat_kernel_suite(ValidationContext&)
{
    SuiteResult s{"heat kernel", {}, 0.0};
    for (double t : {0.25, 1.0, 4.0}) {
        const double mass = heat_kernel_mass(t);
        s.checks.push_back({strprintf("heat kernel mass t=%g", t), mass >= 0.999 && mass <= 1.001,
                            strprintf("mass %.9f (band [0.999, 1.001])", mass)});
    }
    return s;
}

inline CheckResult comparison_check(const ComparisonReport& r)
{
    return {r.name, r.passed,
            strprintf("lhs %.6g +- %.2g, rhs %.6g +- %.2g, |diff| %.3g <= %.3g", r.lhs, r.lhs_se, r.rhs, r.rhs_se,
                      std::abs(r.difference()), r.tolerance)};
}

inline SuiteResult semigroup_suite(ValidationContext& ctx)
{
    SuiteResult s{"semigroup", {}, 0.0};
    const DiffuseOptions opt{DiscPoint{}, 0.01, ctx.workers};
    const std::size_t n = ctx.scaled(2000);
    s.checks.push_back(comparison_check(check_semigroup(fields::constant(1.0), 0.5, 0.5, n, ctx.stream(310), opt)));
    s.checks.push_back(comparison_check(check_semigroup(fields::exp_neg_distance(), 0.5, 0.5, n, ctx.stream(311), opt)));
    s.checks.push_back(comparison_check(check_semigroup(fields::real_part(), 1.0, 1.0, n, ctx.stream(312), opt)));
    return s;
}

inline SuiteResult dynkin_suite(ValidationContext& ctx)
{
    SuiteResult s{"dynkin", {}, 0.0};
    const DiffuseOptions opt{DiscPoint{}, 0.01, ctx.workers};
    const std::size_t n = ctx.scaled(20000);
    s.checks.push_back(comparison_check(check_dynkin(fields::constant(2.5), 1.0, n, ctx.stream(320), opt)));
    s.checks.push_back(comparison_check(check_dynkin(fields::real_part(), 1.0, n, ctx.stream(321), opt)));
    s.checks.push_back(comparison_check(check_dynkin(fields::distance_squared(), 1.0, n, ctx.stream(322), opt)));
    return s;
}

inline SuiteResult diffusion_suite(ValidationContext& ctx)
{
    SuiteResult s{"diffusion", {}, 0.0};
    for (auto* suite : {&heat_kernel_suite, &semigroup_suite, &dynkin_suite}) {
        const SuiteResult part = suite(ctx);
        s.checks.insert(s.checks.end(), part.checks.begin(), part.checks.end());
    }
    return s;
}

inline SuiteResult shadowing_suite(ValidationContext& ctx)
{
    SuiteResult s{"drift and shadowing", {}, 0.0};
    const std::size_t n = ctx.scaled(10000);
    const ShadowingReport r = shadowing_report(n, {20.0, 40.0, 80.0}, 0.01, ctx.stream(400), 10.0, ctx.workers);
    double median40 = 0.0;
    std::string table;
    for (const auto& row : r.rows) {
        if (row.t == 40.0)
            median40 = row.drift_ratio_median;
        table += strprintf(" t=%g: shadow q95 %.3f, drift q95 %.3f;", row.t, row.shadow_q95, row.drift_q95);
    }
    s.checks.push_back({"drift ratio median at t=40", median40 >= 0.92 && median40 <= 1.08,
                        strprintf("median dist/t = %.4f over %zu paths (band [0.92, 1.08])", median40, n)});
    s.checks.push_back({"normalized shadowing slope", r.shadow_slope <= kShadowingSlopeLimit && r.drift_slope <= kShadowingSlopeLimit,
                        strprintf("log-log slope of q95: shadow %.3f, drift %.3f (limit 0.1);%s", r.shadow_slope,
                                  r.drift_slope, table.c_str())});
    return s;
}

inline SuiteResult uniformity_suite(ValidationContext& ctx)
{
    SuiteResult s{"direction uniformity", {}, 0.0};
    const std::size_t n = ctx.scaled(10000);
    const UniformityReport r = direction_distribution_check(n, 40.0, 0.01, 32, ctx.stream(500), 0.0, ctx.workers);
    s.checks.push_back({"landing direction chi-square", r.passed,
                        strprintf("chi2 %.2f on %d dof, p = %.4f over %zu paths (need p > 0.001)", r.chi_square, r.dof,
                                  r.p_value, n)});
    return s;
}

inline SuiteResult spectrum_suite(ValidationContext& ctx)
{
    SuiteResult s{"spectrum cross-validation", {}, 0.0};
    const Representation rep = Representation::diagonal({2.0, 0.5});
    const SpectrumReport& ben = ctx.reference_spectrum();
    const double ben_se = ben.raw_std_errors[0];
    const Estimate bn = brownian_norm_rate(rep, 60.0, ctx.scaled(2000), ctx.stream(601), {0.01, ctx.workers});
    const Estimate gn = geodesic_average_norm_rate(rep, 60.0, 256, ctx.stream(602), ctx.workers);

    const AgreementRule rule{3.0, 0.05};
    struct Named {
        const char* name;
        double mean;
        double se;
    };
    const Named est[] = {{"benettin", ben.raw_exponents[0], ben_se}, {"geodesic", gn.mean, gn.std_error}, {"brownian-norm", bn.mean, bn.std_error}};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double tol = rule.tolerance(est[i].mean, est[i].se, est[j].mean, est[j].se);
            const double diff = std::abs(est[i].mean - est[j].mean);
            s.checks.push_back({strprintf("chi1 %s vs %s", est[i].name, est[j].name), diff <= tol,
                                strprintf("%.5f +- %.5f vs %.5f +- %.5f, |diff| %.5f <= %.5f", est[i].mean, est[i].se,
                                          est[j].mean, est[j].se, diff, tol)});
        }
    const double sum_ci = std::max(kNormalQuantile95 * ben.exponent_sum.std_error, kRoundingFloor);
    s.checks.push_back({"exponent sum", std::abs(ben.exponent_sum.mean) <= sum_ci,
                        strprintf("sum %.3g, CI half-width %.3g", ben.exponent_sum.mean, sum_ci)});
    const bool two = ben.raw_exponents.size() == 2;
    const double sym = two ? std::abs(ben.raw_exponents[0] + ben.raw_exponents[1]) : 1.0;
    const double sym_ci = two ? std::max(kNormalQuantile95 * std::hypot(ben.raw_std_errors[0], ben.raw_std_errors[1]), kRoundingFloor) : 0.0;
    s.checks.push_back({"chi1 = -chi2", two && sym <= sym_ci && ben.exponents.size() == 2,
                        strprintf("|chi1 + chi2| = %.3g, CI %.3g, %zu clustered exponents", sym, sym_ci, ben.exponents.size())});
    return s;
}

inline SuiteResult interval_suite(ValidationContext& ctx)
{
    SuiteResult s{"interval convergence", {}, 0.0};
    const Representation rep = Representation::diagonal({2.0, 0.5});
    const SpectrumReport& ben = ctx.reference_spectrum();
    const double chi1 = ben.raw_exponents.front(), chi2 = ben.raw_exponents.back();
    Matrix e1 = Matrix::Zero(2, 1);
    e1(0, 0) = 1.0;
    const Interval line = expansion_interval(rep, 60.0, e1, 256, 64, ctx.workers);
    s.checks.push_back({"span(e1) width", line.width() <= 1e-12, strprintf("b - a = %.3g (tol 1e-12)", line.width())});
    const double off = std::abs(line.midpoint() - chi1);
    s.checks.push_back({"span(e1) midpoint vs Benettin chi1", off <= 0.05 * chi1,
                        strprintf("midpoint %.5f, chi1 %.5f, |diff| %.5f (tol %.5f)", line.midpoint(), chi1, off, 0.05 * chi1)});
    const Interval plane = expansion_interval(rep, 60.0, Matrix::Identity(2, 2), 256, 64, ctx.workers);
    const bool brackets = plane.a <= plane.b && plane.a >= chi2 - 0.05 && plane.b <= chi1 + 0.05;
    s.checks.push_back({"K^2 interval within [chi2 - 0.05, chi1 + 0.05]", brackets,
                        strprintf("[a, b] = [%.5f, %.5f], [chi2 - 0.05, chi1 + 0.05] = [%.5f, %.5f]", plane.a, plane.b,
                                  chi2 - 0.05, chi1 + 0.05)});
    return s;
}

inline SuiteResult expectation_suite(ValidationContext& ctx)
{
    SuiteResult s{"expectation convergence", {}, 0.0};
    const Representation rep = Representation::diagonal({2.0, 0.5});
    const double chi1 = ctx.reference_spectrum().raw_exponents.front();
    Matrix e1 = Matrix::Zero(2, 1);
    e1(0, 0) = 1.0;
    double width = 0.0;
    std::vector<double> gaps, ses;
    std::string table;
    for (int n : {5, 10, 20, 40}) {
        const ExpectationInterval r = expectation_functions(rep, e1, n, ctx.scaled(2000), 64,
                                                            ctx.stream(800 + static_cast<std::uint64_t>(n)),
                                                            {0.01, ctx.workers});
        width = std::max(width, r.M - r.m);
        gaps.push_back(std::abs(0.5 * (r.m + r.M) - chi1));
        ses.push_back(std::max(r.m_std_error, r.M_std_error));
        table += strprintf(" n=%d: [%.5f, %.5f] gap %.5f;", n, r.m, r.M, gaps.back());
    }
    s.checks.push_back({"span(e1) M_n - m_n", width <= 1e-12, strprintf("max width %.3g", width)});
    bool monotone = true;
    for (std::size_t k = 1; k < gaps.size(); ++k)
        if (gaps[k] > gaps[k - 1] + kNormalQuantile95 * std::hypot(ses[k], ses[k - 1]))
            monotone = false;
    s.checks.push_back({"gap to chi1 non-increasing within CI", monotone, strprintf("chi1 %.5f;%s", chi1, table.c_str())});
    return s;
}

inline SuiteResult circle_suite(ValidationContext& ctx)
{
    SuiteResult s{"circle average", {}, 0.0};
    const CircleRegression r = check_circle_vs_diffusion(fields::smoothed_distance(), {4.0, 8.0, 16.0, 32.0},
                                                         ctx.scaled(4000), ctx.stream(900),
                                                         {DiscPoint{}, 0.01, ctx.workers});
    std::string table;
    for (std::size_t k = 0; k < r.radii.size(); ++k)
        table += strprintf(" R=%g: err %.4f (se %.4f);", r.radii[k], r.errors[k], r.diffusion_se[k]);
    s.checks.push_back({"circle vs diffusion error slope", r.slope <= kCircleSlopeLimit,
                        strprintf("fitted slope %.3f (limit 0.75);%s", r.slope, table.c_str())});
    return s;
}

inline SuiteResult regularity_suite(ValidationContext& ctx)
{
    SuiteResult s{"regularity probe", {}, 0.0};
    Vector u = Vector::Zero(2);
    u(0) = 1.0;
    const Specialization spec = specialize(Representation::diagonal({2.0, 0.5}), u, DiscPoint{}, ctx.group());
    std::vector<double> lip;
    for (std::uint64_t k = 0; k < 5; ++k)
        lip.push_back(estimate_regularity(spec, ctx.scaled(40000), 8.0, ctx.stream(1000 + k), ctx.workers).lipschitz_c);
    double mean = 0.0;
    for (double x : lip)
        mean += x;
    mean /= static_cast<double>(lip.size());
    bool ok = std::isfinite(mean) && mean > 0.0;
    double spread = 0.0;
    for (double x : lip) {
        ok = ok && std::isfinite(x);
        spread = std::max(spread, std::abs(x - mean) / mean);
    }
    ok = ok && spread <= 0.2;
    s.checks.push_back({"lipschitz constant stable across 5 seeds", ok,
                        strprintf("values %.4f %.4f %.4f %.4f %.4f, max deviation from mean %.1f%% (limit 20%%)",
                                  lip[0], lip[1], lip[2], lip[3], lip[4], 100.0 * spread)});
    return s;
}

using SuiteFunction = std::function<SuiteResult(ValidationContext&)>;

inline const std::map<std::string, SuiteFunction>& validation_suites()
{
    static const std::map<std::string, SuiteFunction> suites{
        {"cocycle-laws", cocycle_law_suite},
        {"geometry", geometry_suite},
        {"heat-kernel", heat_kernel_suite},
        {"semigroup", semigroup_suite},
        {"dynkin", dynkin_suite},
        {"diffusion", diffusion_suite},
        {"shadowing", shadowing_suite},
        {"uniformity", uniformity_suite},
        {"spectrum", spectrum_suite},
        {"interval", interval_suite},
        {"expectation", expectation_suite},
        {"circle", circle_suite},
        {"regularity", regularity_suite},
    };
    return suites;
}

inline SuiteResult run_suite(const std::string& name, ValidationContext& ctx)
{
    const auto& suites = validation_suites();
    const auto it = suites.find(name);
    if (it == suites.end())
        throw std::invalid_argument("unknown validation suite '" + name + "'");
    const auto start = std::chrono::steady_clock::now();
    SuiteResult r = it->second(ctx);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace hypcocycle
