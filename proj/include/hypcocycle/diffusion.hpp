#pragma once

// Brownian motion on the Poincare disc and the heat diffusions it defines.
//
// Generator convention: the sampler realizes the diffusion generated by the
// full Laplace-Beltrami operator
//     Delta f = (1 - |z|^2)^2 / 4 * (f_xx + f_yy),
// not Delta / 2. In normal coordinates the increment over dt has covariance
// 2 dt I, the radial process satisfies d rho = coth(rho) dt + sqrt(2) dW and
// the distance to the starting point grows with unit speed.

#include <hypcocycle/hypgeo.hpp>
#include <hypcocycle/random.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcocycle {

class DiffusionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A real function on the disc, optionally with its Laplace-Beltrami operator.
struct ScalarField {
    std::string name;
    std::function<double(const DiscPoint&)> value;
    std::function<double(const DiscPoint&)> laplacian;

    double operator()(const DiscPoint& p) const { return value(p); }
    bool has_laplacian() const { return static_cast<bool>(laplacian); }
};

/// Intrinsic five-point Laplacian with geodesic spacing h. At the centre of
/// normal coordinates the Laplace-Beltrami operator is the flat Laplacian.
inline double fd_laplacian(const ScalarField& f, const DiscPoint& p, double h = 1e-3)
{
    double sum = 0.0;
    for (int k = 0; k < 4; ++k)
        sum += f(geodesic_step(p, h, 0.5 * std::numbers::pi * k).point);
    return (sum - 4.0 * f(p)) / (h * h);
}

/// Laplacian of f: the analytic one when present, finite differences otherwise.
inline ScalarField laplacian_field(const ScalarField& f)
{
    if (f.has_laplacian())
        return {"laplacian(" + f.name + ")", f.laplacian, {}};
    return {"fd_laplacian(" + f.name + ")", [f](const DiscPoint& p) { return fd_laplacian(f, p); }, {}};
}

namespace fields {

inline ScalarField constant(double c)
{
    return {"constant", [c](const DiscPoint&) { return c; }, [](const DiscPoint&) { return 0.0; }};
}

/// Re(z); harmonic for the hyperbolic Laplacian as well.
inline ScalarField real_part()
{
    return {"re", [](const DiscPoint& p) { return p.re(); }, [](const DiscPoint&) { return 0.0; }};
}

/// coth(rho) * rho, continuous at 0.
inline double rho_coth(double rho) { return rho < 1e-8 ? 1.0 : rho / std::tanh(rho); }

inline ScalarField distance()
{
    return {"dist", [](const DiscPoint& p) { return p.radius(); }, {}};
}

inline ScalarField exp_neg_distance()
{
    return {"exp_neg_dist", [](const DiscPoint& p) { return std::exp(-p.radius()); }, {}};
}

/// dist_P(0, .)^2, smooth at the origin; Delta = 2 + 2 rho coth(rho).
inline ScalarField distance_squared()
{
    return {"dist_sq",
            [](const DiscPoint& p) { return p.radius() * p.radius(); },
            [](const DiscPoint& p) { return 2.0 + 2.0 * rho_coth(p.radius()); }};
}

/// sqrt(1 + dist_P(0, .)^2): 1-Lipschitz with bounded Laplacian.
inline ScalarField smoothed_distance()
{
    return {"smooth_dist",
            [](const DiscPoint& p) { return std::sqrt(1.0 + p.radius() * p.radius()); },
            [](const DiscPoint& p) {
                const double r = p.radius();
                const double q = 1.0 + r * r;
                return 1.0 / (q * std::sqrt(q)) + rho_coth(r) / std::sqrt(q);
            }};
}

} // namespace fields

inline constexpr double kMaxDiffusionStep = 0.05;

/// Discretized leafwise path in the disc. `angle_steps[i]` is the change of
/// the Euclidean argument between points i-1 and i, kept separately because
/// far from the origin it is far below the resolution of the angle itself.
struct LeafPath {
    std::vector<double> times;
    std::vector<DiscPoint> points;
    std::vector<double> angle_steps;
    double step = 0.0;

    std::size_t size() const { return points.size(); }
    const DiscPoint& start() const { return points.front(); }
    const DiscPoint& end() const { return points.back(); }
    double duration() const { return times.back(); }

    /// Largest index whose time does not exceed t.
    std::size_t index_at(double t) const
    {
        const auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
        return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1));
    }

    /// Samples [0, last].
    LeafPath head(std::size_t last) const
    {
        LeafPath p;
        p.step = step;
        p.times.assign(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(last + 1));
        p.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(last + 1));
        p.angle_steps.assign(angle_steps.begin(), angle_steps.begin() + static_cast<std::ptrdiff_t>(last + 1));
        return p;
    }

    /// The shifted path starting at sample `first`, with time reset to 0.
    LeafPath shifted(std::size_t first) const
    {
        LeafPath p;
        p.step = step;
        const double t0 = times[first];
        for (std::size_t i = first; i < size(); ++i) {
            p.times.push_back(times[i] - t0);
            p.points.push_back(points[i]);
            p.angle_steps.push_back(i == first ? 0.0 : angle_steps[i]);
        }
        return p;
    }

    /// Checks the structural invariants; throws on violation.
    void validate() const
    {
        if (points.empty() || times.size() != points.size() || angle_steps.size() != points.size())
            throw DiffusionError("LeafPath: inconsistent lengths");
        if (times.front() != 0.0)
            throw DiffusionError("LeafPath: first time must be 0");
        for (std::size_t i = 1; i < size(); ++i) {
            if (!(times[i] > times[i - 1]))
                throw DiffusionError("LeafPath: times must increase");
            const double d = dist_P(points[i - 1], points[i]);
            if (!std::isfinite(d) || d > 50.0 * std::sqrt(step))
                throw DiffusionError("LeafPath: step " + std::to_string(i) + " is too long");
        }
    }
};

/// One Brownian increment of duration dt: a geodesic move by the polar
/// Gaussian vector sqrt(2 dt) (N1, N2) in the Euclidean frame at p.
inline GeodesicStep brownian_increment(const DiscPoint& p, double dt, RngStream& rng)
{
    const auto [n1, n2] = rng.normal_pair();
    const double s = std::sqrt(2.0 * dt);
    const Complex v(s * n1, s * n2);
    const double len = std::abs(v);
    if (len == 0.0)
        return {p, 0.0};
    return geodesic_step(p, len, std::arg(v));
}

inline void check_sampler_args(double t_max, double step)
{
    if (!std::isfinite(t_max) || t_max < 0.0)
        throw DiffusionError("sampler: t_max must be finite and >= 0");
    if (!std::isfinite(step) || step <= 0.0)
        throw DiffusionError("sampler: step must be finite and > 0");
    if (step > kMaxDiffusionStep)
        throw DiffusionError("sampler: step above 0.05 is rejected (discretization bias)");
}

/// Number of increments and the length of the last one.
inline std::pair<std::size_t, double> step_schedule(double t_max, double step)
{
    if (t_max == 0.0)
        return {0, 0.0};
    const auto n = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    const double last = t_max - static_cast<double>(n - 1) * step;
    return {n, last};
}

inline LeafPath sample_path(const DiscPoint& start, double t_max, double step, RngStream rng)
{
    check_sampler_args(t_max, step);
    const auto [n, last] = step_schedule(t_max, step);
    LeafPath path;
    path.step = step;
    path.times.reserve(n + 1);
    path.points.reserve(n + 1);
    path.angle_steps.reserve(n + 1);
    path.times.push_back(0.0);
    path.points.push_back(start);
    path.angle_steps.push_back(0.0);
    DiscPoint p = start;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = i + 1 == n ? last : step;
        const GeodesicStep s = brownian_increment(p, dt, rng);
        p = s.point;
        path.times.push_back(i + 1 == n ? t_max : static_cast<double>(i + 1) * step);
        path.points.push_back(p);
        path.angle_steps.push_back(s.angle_change);
    }
    return path;
}

/// Endpoint of `sample_path(start, t_max, step, rng)` without storing the path.
inline DiscPoint sample_endpoint(const DiscPoint& start, double t_max, double step, RngStream rng)
{
    check_sampler_args(t_max, step);
    const auto [n, last] = step_schedule(t_max, step);
    DiscPoint p = start;
    for (std::size_t i = 0; i < n; ++i)
        p = brownian_increment(p, i + 1 == n ? last : step, rng).point;
    return p;
}

/// Heat kernel of d/dt = Delta on the hyperbolic plane, as a density against
/// hyperbolic area, at distance rho and time t:
///
///   p(rho, t) = sqrt(2) e^{-t/4} / (4 pi t)^{3/2}
///               * int_rho^inf s e^{-s^2/(4t)} / sqrt(cosh s - cosh rho) ds.
///
/// The substitution s = rho + u^2 removes the endpoint singularity; the
/// integral is then evaluated by adaptive Gauss-Kronrod.
inline double heat_kernel(double rho, double t)
{
    if (!std::isfinite(t) || t <= 0.0)
        throw DiffusionError("heat_kernel: t must be > 0");
    if (!std::isfinite(rho) || rho < 0.0)
        throw DiffusionError("heat_kernel: rho must be finite and >= 0");
    if (rho < 1e-6)
        rho = 0.0;
    auto integrand = [rho, t](double u) {
        const double u2 = u * u;
        const double s = rho + u2;
        if (s == 0.0)
            return 0.0;
        const double x = 0.5 * u2;
        const double shc = x < 1e-8 ? 1.0 : std::sinh(x) / x;
        // cosh s - cosh rho = u^2 sinh((s + rho)/2) shc(u^2/2)
        return 2.0 * s * std::exp(-s * s / (4.0 * t)) / std::sqrt(std::sinh(0.5 * (s + rho)) * shc);
    };
    // Beyond s = rho + 40 + 20 sqrt(t) the integrand is below e^{-20} relative.
    const double u_max = std::sqrt(40.0 + 20.0 * std::sqrt(t));
    double error = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, u_max, 20, 1e-12, &error);
    const double prefactor = std::numbers::sqrt2 * std::exp(-0.25 * t) / std::pow(4.0 * std::numbers::pi * t, 1.5);
    return prefactor * integral;
}

struct DiffuseOptions {
    DiscPoint start{};
    double step = 0.01;
    unsigned workers = default_workers();
};

namespace detail {

inline std::vector<double> endpoint_values(const ScalarField& f, double t, std::size_t n, const RngStream& rng,
                                           const DiffuseOptions& opt)
{
    std::vector<double> values(n);
    parallel_for(n, opt.workers, [&](std::size_t i) {
        values[i] = f(sample_endpoint(opt.start, t, opt.step, rng.child(i)));
    });
    return values;
}

} // namespace detail

/// Monte Carlo estimate of (D_t f)(start) = E_start[f(omega(t))].
inline Estimate diffuse(const ScalarField& f, double t, std::size_t n_samples, const RngStream& rng,
                        const DiffuseOptions& opt = {})
{
    if (n_samples < 100)
        throw DiffusionError("diffuse: at least 100 samples are required");
    const auto values = detail::endpoint_values(f, t, n_samples, rng, opt);
    return mean_and_error(values);
}

/// Two estimates of the same quantity and the verdict of comparing them.
struct ComparisonReport {
    std::string name;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double rhs_se = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    double difference() const { return lhs - rhs; }
    double combined_se() const { return std::hypot(lhs_se, rhs_se); }
};

inline ComparisonReport make_comparison(std::string name, Estimate lhs, Estimate rhs, double extra_tolerance = 0.0)
{
    ComparisonReport r;
    r.name = std::move(name);
    r.lhs = lhs.mean;
    r.lhs_se = lhs.std_error;
    r.rhs = rhs.mean;
    r.rhs_se = rhs.std_error;
    r.tolerance = 3.0 * r.combined_se() + extra_tolerance;
    r.passed = std::abs(r.difference()) <= r.tolerance;
    return r;
}

inline constexpr std::size_t kSemigroupInnerSamples = 32;

/// Compares (D_{t+s} f)(start) with the nested estimate (D_t (D_s f))(start);
/// each outer endpoint gets its own inner sub-sample.
inline ComparisonReport check_semigroup(const ScalarField& f, double t, double s, std::size_t n, const RngStream& rng,
                                        const DiffuseOptions& opt = {})
{
    const Estimate direct = diffuse(f, t + s, n, rng.child(0), opt);
    const RngStream outer = rng.child(1);
    const RngStream inner = rng.child(2);
    std::vector<double> nested(n);
    parallel_for(n, opt.workers, [&](std::size_t i) {
        const DiscPoint mid = sample_endpoint(opt.start, t, opt.step, outer.child(i));
        const RngStream sub = inner.child(i);
        std::vector<double> vals(kSemigroupInnerSamples);
        for (std::size_t j = 0; j < kSemigroupInnerSamples; ++j)
            vals[j] = f(sample_endpoint(mid, s, opt.step, sub.child(j)));
        nested[i] = pairwise_sum(vals) / static_cast<double>(kSemigroupInnerSamples);
    });
    return make_comparison("semigroup[" + f.name + "]", direct, mean_and_error(nested));
}

struct DynkinOptions {
    bool allow_finite_differences = true;
    std::size_t time_intervals = 8;
};

/// Checks (D_t f)(start) - f(start) = int_0^t (D_s Delta f)(start) ds, the
/// right side by the trapezoid rule on an even grid. The tolerance adds a
/// Richardson estimate of the quadrature error to three combined standard
/// errors.
inline ComparisonReport check_dynkin(const ScalarField& f, double t, std::size_t n, const RngStream& rng,
                                     const DiffuseOptions& opt = {}, const DynkinOptions& dyn = {})
{
    if (!f.has_laplacian() && !dyn.allow_finite_differences)
        throw DiffusionError("check_dynkin: field '" + f.name + "' has no Laplacian and finite differences are disabled");
    const std::size_t m = std::max<std::size_t>(2, dyn.time_intervals + dyn.time_intervals % 2);
    const ScalarField lap = laplacian_field(f);

    Estimate lhs = diffuse(f, t, n, rng.child(0), opt);
    lhs.mean -= f(opt.start);

    std::vector<Estimate> nodes(m + 1);
    nodes[0] = {lap(opt.start), 0.0};
    for (std::size_t j = 1; j <= m; ++j)
        nodes[j] = diffuse(lap, t * static_cast<double>(j) / static_cast<double>(m), n, rng.child(10 + j), opt);

    auto trapezoid = [&](std::size_t stride) {
        const std::size_t intervals = m / stride;
        const double h = t / static_cast<double>(intervals);
        double sum = 0.0;
        double var = 0.0;
        for (std::size_t k = 0; k <= intervals; ++k) {
            const double w = (k == 0 || k == intervals) ? 0.5 * h : h;
            sum += w * nodes[k * stride].mean;
            var += w * w * nodes[k * stride].std_error * nodes[k * stride].std_error;
        }
        return Estimate{sum, std::sqrt(var)};
    };
    const Estimate fine = trapezoid(1);
    const Estimate coarse = trapezoid(2);
    const double quad_error = std::abs(fine.mean - coarse.mean) / 3.0;
    return make_comparison("dynkin[" + f.name + "]", lhs, fine, quad_error);
}

/// Average of f over the hyperbolic circle of radius R about 0 on a uniform
/// grid of n_dirs directions. For even n_dirs the second half of the grid is
/// the exact antipode of the first.
inline double circle_average(const ScalarField& f, double R, std::size_t n_dirs)
{
    if (!std::isfinite(R) || R < 0.0)
        throw DiffusionError("circle_average: R must be finite and >= 0");
    if (n_dirs < 8)
        throw DiffusionError("circle_average: at least 8 directions are required");
    std::vector<double> values(n_dirs);
    if (n_dirs % 2 == 0) {
        const std::size_t half = n_dirs / 2;
        for (std::size_t j = 0; j < half; ++j) {
            const DiscPoint p = DiscPoint::polar(R, kTwoPi * static_cast<double>(j) / static_cast<double>(n_dirs));
            values[j] = f(p);
            values[half + j] = f(-p);
        }
    } else {
        for (std::size_t j = 0; j < n_dirs; ++j)
            values[j] = f(DiscPoint::polar(R, kTwoPi * static_cast<double>(j) / static_cast<double>(n_dirs)));
    }
    return pairwise_sum(values) / static_cast<double>(n_dirs);
}

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2)
        return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

struct CircleRegression {
    std::vector<double> radii;
    std::vector<double> circle;
    std::vector<double> diffusion;
    std::vector<double> diffusion_se;
    std::vector<double> errors;
    double slope = 0.0;
    bool all_within_noise = false;
    bool passed = false;
};

inline constexpr double kCircleSlopeLimit = 0.75;

/// Regression of |circle average at R - (D_[R] f)(0)| against R on log-log
/// axes. Passes when the fitted slope stays at or below 0.75, or when every
/// error is within three standard errors of zero.
inline CircleRegression check_circle_vs_diffusion(const ScalarField& f, const std::vector<double>& radii,
                                                  std::size_t n, const RngStream& rng,
                                                  const DiffuseOptions& opt = {}, std::size_t n_dirs = 256)
{
    if (radii.size() < 4)
        throw DiffusionError("check_circle_vs_diffusion: at least 4 radii are required");
    CircleRegression out;
    std::vector<double> lx, ly;
    out.all_within_noise = true;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double R = radii[k];
        const double c = circle_average(f, R, n_dirs);
        const Estimate d = diffuse(f, std::floor(R), n, rng.child(k), opt);
        const double err = std::abs(c - d.mean);
        out.radii.push_back(R);
        out.circle.push_back(c);
        out.diffusion.push_back(d.mean);
        out.diffusion_se.push_back(d.std_error);
        out.errors.push_back(err);
        if (err > 3.0 * d.std_error)
            out.all_within_noise = false;
        if (err > 0.0) {
            lx.push_back(std::log(R));
            ly.push_back(std::log(err));
        }
    }
    out.slope = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
    out.passed = out.all_within_noise || out.slope <= kCircleSlopeLimit;
    return out;
}

} // namespace hypcocycle
