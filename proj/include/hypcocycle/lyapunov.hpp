#pragma once

// Lyapunov spectrum estimators: along Brownian paths (QR deflation and plain
// growth rates), along geodesic rays, and through heat-diffusion
// expectations. Also the shadowing and landing-direction diagnostics for
// Brownian motion on the disc.

#include <hypcocycle/cocycle.hpp>
#include <hypcocycle/diffusion.hpp>
#include <hypcocycle/hypgeo.hpp>
#include <hypcocycle/random.hpp>
#include <hypcocycle/surface.hpp>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcocycle {

class LyapunovError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kNormalQuantile95 = 1.959963984540054;
inline constexpr double kClusterGapFloor = 0.02;

struct SpectrumReport {
    std::string method;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    unsigned workers = 1;

    // Clustered spectrum, strictly decreasing.
    std::vector<double> exponents;
    std::vector<int> multiplicities;
    std::vector<double> ci_halfwidths;
    Matrix oseledec_basis;

    // Per-index estimates before clustering, decreasing.
    std::vector<double> raw_exponents;
    std::vector<double> raw_std_errors;

    // Mean of (1/t) log|det A| over the samples.
    Estimate exponent_sum;

    int dim() const { return static_cast<int>(raw_exponents.size()); }
    double top() const { return exponents.front(); }
    double bottom() const { return exponents.back(); }
};

namespace detail {

/// Fills the raw and clustered fields from per-sample exponent vectors
/// (each sorted decreasingly). Neighbouring indices merge when their gap is
/// below max(0.02, 3 combined standard errors).
inline void cluster_spectrum(SpectrumReport& rep, const std::vector<std::vector<double>>& samples)
{
    const std::size_t n = samples.size();
    const std::size_t d = samples.front().size();
    std::vector<double> column(n);
    rep.raw_exponents.assign(d, 0.0);
    rep.raw_std_errors.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t p = 0; p < n; ++p)
            column[p] = samples[p][i];
        const Estimate e = mean_and_error(column);
        rep.raw_exponents[i] = e.mean;
        rep.raw_std_errors[i] = e.std_error;
    }
    std::vector<double> sums(n);
    for (std::size_t p = 0; p < n; ++p) {
        std::vector<double> row(samples[p]);
        sums[p] = pairwise_sum(row);
    }
    rep.exponent_sum = mean_and_error(sums);

    rep.exponents.clear();
    rep.multiplicities.clear();
    rep.ci_halfwidths.clear();
    std::size_t first = 0;
    auto close_cluster = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = 0; p < n; ++p) {
            double s = 0.0;
            for (std::size_t i = begin; i < end; ++i)
                s += samples[p][i];
            column[p] = s / static_cast<double>(end - begin);
        }
        const Estimate e = mean_and_error(column);
        rep.exponents.push_back(e.mean);
        rep.multiplicities.push_back(static_cast<int>(end - begin));
        rep.ci_halfwidths.push_back(kNormalQuantile95 * e.std_error);
    };
    for (std::size_t i = 1; i < d; ++i) {
        const double gap = rep.raw_exponents[i - 1] - rep.raw_exponents[i];
        const double tol = std::max(kClusterGapFloor, 3.0 * std::hypot(rep.raw_std_errors[i - 1], rep.raw_std_errors[i]));
        if (gap >= tol) {
            close_cluster(first, i);
            first = i;
        }
    }
    close_cluster(first, d);
}

/// Column blocks for the clustered spectrum from averaged projectors onto the
/// leading right singular subspaces of the sampled cocycle values.
inline Matrix oseledec_blocks(const std::vector<Matrix>& right_vectors, const std::vector<int>& multiplicities)
{
    const auto d = right_vectors.front().rows();
    Matrix basis(d, 0);
    int cumulative = 0;
    for (int mult : multiplicities) {
        cumulative += mult;
        Matrix proj = Matrix::Zero(d, d);
        for (const Matrix& v : right_vectors) {
            const auto lead = v.leftCols(cumulative);
            proj += lead * lead.adjoint();
        }
        proj /= static_cast<double>(right_vectors.size());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(proj);
        // Eigenvalues ascend; take the top `cumulative` eigenvectors.
        Matrix lead = eig.eigenvectors().rightCols(cumulative);
        if (basis.cols() > 0)
            lead -= basis * (basis.adjoint() * lead);
        Eigen::JacobiSVD<Matrix> svd(lead, Eigen::ComputeThinU);
        Matrix block = svd.matrixU().leftCols(mult);
        Matrix next(d, basis.cols() + mult);
        next << basis, block;
        basis = std::move(next);
    }
    return basis;
}

inline std::vector<double> log_singular_values(const CocycleValue& value)
{
    const CocycleValue a = value.normalized();
    Eigen::JacobiSVD<Matrix> svd(a.matrix);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        out.push_back(std::log(svd.singularValues()(i)) + a.log_scale);
    return out;
}

inline Matrix right_singular_vectors(const CocycleValue& a)
{
    Eigen::JacobiSVD<Matrix> svd(a.normalized().matrix, Eigen::ComputeFullV);
    return svd.matrixV();
}

/// Uniformly random orthonormal frame over the representation field.
inline Matrix random_frame(int d, Field field, RngStream& rng)
{
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto [x, y] = rng.normal_pair();
            g(i, j) = field == Field::real ? Complex(x, 0.0) : Complex(x, y);
        }
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(d, d);
}

inline void check_path_args(double t, double step, const char* who)
{
    if (!std::isfinite(t) || t <= 0.0)
        throw LyapunovError(std::string(who) + ": horizon must be > 0");
    if (!std::isfinite(step) || step <= 0.0 || step > kMaxDiffusionStep)
        throw LyapunovError(std::string(who) + ": step must lie in (0, 0.05]");
}

} // namespace detail

/// Cocycle along a Brownian path of duration t on the surface started at `start`.
inline CocycleValue brownian_cocycle(const Representation& rep, const FuchsianGroup& group, const DiscPoint& start,
                                     double t, double step, RngStream rng)
{
    CocycleValue a = CocycleValue::identity(rep.dim());
    SurfaceWalker walker(group, start);
    walker.run_brownian(t, step, rng, [&](int l) { a.left_multiply(rep.image(l)); });
    return a;
}

struct PathOptions {
    double step = 0.01;
    unsigned workers = default_workers();
};

namespace detail {

inline std::vector<double> brownian_samples(const Representation& rep, double t, std::size_t n_paths,
                                            const RngStream& rng, const PathOptions& opt,
                                            const std::function<double(const CocycleValue&)>& statistic)
{
    rep.require_exact("brownian estimator");
    const FuchsianGroup group = build_genus2();
    std::vector<double> values(n_paths);
    parallel_for(n_paths, opt.workers, [&](std::size_t i) {
        values[i] = statistic(brownian_cocycle(rep, group, DiscPoint{}, t, opt.step, rng.child(i)));
    });
    return values;
}

} // namespace detail

/// Monte Carlo mean of (1/t) log(||A(omega, t) v|| / ||v||) over Brownian paths from 0.
inline Estimate brownian_rate(const Representation& rep, const Vector& v, double t, std::size_t n_paths,
                              const RngStream& rng, const PathOptions& opt = {})
{
    detail::check_path_args(t, opt.step, "brownian_rate");
    if (t < 1.0)
        throw LyapunovError("brownian_rate: t must be >= 1");
    if (v.size() != rep.dim() || v.norm() == 0.0)
        throw LyapunovError("brownian_rate: v must be a nonzero vector of the representation dimension");
    if (n_paths < 2)
        throw LyapunovError("brownian_rate: at least 2 paths are required");
    const auto values =
        detail::brownian_samples(rep, t, n_paths, rng, opt, [&](const CocycleValue& a) { return a.log_growth(v) / t; });
    return mean_and_error(values);
}

/// Monte Carlo mean of (1/t) log ||A(omega, t)||.
inline Estimate brownian_norm_rate(const Representation& rep, double t, std::size_t n_paths, const RngStream& rng,
                                   const PathOptions& opt = {})
{
    detail::check_path_args(t, opt.step, "brownian_norm_rate");
    if (t < 1.0)
        throw LyapunovError("brownian_norm_rate: t must be >= 1");
    if (n_paths < 2)
        throw LyapunovError("brownian_norm_rate: at least 2 paths are required");
    const auto values =
        detail::brownian_samples(rep, t, n_paths, rng, opt, [&](const CocycleValue& a) { return a.log_norm() / t; });
    return mean_and_error(values);
}

inline constexpr double kFrameUnderflow = 1e-300;

/// Initial frame for QR deflation: the standard basis, or a Haar-random
/// orthonormal frame drawn per path.
enum class InitialFrame { standard, random };

/// Full spectrum by QR deflation: an orthonormal frame is pushed through the
/// cocycle along each path and re-orthonormalized every `reorth_every` steps,
/// accumulating log |R_ii|. Each path's exponents are sorted before averaging.
inline SpectrumReport benettin_spectrum(const Representation& rep, double t_max, double step, std::size_t reorth_every,
                                        std::size_t n_paths, const RngStream& rng,
                                        unsigned workers = default_workers(),
                                        InitialFrame initial = InitialFrame::standard)
{
    rep.require_exact("benettin_spectrum");
    detail::check_path_args(t_max, step, "benettin_spectrum");
    if (reorth_every == 0 || static_cast<double>(reorth_every) * step > 1.0 + 1e-12)
        throw LyapunovError("benettin_spectrum: need reorth_every >= 1 and reorth_every * step <= 1");
    if (n_paths < 2)
        throw LyapunovError("benettin_spectrum: at least 2 paths are required");

    const FuchsianGroup group = build_genus2();
    const int d = rep.dim();
    std::vector<std::vector<double>> samples(n_paths);
    std::vector<Matrix> right(n_paths);

    parallel_for(n_paths, workers, [&](std::size_t p) {
        RngStream frame_rng = rng.child(p).child(1);
        RngStream path_rng = rng.child(p);
        Matrix q = initial == InitialFrame::random ? detail::random_frame(d, rep.field(), frame_rng)
                                                   : Matrix::Identity(d, d);
        CocycleValue full = CocycleValue::identity(d);
        std::vector<double> logs(static_cast<std::size_t>(d), 0.0);
        auto reorthonormalize = [&](std::size_t step_index) {
            Eigen::HouseholderQR<Matrix> qr(q);
            const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
            for (int i = 0; i < d; ++i) {
                const double rii = std::abs(r(i, i));
                if (!(rii > kFrameUnderflow))
                    throw LyapunovError("benettin_spectrum: frame degenerated on path " + std::to_string(p) +
                                        " at step " + std::to_string(step_index) + " (|R_" + std::to_string(i) +
                                        std::to_string(i) + "| = " + std::to_string(rii) + ")");
                logs[static_cast<std::size_t>(i)] += std::log(rii);
            }
            q = qr.householderQ() * Matrix::Identity(d, d);
        };
        SurfaceWalker walker(group, DiscPoint{});
        const auto [n_steps, last] = step_schedule(t_max, step);
        for (std::size_t s = 0; s < n_steps; ++s) {
            walker.brownian_step(s + 1 == n_steps ? last : step, path_rng, [&](int l) {
                const Matrix& m = rep.image(l);
                q = m * q;
                full.left_multiply(m);
            });
            if ((s + 1) % reorth_every == 0 || s + 1 == n_steps)
                reorthonormalize(s + 1);
        }
        for (double& x : logs)
            x /= t_max;
        std::sort(logs.begin(), logs.end(), std::greater<>());
        samples[p] = std::move(logs);
        right[p] = detail::right_singular_vectors(full);
    });

    SpectrumReport out;
    out.method = "brownian";
    out.horizon = t_max;
    out.seed = rng.master_seed();
    out.n_samples = n_paths;
    out.workers = workers;
    detail::cluster_spectrum(out, samples);
    out.oseledec_basis = detail::oseledec_blocks(right, out.multiplicities);
    return out;
}

/// Spectrum from singular values of sampled cocycle values: per sample the
/// vector (1/horizon) log sigma_i, then averaged and clustered.
inline SpectrumReport spectrum_from_values(const std::vector<CocycleValue>& values, double horizon,
                                           std::string method, std::uint64_t seed, unsigned workers)
{
    if (values.size() < 2)
        throw LyapunovError("spectrum_from_values: at least 2 samples are required");
    std::vector<std::vector<double>> samples;
    std::vector<Matrix> right;
    for (const CocycleValue& a : values) {
        auto s = detail::log_singular_values(a);
        for (double& x : s)
            x /= horizon;
        samples.push_back(std::move(s));
        right.push_back(detail::right_singular_vectors(a));
    }
    SpectrumReport out;
    out.method = std::move(method);
    out.horizon = horizon;
    out.seed = seed;
    out.n_samples = values.size();
    out.workers = workers;
    detail::cluster_spectrum(out, samples);
    out.oseledec_basis = detail::oseledec_blocks(right, out.multiplicities);
    return out;
}

/// Cocycle values along Brownian paths of duration n from 0.
inline std::vector<CocycleValue> brownian_values(const Representation& rep, double t, std::size_t n_paths,
                                                 const RngStream& rng, const PathOptions& opt = {})
{
    rep.require_exact("brownian_values");
    detail::check_path_args(t, opt.step, "brownian_values");
    const FuchsianGroup group = build_genus2();
    std::vector<CocycleValue> out(n_paths);
    parallel_for(n_paths, opt.workers, [&](std::size_t i) {
        out[i] = brownian_cocycle(rep, group, DiscPoint{}, t, opt.step, rng.child(i));
    });
    return out;
}

struct ExpansionSample {
    double theta = 0.0;
    double R = 0.0;
    double value = 0.0;
    Vector vector; // empty for the norm rate
};

/// Cocycle along the geodesic ray from 0 in direction theta (turns) up to R.
inline CocycleValue geodesic_cocycle(const Representation& rep, const FuchsianGroup& group, double theta, double R,
                                     double spacing = kGeodesicSpacing)
{
    rep.require_exact("geodesic estimator");
    if (!(R > 0.0) || !std::isfinite(R))
        throw LyapunovError("geodesic estimator: R must be > 0");
    return cocycle_of_word(rep, geodesic_word(group, {DiscPoint{}, theta}, R, spacing).reversed());
}

/// (1/R) log(||A(gamma_theta, R) v|| / ||v||).
inline ExpansionSample geodesic_rate(const Representation& rep, double theta, double R, const Vector& v,
                                     const FuchsianGroup& group = build_genus2())
{
    const CocycleValue a = geodesic_cocycle(rep, group, theta, R);
    return {theta, R, a.log_growth(v) / R, v};
}

/// (1/R) log ||A(gamma_theta, R)||.
inline ExpansionSample geodesic_norm_rate(const Representation& rep, double theta, double R,
                                          const FuchsianGroup& group = build_genus2())
{
    const CocycleValue a = geodesic_cocycle(rep, group, theta, R);
    return {theta, R, a.log_norm() / R, {}};
}

/// Cocycle values along rays at the directions theta_j = j / n_dirs.
inline std::vector<CocycleValue> geodesic_grid_values(const Representation& rep, double R, std::size_t n_dirs,
                                                      unsigned workers = default_workers())
{
    const FuchsianGroup group = build_genus2();
    std::vector<CocycleValue> out(n_dirs);
    parallel_for(n_dirs, workers, [&](std::size_t j) {
        out[j] = geodesic_cocycle(rep, group, static_cast<double>(j) / static_cast<double>(n_dirs), R);
    });
    return out;
}

/// Mean of the norm rate over n_dirs independent uniform directions.
inline Estimate geodesic_average_norm_rate(const Representation& rep, double R, std::size_t n_dirs,
                                           const RngStream& rng, unsigned workers = default_workers())
{
    if (n_dirs < 2)
        throw LyapunovError("geodesic_average_norm_rate: at least 2 directions are required");
    const FuchsianGroup group = build_genus2();
    std::vector<double> values(n_dirs);
    parallel_for(n_dirs, workers, [&](std::size_t j) {
        RngStream s = rng.child(j);
        values[j] = geodesic_norm_rate(rep, s.uniform(), R, group).value;
    });
    return mean_and_error(values);
}

/// Extremes of a function on the unit sphere of a subspace.
struct SphereExtremes {
    double min_value = 0.0;
    double max_value = 0.0;
    Vector argmin;
    Vector argmax;
};

/// Minimizes and maximizes objective(c) over unit coefficient vectors c of a
/// k-dimensional space over `field`. The objective must be invariant under
/// scaling of c. Candidates come from a deterministic quasi-uniform set of
/// n_vectors points; each incumbent is refined by coordinate-wise
/// golden-section search.
inline SphereExtremes optimize_on_sphere(const std::function<double(const Vector&)>& objective, int k, Field field,
                                         std::size_t n_vectors)
{
    if (k < 1)
        throw LyapunovError("optimize_on_sphere: dimension must be >= 1");
    const int m = k == 1 ? 1 : (field == Field::real ? k : 2 * k);
    auto to_coeffs = [&](const Eigen::VectorXd& x) {
        Vector c(k);
        if (m == 1) {
            c(0) = 1.0;
        } else if (field == Field::real) {
            for (int i = 0; i < k; ++i)
                c(i) = x(i);
        } else {
            for (int i = 0; i < k; ++i)
                c(i) = Complex(x(2 * i), x(2 * i + 1));
        }
        return c;
    };

    std::vector<Eigen::VectorXd> candidates;
    double spacing = 0.0;
    if (m == 1) {
        candidates.push_back(Eigen::VectorXd::Ones(1));
    } else if (m == 2) {
        for (std::size_t j = 0; j < n_vectors; ++j) {
            const double a = std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_vectors);
            Eigen::VectorXd x(2);
            x << std::cos(a), std::sin(a);
            candidates.push_back(x);
        }
        spacing = std::numbers::pi / static_cast<double>(n_vectors);
    } else if (m == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t j = 0; j < n_vectors; ++j) {
            const double z = 1.0 - (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(n_vectors);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double a = golden * static_cast<double>(j);
            Eigen::VectorXd x(3);
            x << r * std::cos(a), r * std::sin(a), z;
            candidates.push_back(x);
        }
        spacing = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(n_vectors));
    } else {
        RngStream s(0x5eedULL, static_cast<std::uint64_t>(m));
        for (std::size_t j = 0; j < n_vectors; ++j) {
            Eigen::VectorXd x(m);
            for (int i = 0; i < m; ++i)
                x(i) = s.normal();
            candidates.push_back(x.normalized());
        }
        spacing = std::pow(static_cast<double>(n_vectors), -1.0 / static_cast<double>(m - 1));
    }

    auto eval = [&](const Eigen::VectorXd& x) { return objective(to_coeffs(x)); };

    auto refine = [&](Eigen::VectorXd x, double fx, double sign) {
        // Minimizes sign * f.
        double delta = spacing;
        for (int sweep = 0; sweep < 3 && m > 1; ++sweep, delta *= 0.5) {
            for (int i = 0; i < m; ++i) {
                auto g = [&](double s) {
                    Eigen::VectorXd y = x;
                    y(i) += s;
                    return sign * eval(y.normalized());
                };
                const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
                double lo = -delta, hi = delta;
                double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
                double gc = g(c), gd = g(d);
                for (int it = 0; it < 30; ++it) {
                    if (gc < gd) {
                        hi = d;
                        d = c;
                        gd = gc;
                        c = hi - phi * (hi - lo);
                        gc = g(c);
                    } else {
                        lo = c;
                        c = d;
                        gc = gd;
                        d = lo + phi * (hi - lo);
                        gd = g(d);
                    }
                }
                const double s = 0.5 * (lo + hi);
                const double gs = g(s);
                if (gs < sign * fx) {
                    x(i) += s;
                    x.normalize();
                    fx = sign * gs;
                }
            }
        }
        return std::pair{x, fx};
    };

    std::size_t imin = 0, imax = 0;
    std::vector<double> values(candidates.size());
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        values[j] = eval(candidates[j]);
        if (values[j] < values[imin])
            imin = j;
        if (values[j] > values[imax])
            imax = j;
    }
    SphereExtremes out;
    auto [xmin, fmin] = refine(candidates[imin], values[imin], 1.0);
    auto [xmax, fmax] = refine(candidates[imax], values[imax], -1.0);
    out.min_value = fmin;
    out.max_value = std::max(fmax, fmin);
    out.argmin = to_coeffs(xmin).normalized();
    out.argmax = to_coeffs(xmax).normalized();
    return out;
}

struct Interval {
    double a = 0.0;
    double b = 0.0;
    Vector argmin;
    Vector argmax;

    double width() const { return b - a; }
    double midpoint() const { return 0.5 * (a + b); }
};

/// Orthonormal basis of the column span of H.
inline Matrix orthonormal_columns(const Matrix& h)
{
    if (h.cols() == 0 || h.norm() == 0.0)
        throw LyapunovError("subspace basis must be nonzero");
    Eigen::ColPivHouseholderQR<Matrix> qr(h);
    const auto rank = qr.rank();
    if (rank == 0)
        throw LyapunovError("subspace basis must be nonzero");
    Matrix q = qr.householderQ() * Matrix::Identity(h.rows(), rank);
    return q;
}

/// inf and sup over unit v in H of the direction-averaged expansion rate
/// (1/R) int_0^1 log(||A(gamma_theta, R) v|| / ||v||) d theta, the integral by
/// the periodic trapezoid rule on n_dirs nodes.
inline Interval expansion_interval(const Representation& rep, double R, const Matrix& H, std::size_t n_dirs,
                                   std::size_t n_vectors, unsigned workers = default_workers())
{
    if (n_dirs < 64)
        throw LyapunovError("expansion_interval: n_dirs must be >= 64");
    if (n_vectors < 64)
        throw LyapunovError("expansion_interval: n_vectors must be >= 64");
    if (H.rows() != rep.dim())
        throw LyapunovError("expansion_interval: subspace basis has the wrong number of rows");
    const Matrix basis = orthonormal_columns(H);
    const auto values = geodesic_grid_values(rep, R, n_dirs, workers);
    std::vector<Matrix> restricted;
    std::vector<double> scales;
    for (const auto& value : values) {
        const CocycleValue a = value.normalized();
        restricted.push_back(a.matrix * basis);
        scales.push_back(a.log_scale);
    }
    std::vector<double> terms(values.size());
    auto objective = [&](const Vector& c) {
        const double nc = c.norm();
        for (std::size_t j = 0; j < restricted.size(); ++j)
            terms[j] = std::log((restricted[j] * c).norm() / nc) + scales[j];
        return pairwise_sum(terms) / (static_cast<double>(terms.size()) * R);
    };
    const SphereExtremes ext = optimize_on_sphere(objective, static_cast<int>(basis.cols()), rep.field(), n_vectors);
    return {ext.min_value, ext.max_value, basis * ext.argmin, basis * ext.argmax};
}

struct ExpectationInterval {
    double m = 0.0;
    double M = 0.0;
    double m_std_error = 0.0;
    double M_std_error = 0.0;
    Vector argmin;
    Vector argmax;
};

/// inf and sup over unit v in H of (1/n) E_0[log(||A(., n) v|| / ||v||)],
/// the expectation over a fixed sample of n_paths Brownian paths.
inline ExpectationInterval expectation_functions(const Representation& rep, const Matrix& H, double n,
                                                 std::size_t n_paths, std::size_t n_vectors, const RngStream& rng,
                                                 const PathOptions& opt = {})
{
    if (!(n >= 1.0))
        throw LyapunovError("expectation_functions: n must be >= 1");
    if (n_paths < 2)
        throw LyapunovError("expectation_functions: at least 2 paths are required");
    if (H.rows() != rep.dim())
        throw LyapunovError("expectation_functions: subspace basis has the wrong number of rows");
    const Matrix basis = orthonormal_columns(H);
    std::vector<CocycleValue> values = brownian_values(rep, n, n_paths, rng, opt);
    std::vector<Matrix> restricted;
    for (auto& a : values) {
        a.renormalize();
        restricted.push_back(a.matrix * basis);
    }
    auto samples = [&](const Vector& c) {
        const double nc = c.norm();
        std::vector<double> out(restricted.size());
        for (std::size_t p = 0; p < restricted.size(); ++p)
            out[p] = (std::log((restricted[p] * c).norm() / nc) + values[p].log_scale) / n;
        return out;
    };
    auto objective = [&](const Vector& c) {
        const auto s = samples(c);
        return pairwise_sum(s) / static_cast<double>(s.size());
    };
    const SphereExtremes ext = optimize_on_sphere(objective, static_cast<int>(basis.cols()), rep.field(), n_vectors);
    ExpectationInterval out;
    out.m = ext.min_value;
    out.M = ext.max_value;
    out.m_std_error = mean_and_error(samples(ext.argmin)).std_error;
    out.M_std_error = mean_and_error(samples(ext.argmax)).std_error;
    out.argmin = basis * ext.argmin;
    out.argmax = basis * ext.argmax;
    return out;
}

/// Compares E_eta[log ||A(., t) v||] for v = A(0 -> eta) u / ||A(0 -> eta) u||
/// with (D_t f)(eta) - f(eta) for the specialization f at 0 in direction u.
/// The two sides use independent streams unless `shared_streams` is set, in
/// which case they follow identical paths.
inline ComparisonReport check_exp_conversion(const Representation& rep, const Vector& u, const DiscPoint& eta,
                                             double t, std::size_t n_paths, const RngStream& rng,
                                             const PathOptions& opt = {}, bool shared_streams = false)
{
    if (!(t >= 0.5))
        throw LyapunovError("check_exp_conversion: t must be >= 0.5");
    const FuchsianGroup group = build_genus2();
    const Specialization spec = specialize(rep, u, DiscPoint{}, group);
    Vector v = cocycle_between(rep, DiscPoint{}, eta, group).value() * spec.direction();
    v.normalize();

    const RngStream left_rng = rng.child(0);
    const RngStream right_rng = shared_streams ? left_rng : rng.child(1);
    std::vector<double> left(n_paths);
    parallel_for(n_paths, opt.workers, [&](std::size_t i) {
        left[i] = brownian_cocycle(rep, group, eta, t, opt.step, left_rng.child(i)).log_growth(v);
    });
    Estimate right = diffuse(spec.field(), t, n_paths, right_rng, {eta, opt.step, opt.workers});
    right.mean -= spec(eta);
    return make_comparison("exp_conversion", mean_and_error(left), right);
}

struct ShadowingRow {
    double t = 0.0;
    double shadow_median = 0.0;
    double shadow_q95 = 0.0;
    double drift_median = 0.0;
    double drift_q95 = 0.0;
    double drift_ratio_median = 0.0; // median of dist(omega(t), 0) / t
};

struct ShadowingReport {
    std::vector<ShadowingRow> rows;
    double final_time = 0.0;
    double shadow_slope = 0.0;
    double drift_slope = 0.0;
    bool passed = false;
};

inline constexpr double kShadowingSlopeLimit = 0.1;
inline constexpr double kShadowingLogPower = 1.5;

/// Brownian shadowing diagnostics on the disc. Paths run to
/// max(t_list) + landing_margin; the angular coordinate there stands in for
/// the landing point. For each t the report gives quantiles of
/// dist(omega(t), gamma(t)) and |dist(omega(t), 0) - t|, both divided by
/// t^{1/2} (log t)^{1.5}; it passes when the log-log slopes of the 95th
/// percentiles over the t > 1 entries stay at or below 0.1.
inline ShadowingReport shadowing_report(std::size_t n_paths, const std::vector<double>& t_list, double step,
                                        const RngStream& rng, double landing_margin = 10.0,
                                        unsigned workers = default_workers())
{
    if (t_list.empty() || *std::max_element(t_list.begin(), t_list.end()) < 20.0)
        throw LyapunovError("shadowing_report: max(t_list) must be >= 20");
    if (n_paths < 2)
        throw LyapunovError("shadowing_report: at least 2 paths are required");
    std::vector<double> ts(t_list);
    std::sort(ts.begin(), ts.end());
    for (double t : ts)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw LyapunovError("shadowing_report: times must be finite and >= 0");
    const double t_final = ts.back() + landing_margin;
    check_sampler_args(t_final, step);
    const auto [n_steps, last] = step_schedule(t_final, step);
    std::vector<std::size_t> checkpoint(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k)
        checkpoint[k] = static_cast<std::size_t>(std::llround(ts[k] / step));

    const std::size_t nt = ts.size();
    std::vector<double> shadow(n_paths * nt), drift(n_paths * nt), ratio(n_paths * nt);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        RngStream s = rng.child(i);
        DiscPoint p;
        std::vector<double> rho(nt, 0.0), tail(nt, 0.0);
        std::size_t next = 0;
        while (next < nt && checkpoint[next] == 0)
            ++next;
        for (std::size_t j = 0; j < n_steps; ++j) {
            const GeodesicStep st = brownian_increment(p, j + 1 == n_steps ? last : step, s);
            p = st.point;
            for (std::size_t k = 0; k < next; ++k)
                tail[k] += st.angle_change;
            while (next < nt && checkpoint[next] == j + 1)
                rho[next++] = p.radius();
        }
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = ts[k];
            // Distance from omega(t) to the point at distance t on the landing ray.
            const double half_gap = std::sinh(0.5 * (rho[k] - t));
            const double sh = std::sin(0.5 * tail[k]);
            const double d = 2.0 * std::asinh(std::sqrt(half_gap * half_gap + std::sinh(rho[k]) * std::sinh(t) * sh * sh));
            const double scale = t > 1.0 ? std::sqrt(t) * std::pow(std::log(t), kShadowingLogPower) : 0.0;
            shadow[i * nt + k] = scale > 0.0 ? d / scale : d;
            drift[i * nt + k] = scale > 0.0 ? std::abs(rho[k] - t) / scale : std::abs(rho[k] - t);
            ratio[i * nt + k] = t > 0.0 ? rho[k] / t : 0.0;
        }
    });

    ShadowingReport out;
    out.final_time = t_final;
    std::vector<double> lx, ls, ld;
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<double> a(n_paths), b(n_paths), c(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            a[i] = shadow[i * nt + k];
            b[i] = drift[i * nt + k];
            c[i] = ratio[i * nt + k];
        }
        ShadowingRow row{ts[k], quantile(a, 0.5), quantile(a, 0.95), quantile(b, 0.5), quantile(b, 0.95), quantile(c, 0.5)};
        out.rows.push_back(row);
        if (ts[k] > 1.0) {
            lx.push_back(std::log(ts[k]));
            ls.push_back(std::log(row.shadow_q95));
            ld.push_back(std::log(row.drift_q95));
        }
    }
    out.shadow_slope = fit_slope(lx, ls);
    out.drift_slope = fit_slope(lx, ld);
    out.passed = out.shadow_slope <= kShadowingSlopeLimit && out.drift_slope <= kShadowingSlopeLimit;
    return out;
}

struct UniformityReport {
    std::vector<std::size_t> counts;
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool passed = true;
};

inline constexpr double kUniformityAlpha = 0.001;

/// Chi-square test of the final Brownian angles (plus `angle_offset`) against
/// the uniform distribution on n_bins equal arcs.
inline UniformityReport direction_distribution_check(std::size_t n_paths, double t, double step, std::size_t n_bins,
                                                     const RngStream& rng, double angle_offset = 0.0,
                                                     unsigned workers = default_workers())
{
    if (!(t >= 40.0))
        throw LyapunovError("direction_distribution_check: t must be >= 40");
    if (n_bins == 0 || n_paths == 0)
        throw LyapunovError("direction_distribution_check: need n_bins >= 1 and n_paths >= 1");
    std::vector<double> angles(n_paths);
    parallel_for(n_paths, workers,
                 [&](std::size_t i) { angles[i] = sample_endpoint(DiscPoint{}, t, step, rng.child(i)).angle(); });
    UniformityReport out;
    out.counts.assign(n_bins, 0);
    for (double a : angles) {
        double turns = (a + angle_offset) / kTwoPi;
        turns -= std::floor(turns);
        auto b = static_cast<std::size_t>(turns * static_cast<double>(n_bins));
        out.counts[std::min(b, n_bins - 1)]++;
    }
    out.dof = static_cast<int>(n_bins) - 1;
    if (out.dof == 0)
        return out;
    const double expected = static_cast<double>(n_paths) / static_cast<double>(n_bins);
    for (std::size_t c : out.counts) {
        const double dev = static_cast<double>(c) - expected;
        out.chi_square += dev * dev / expected;
    }
    out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.chi_square);
    out.passed = out.p_value > kUniformityAlpha;
    return out;
}

} // namespace hypcocycle
