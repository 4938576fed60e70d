#pragma once

// Representation cocycles over the genus-2 surface.
//
// A representation assigns a d x d matrix to each of the four canonical
// letters. With a constant identifier the cocycle along a leafwise path is the
// product of these matrices over the deck word of the path, the first
// crossing acting first:
//
//     A(path) = M_{l_n} ... M_{l_2} M_{l_1}   for track(path) = [l_1, ..., l_n]
//
// so that A(full) = A(tail) A(head). `cocycle_of_word` multiplies in the
// written order; `evaluate` therefore passes it the reversed track.

#include <hypcocycle/diffusion.hpp>
#include <hypcocycle/hypgeo.hpp>
#include <hypcocycle/random.hpp>
#include <hypcocycle/surface.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcocycle {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class CocycleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Field { real, complex };

inline const char* field_name(Field f) { return f == Field::real ? "real" : "complex"; }

inline constexpr double kExactRelatorTolerance = 1e-8;
inline constexpr double kConditionLimit = 1e12;

inline double condition_number(const Matrix& m)
{
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

inline double operator_norm(const Matrix& m)
{
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// A representation of the surface group: one matrix per canonical letter.
class Representation {
public:
    /// images[k] is the matrix of letter k+1. Throws on non-square, mismatched
    /// or numerically singular images, and on non-real entries for the real field.
    Representation(Field field, const std::array<Matrix, 4>& images, const FuchsianGroup& group = build_genus2())
        : field_(field), images_(images)
    {
        const auto d = images[0].rows();
        if (d < 1)
            throw CocycleError("Representation: dimension must be >= 1");
        for (int k = 0; k < 4; ++k) {
            const Matrix& m = images_[static_cast<std::size_t>(k)];
            const std::string which = "image " + std::to_string(k + 1);
            if (m.rows() != d || m.cols() != d)
                throw CocycleError("Representation: " + which + " is not " + std::to_string(d) + "x" +
                                   std::to_string(d));
            if (!m.allFinite())
                throw CocycleError("Representation: " + which + " has non-finite entries");
            if (field == Field::real && m.imag().cwiseAbs().maxCoeff() != 0.0)
                throw CocycleError("Representation: " + which + " has complex entries but the field is real");
            const double cond = condition_number(m);
            if (!(cond < kConditionLimit))
                throw CocycleError("Representation: " + which + " has condition number " + std::to_string(cond) +
                                   " (limit 1e12)");
            inverses_[static_cast<std::size_t>(k)] = m.inverse();
        }
        // The relator image in the convention of `evaluate`.
        const auto rel = group.relator().reversed();
        relator_image_ = Matrix::Identity(d, d);
        for (int l : rel.letters())
            relator_image_ = relator_image_ * image(l);
        relator_residual_ = (relator_image_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    }

    static Representation trivial(int d, Field field = Field::real)
    {
        const Matrix id = Matrix::Identity(d, d);
        return Representation(field, {id, id, id, id});
    }

    /// The first image is diag(entries); the others are the identity.
    static Representation diagonal(const std::vector<double>& entries)
    {
        const auto d = static_cast<Eigen::Index>(entries.size());
        Matrix first = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            first(i, i) = entries[static_cast<std::size_t>(i)];
        const Matrix id = Matrix::Identity(d, d);
        return Representation(Field::real, {first, id, id, id});
    }

    /// The first image is `first`; the others are the identity.
    static Representation single(const Matrix& first, Field field = Field::real)
    {
        const Matrix id = Matrix::Identity(first.rows(), first.cols());
        return Representation(field, {first, id, id, id});
    }

    /// The holonomy of the uniformization, as SU(1,1) matrices: letter k maps
    /// to the inverse of the coefficient matrix of its side pairing. Exact and
    /// with exponents +-1/2.
    static Representation fuchsian_holonomy(const FuchsianGroup& group)
    {
        std::array<Matrix, 4> images;
        for (int k = 1; k <= 4; ++k) {
            const MobiusMap& g = group.letter_map(k);
            Matrix m(2, 2);
            m << g.a(), g.b(), std::conj(g.b()), std::conj(g.a());
            images[static_cast<std::size_t>(k - 1)] = m.inverse();
        }
        return Representation(Field::complex, images, group);
    }

    Field field() const { return field_; }
    int dim() const { return static_cast<int>(images_[0].rows()); }
    const Matrix& image(int letter) const
    {
        if (letter == 0 || letter > 4 || letter < -4)
            throw CocycleError("Representation: letter " + std::to_string(letter) + " out of range");
        return letter > 0 ? images_[static_cast<std::size_t>(letter - 1)]
                          : inverses_[static_cast<std::size_t>(-letter - 1)];
    }
    const std::array<Matrix, 4>& images() const { return images_; }
    const Matrix& relator_image() const { return relator_image_; }
    double relator_residual() const { return relator_residual_; }
    bool exact() const { return relator_residual_ <= kExactRelatorTolerance; }

    void require_exact(const char* who) const
    {
        if (!exact())
            throw CocycleError(std::string(who) + ": representation is projective-only (relator residual " +
                               std::to_string(relator_residual_) + " > 1e-8)");
    }

private:
    Field field_;
    std::array<Matrix, 4> images_;
    std::array<Matrix, 4> inverses_;
    Matrix relator_image_;
    double relator_residual_ = 0.0;
};

inline constexpr double kOverflowGuard = 1e300;

/// A matrix together with a log-scale factor: the value is exp(log_scale) * matrix.
struct CocycleValue {
    Matrix matrix;
    double log_scale = 0.0;

    static CocycleValue identity(int d) { return {Matrix::Identity(d, d), 0.0}; }

    int dim() const { return static_cast<int>(matrix.rows()); }

    /// The unscaled matrix; overflows to inf when log_scale is large.
    Matrix value() const { return matrix * std::exp(log_scale); }

    /// this <- m * this, rescaling when the product could leave the double range.
    void left_multiply(const Matrix& m)
    {
        const double bound = matrix.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff() * static_cast<double>(dim());
        if (bound > kOverflowGuard || (bound < 1.0 / kOverflowGuard && bound > 0.0))
            renormalize();
        matrix = m * matrix;
    }

    /// this <- this * m, with the same guard.
    void right_multiply(const Matrix& m)
    {
        const double bound = matrix.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff() * static_cast<double>(dim());
        if (bound > kOverflowGuard || (bound < 1.0 / kOverflowGuard && bound > 0.0))
            renormalize();
        matrix = matrix * m;
    }

    void renormalize()
    {
        const double s = matrix.cwiseAbs().maxCoeff();
        if (s > 0.0 && std::isfinite(s)) {
            matrix *= 1.0 / s; // complex division by s would square s and overflow
            log_scale += std::log(s);
        }
    }

    /// Copy with largest entry of modulus 1. Factorizations and norms need it:
    /// complex division and squared norms overflow long before 1e300.
    CocycleValue normalized() const
    {
        CocycleValue c = *this;
        c.renormalize();
        return c;
    }

    /// log(||A v|| / ||v||).
    double log_growth(const Vector& v) const
    {
        const double nv = v.norm();
        if (nv == 0.0)
            throw CocycleError("log_growth: zero vector");
        const CocycleValue n = normalized();
        return std::log((n.matrix * v).norm() / nv) + n.log_scale;
    }

    /// log of the operator norm.
    double log_norm() const
    {
        const CocycleValue n = normalized();
        return std::log(operator_norm(n.matrix)) + n.log_scale;
    }

    double log_abs_det() const
    {
        // Sum of log pivots: the determinant itself can leave the double range.
        const CocycleValue n = normalized();
        const Eigen::FullPivLU<Matrix> lu(n.matrix);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < lu.matrixLU().rows(); ++i)
            sum += std::log(std::abs(lu.matrixLU()(i, i)));
        return sum + static_cast<double>(dim()) * n.log_scale;
    }
};

/// Product of the letter images in the written order.
inline CocycleValue cocycle_of_word(const Representation& rep, const DeckWord& word)
{
    rep.require_exact("cocycle_of_word");
    CocycleValue out = CocycleValue::identity(rep.dim());
    for (int l : word.letters())
        out.right_multiply(rep.image(l));
    return out;
}

/// The cocycle along a leafwise path.
inline CocycleValue evaluate(const Representation& rep, const LeafPath& path, const FuchsianGroup& group)
{
    return cocycle_of_word(rep, track(path, group).reversed());
}

/// The cocycle along any path from `from` to `to` in the disc.
inline CocycleValue cocycle_between(const Representation& rep, const DiscPoint& from, const DiscPoint& to,
                                    const FuchsianGroup& group)
{
    const DeckWord word = locate(from, group).word.inverse().concat(locate(to, group).word);
    return cocycle_of_word(rep, word.reversed());
}

/// The field zeta -> log(||A(base -> zeta) u|| / ||u||).
class Specialization {
public:
    Specialization(std::shared_ptr<const Representation> rep, std::shared_ptr<const FuchsianGroup> group,
                   const Vector& u, const DiscPoint& base = {})
        : rep_(std::move(rep)), group_(std::move(group)), base_(base)
    {
        rep_->require_exact("specialize");
        if (u.size() != rep_->dim())
            throw CocycleError("specialize: direction has the wrong dimension");
        const double n = u.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw CocycleError("specialize: direction must be nonzero");
        u_ = u / n;
        base_word_inverse_ = locate(base_, *group_).word.inverse();
    }

    const DiscPoint& base() const { return base_; }
    const Vector& direction() const { return u_; }
    const Representation& representation() const { return *rep_; }

    double operator()(const DiscPoint& zeta) const
    {
        const DeckWord word = base_word_inverse_.concat(locate(zeta, *group_).word);
        if (word.empty())
            return 0.0;
        return cocycle_of_word(*rep_, word.reversed()).log_growth(u_);
    }

    ScalarField field() const
    {
        auto self = std::make_shared<Specialization>(*this);
        return {"specialization", [self](const DiscPoint& p) { return (*self)(p); }, {}};
    }

private:
    std::shared_ptr<const Representation> rep_;
    std::shared_ptr<const FuchsianGroup> group_;
    DiscPoint base_;
    Vector u_;
    DeckWord base_word_inverse_;
};

inline Specialization specialize(const Representation& rep, const Vector& u, const DiscPoint& base = {},
                                 const FuchsianGroup& group = build_genus2())
{
    return Specialization(std::make_shared<Representation>(rep), std::make_shared<FuchsianGroup>(group), u, base);
}

struct RegularityFit {
    double alpha_fit = 0.0;
    double c_fit = 0.0;
    double lipschitz_c = 0.0;
    std::vector<double> bin_distance;
    std::vector<double> bin_envelope;
};

inline constexpr std::size_t kRegularityBins = 16;

/// Growth probe for a scalar field. Pairs (y, z) are drawn with y at distance
/// at most radius/2 from 0 and z at distance uniform in (0, radius] from y.
/// The per-bin maximum of |f(y) - f(z)| forms the upper envelope; alpha and c
/// come from the log-log least-squares fit env = c d^alpha, and lipschitz_c is
/// the least-squares slope of env against d over bins with d >= 1.
inline RegularityFit estimate_regularity(const ScalarField& f, std::size_t n_pairs, double radius,
                                         const RngStream& rng, unsigned workers = default_workers())
{
    if (n_pairs < 100)
        throw CocycleError("estimate_regularity: at least 100 pairs are required");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw CocycleError("estimate_regularity: radius must be positive");
    std::vector<double> dist(n_pairs), diff(n_pairs);
    parallel_for(n_pairs, workers, [&](std::size_t i) {
        RngStream s = rng.child(i);
        const DiscPoint y = DiscPoint::polar(0.5 * radius * s.uniform(), kTwoPi * s.uniform());
        const double d = radius * (1.0 - s.uniform());
        const DiscPoint z = geodesic_step(y, d, kTwoPi * s.uniform()).point;
        dist[i] = d;
        diff[i] = std::abs(f(y) - f(z));
    });

    std::vector<double> env(kRegularityBins, -1.0), at(kRegularityBins, 0.0);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        auto b = static_cast<std::size_t>(dist[i] / radius * static_cast<double>(kRegularityBins));
        b = std::min(b, kRegularityBins - 1);
        if (diff[i] > env[b]) {
            env[b] = diff[i];
            at[b] = dist[i];
        }
    }

    RegularityFit out;
    std::vector<double> lx, ly, dx, dy;
    for (std::size_t b = 0; b < kRegularityBins; ++b) {
        if (env[b] < 0.0)
            continue;
        out.bin_distance.push_back(at[b]);
        out.bin_envelope.push_back(env[b]);
        if (env[b] > 0.0) {
            lx.push_back(std::log(at[b]));
            ly.push_back(std::log(env[b]));
        }
        if (at[b] >= 1.0) {
            dx.push_back(at[b]);
            dy.push_back(env[b]);
        }
    }
    if (lx.empty())
        return out;
    if (lx.size() >= 2) {
        out.alpha_fit = fit_slope(lx, ly);
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        out.c_fit = std::exp(my - out.alpha_fit * mx);
    } else {
        out.c_fit = std::exp(ly[0]);
    }
    out.lipschitz_c = std::max(0.0, fit_slope(dx, dy));
    return out;
}

inline RegularityFit estimate_regularity(const Specialization& spec, std::size_t n_pairs, double radius,
                                         const RngStream& rng, unsigned workers = default_workers())
{
    return estimate_regularity(spec.field(), n_pairs, radius, rng, workers);
}

} // namespace hypcocycle
