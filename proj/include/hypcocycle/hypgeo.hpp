#pragma once

// Curvature -1 geometry on the Poincare disc.
//
// Metric: ds = 2|dz| / (1 - |z|^2). A point at Euclidean radius r sits at
// hyperbolic distance log((1 + r) / (1 - r)) = 2 atanh(r) from the origin.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hypcocycle {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Points whose Euclidean modulus reaches this bound are rejected by the
/// Euclidean constructor.
inline constexpr double kDiscBoundaryGuard = 1.0 - 1e-15;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point of the open unit disc.
///
/// Besides the Euclidean coordinates the point caches its hyperbolic distance
/// to the origin. Points created with `polar` keep that radius exactly even
/// when `tanh(radius / 2)` rounds to 1 in double precision, which is what the
/// long-horizon samplers rely on.
class DiscPoint {
public:
    DiscPoint() = default;

    DiscPoint(double re, double im) : z_(re, im)
    {
        if (!std::isfinite(re) || !std::isfinite(im))
            throw GeometryError("DiscPoint: non-finite coordinate");
        const double m = std::abs(z_);
        if (m >= kDiscBoundaryGuard)
            throw GeometryError("DiscPoint: |z| = " + std::to_string(m) + " is not inside the disc");
        rho_ = 2.0 * std::atanh(m);
    }

    explicit DiscPoint(Complex z) : DiscPoint(z.real(), z.imag()) {}

    /// Point at hyperbolic distance `radius` from 0 in Euclidean direction `angle`.
    static DiscPoint polar(double radius, double angle)
    {
        if (!std::isfinite(radius) || radius < 0.0 || !std::isfinite(angle))
            throw GeometryError("DiscPoint::polar: radius must be finite and >= 0");
        DiscPoint p;
        p.z_ = std::polar(std::tanh(0.5 * radius), angle);
        p.rho_ = radius;
        return p;
    }

    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }
    Complex z() const { return z_; }

    /// Hyperbolic distance to the origin.
    double radius() const { return rho_; }

    /// Euclidean argument in (-pi, pi]; 0 for the origin.
    double angle() const { return std::arg(z_); }

    /// cosh(radius / 2) = 1 / sqrt(1 - |z|^2), computed without cancellation.
    double conformal_half() const { return std::cosh(0.5 * rho_); }

    DiscPoint operator-() const
    {
        DiscPoint p = *this;
        p.z_ = -z_;
        return p;
    }

    friend bool operator==(const DiscPoint& a, const DiscPoint& b) { return a.z_ == b.z_; }

private:
    friend class MobiusMap;
    static DiscPoint unchecked(Complex z, double rho)
    {
        DiscPoint p;
        p.z_ = z;
        p.rho_ = rho;
        return p;
    }

    Complex z_{0.0, 0.0};
    double rho_ = 0.0;
};

/// Hyperbolic distance between two disc points.
inline double dist_P(const DiscPoint& p, const DiscPoint& q)
{
    const double rp = p.radius();
    const double rq = q.radius();
    if (rp < 20.0 && rq < 20.0) {
        // sinh(d/2) = |p - q| / sqrt((1 - |p|^2)(1 - |q|^2))
        const double s = std::abs(p.z() - q.z()) * p.conformal_half() * q.conformal_half();
        return 2.0 * std::asinh(s);
    }
    // Polar form, stable for points near the ideal boundary:
    // sinh^2(d/2) = sinh^2((rp - rq)/2) + sinh(rp) sinh(rq) sin^2(dphi/2)
    const double half_gap = std::sinh(0.5 * (rp - rq));
    const double dphi = std::arg(p.z() * std::conj(q.z()));
    const double s = std::sin(0.5 * dphi);
    const double s2 = half_gap * half_gap + std::sinh(rp) * std::sinh(rq) * s * s;
    return 2.0 * std::asinh(std::sqrt(s2));
}

/// Inverse of the radius conversion: the Euclidean radius r with
/// log((1 + r) / (1 - r)) = R.
inline double radius_for_R(double R)
{
    if (!std::isfinite(R) || R < 0.0)
        throw GeometryError("radius_for_R: R must be finite and >= 0");
    return std::tanh(0.5 * R);
}

/// Hyperbolic radius of the Euclidean radius r.
inline double R_for_radius(double r)
{
    if (!(r >= 0.0 && r < 1.0))
        throw GeometryError("R_for_radius: r must lie in [0, 1)");
    return std::log((1.0 + r) / (1.0 - r));
}

/// Disc automorphism z -> (a z + b) / (conj(b) z + conj(a)) with |a|^2 - |b|^2 = 1.
class MobiusMap {
public:
    MobiusMap() = default;

    /// Normalizes an arbitrary coefficient pair; rejects degenerate ones.
    MobiusMap(Complex a, Complex b) : a_(a), b_(b)
    {
        const double det = std::norm(a) - std::norm(b);
        if (!std::isfinite(det) || std::abs(det) < 1e-14)
            throw GeometryError("MobiusMap: degenerate coefficient matrix");
        if (det < 0.0)
            throw GeometryError("MobiusMap: coefficients do not preserve the disc");
        const double s = 1.0 / std::sqrt(det);
        a_ *= s;
        b_ *= s;
    }

    static MobiusMap identity() { return {}; }

    /// Rotation z -> e^{i angle} z.
    static MobiusMap rotation(double angle)
    {
        return raw(std::polar(1.0, 0.5 * angle), Complex{0.0, 0.0});
    }

    /// Hyperbolic translation of length R along the diameter in direction
    /// `theta` (in turns). Sends 0 to the point at distance R on that ray.
    static MobiusMap translation(double theta, double R)
    {
        if (!std::isfinite(R) || R < 0.0)
            throw GeometryError("MobiusMap::translation: length must be finite and >= 0");
        return raw(Complex{std::cosh(0.5 * R), 0.0}, std::polar(std::sinh(0.5 * R), kTwoPi * theta));
    }

    /// The chart sending 0 to p with positive real derivative at 0.
    static MobiusMap chart_at(const DiscPoint& p)
    {
        const double h = 0.5 * p.radius();
        return raw(Complex{std::cosh(h), 0.0}, std::polar(std::sinh(h), p.angle()));
    }

    Complex a() const { return a_; }
    Complex b() const { return b_; }

    Complex denominator(Complex z) const { return std::conj(b_) * z + std::conj(a_); }

    DiscPoint operator()(const DiscPoint& p) const
    {
        const Complex den = denominator(p.z());
        const Complex w = (a_ * p.z() + b_) / den;
        const double m = std::abs(w);
        double rho;
        if (m < 0.9) {
            rho = 2.0 * std::atanh(m);
        } else {
            // cosh(rho'/2) = cosh(rho/2) |conj(b) z + conj(a)|
            rho = 2.0 * std::acosh(std::max(1.0, p.conformal_half() * std::abs(den)));
        }
        return DiscPoint::unchecked(w, rho);
    }

    /// Complex derivative at z.
    Complex derivative(Complex z) const
    {
        const Complex den = denominator(z);
        return 1.0 / (den * den);
    }

    /// Argument of the derivative at z: the rotation the map applies to
    /// tangent directions at z.
    double turning(Complex z) const { return -2.0 * std::arg(denominator(z)); }

    /// Composition (*this) o other.
    MobiusMap operator*(const MobiusMap& other) const
    {
        const Complex a = a_ * other.a_ + b_ * std::conj(other.b_);
        const Complex b = a_ * other.b_ + b_ * std::conj(other.a_);
        MobiusMap m = raw(a, b);
        // Renormalize only while the determinant can be computed accurately.
        if (std::norm(a) < 1e6) {
            const double det = std::norm(a) - std::norm(b);
            const double s = 1.0 / std::sqrt(det);
            m.a_ *= s;
            m.b_ *= s;
        }
        return m;
    }

    MobiusMap inverse() const { return raw(std::conj(a_), -b_); }

    /// Largest coefficient difference to `other`, modulo the global sign.
    double distance_to(const MobiusMap& other) const
    {
        const double plus = std::max(std::abs(a_ - other.a_), std::abs(b_ - other.b_));
        const double minus = std::max(std::abs(a_ + other.a_), std::abs(b_ + other.b_));
        return std::min(plus, minus);
    }

private:
    static MobiusMap raw(Complex a, Complex b)
    {
        MobiusMap m;
        m.a_ = a;
        m.b_ = b;
        return m;
    }

    Complex a_{1.0, 0.0};
    Complex b_{0.0, 0.0};
};

inline DiscPoint mobius_apply(const MobiusMap& m, const DiscPoint& p) { return m(p); }
inline MobiusMap mobius_compose(const MobiusMap& outer, const MobiusMap& inner) { return outer * inner; }
inline MobiusMap mobius_inverse(const MobiusMap& m) { return m.inverse(); }
inline MobiusMap mobius_translation(double theta, double R) { return MobiusMap::translation(theta, R); }

/// Unit-speed geodesic ray from `base` in leaf-direction `direction` (turns).
/// A non-origin base uses the chart with positive real derivative at 0.
struct GeodesicRay {
    DiscPoint base;
    double direction = 0.0;
};

inline DiscPoint geodesic_eval(const GeodesicRay& ray, double R)
{
    if (!std::isfinite(R) || R < 0.0)
        throw GeometryError("geodesic_eval: R must be finite and >= 0");
    const DiscPoint local = DiscPoint::polar(R, kTwoPi * ray.direction);
    if (ray.base.radius() == 0.0)
        return local;
    return MobiusMap::chart_at(ray.base)(local);
}

/// Result of moving a point geodesically.
struct GeodesicStep {
    DiscPoint point;
    /// Change of the Euclidean argument, accurate even when it is tiny.
    double angle_change = 0.0;
};

/// Moves `p` a hyperbolic distance `length` along the geodesic leaving p with
/// Euclidean direction `direction` (radians).
///
/// Near the origin the step goes through the chart at p; far out it uses the
/// hyperbolic law of cosines in polar coordinates so that the radius stays
/// exact and the angular change keeps full relative precision.
inline GeodesicStep geodesic_step(const DiscPoint& p, double length, double direction)
{
    constexpr double kPolarThreshold = 10.0;
    if (p.radius() < kPolarThreshold) {
        const DiscPoint q = MobiusMap::chart_at(p)(DiscPoint::polar(length, direction));
        const double dphi = p.radius() == 0.0 ? q.angle() : std::arg(q.z() * std::conj(p.z()));
        return {q, dphi};
    }
    const double rho = p.radius();
    const double beta = direction - p.angle();
    const double cb = std::cos(beta);
    const double sb = std::sin(beta);
    const double ch = std::cosh(rho) * std::cosh(length) + std::sinh(rho) * std::sinh(length) * cb;
    const double rho_new = std::acosh(ch);
    const double s = std::clamp(std::sinh(length) * sb / std::sinh(rho_new), -1.0, 1.0);
    double dphi = std::asin(s);
    // The angle at the origin exceeds pi/2 only if the step overshoots the
    // foot of the perpendicular, impossible while length < rho.
    return {DiscPoint::polar(rho_new, p.angle() + dphi), dphi};
}

/// Exponential map at p in normal coordinates; `v` is a tangent vector in the
/// Euclidean frame at p, measured in hyperbolic units.
inline DiscPoint exp_map(const DiscPoint& p, Complex v)
{
    const double len = std::abs(v);
    if (len == 0.0)
        return p;
    return geodesic_step(p, len, std::arg(v)).point;
}

} // namespace hypcocycle
