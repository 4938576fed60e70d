#pragma once

// The genus-2 surface as the quotient of the disc by the side pairings of the
// regular octagon with interior angles pi/4.
//
// Side k (1..8) is the geodesic segment perpendicular to the ray at angle
// (k-1) pi/4. Generator g_k is the translation along that ray which maps side
// k onto the opposite side k+4, so g_{k+4} = g_k^{-1}. Deck words use the
// canonical letters +-1..+-4: letter j > 0 is g_j and letter -j is g_{j+4}.
//
// A word [l1, l2, ..., ln] evaluates to g_{l1} o g_{l2} o ... o g_{ln}; the
// tile reached by a path that first crosses into g_{l1} F, then into
// g_{l1} g_{l2} F, and so on.

#include <hypcocycle/diffusion.hpp>
#include <hypcocycle/hypgeo.hpp>
#include <hypcocycle/random.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcocycle {

class SurfaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical letter (+-1..+-4) of generator g_k, k in 1..8.
inline int generator_letter(int k) { return k <= 4 ? k : -(k - 4); }

/// Generator index (1..8) of a canonical letter.
inline int letter_generator(int letter) { return letter > 0 ? letter : -letter + 4; }

class FuchsianGroup;

/// A freely reduced word in the canonical letters.
class DeckWord {
public:
    DeckWord() = default;

    explicit DeckWord(const std::vector<int>& letters)
    {
        for (int l : letters)
            append(l);
    }

    /// Appends a letter, cancelling it against a trailing inverse.
    void append(int letter)
    {
        if (letter == 0 || letter > 4 || letter < -4)
            throw SurfaceError("DeckWord: letter " + std::to_string(letter) + " out of range");
        if (!letters_.empty() && letters_.back() == -letter)
            letters_.pop_back();
        else
            letters_.push_back(letter);
    }

    void append(const DeckWord& tail)
    {
        for (int l : tail.letters_)
            append(l);
    }

    DeckWord concat(const DeckWord& tail) const
    {
        DeckWord w = *this;
        w.append(tail);
        return w;
    }

    DeckWord inverse() const
    {
        DeckWord w;
        w.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
            w.letters_.push_back(-*it);
        return w;
    }

    /// The same letters in reverse order (not the group inverse).
    DeckWord reversed() const
    {
        DeckWord w;
        w.letters_.assign(letters_.rbegin(), letters_.rend());
        return w;
    }

    const std::vector<int>& letters() const { return letters_; }
    bool empty() const { return letters_.empty(); }
    std::size_t size() const { return letters_.size(); }

    MobiusMap evaluate(const FuchsianGroup& group) const;

    std::string str() const
    {
        std::string s = "[";
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (i)
                s += ", ";
            s += std::to_string(letters_[i]);
        }
        return s + "]";
    }

    friend bool operator==(const DeckWord&, const DeckWord&) = default;

private:
    std::vector<int> letters_;
};

struct Side {
    DiscPoint start;
    DiscPoint end;
};

inline constexpr double kSideTolerance = 1e-13;

class FuchsianGroup {
public:
    static constexpr int kSides = 8;

    /// Side pairings in the order whose product is the identity.
    static constexpr std::array<int, 8> kRelatorGenerators{1, 6, 3, 8, 5, 2, 7, 4};

    FuchsianGroup(double circumradius, double side_distance) : circumradius_(circumradius), side_distance_(side_distance)
    {
        coth_side_ = 1.0 / std::tanh(side_distance);
        for (int k = 1; k <= kSides; ++k) {
            const double phi = (k - 1) * std::numbers::pi / 4.0;
            directions_[k - 1] = std::polar(1.0, phi);
            sides_[k - 1] = {DiscPoint::polar(circumradius, phi - std::numbers::pi / 8.0),
                             DiscPoint::polar(circumradius, phi + std::numbers::pi / 8.0)};
            const double toward_opposite = static_cast<double>((k - 1 + 4) % 8) / 8.0;
            generators_[k - 1] = MobiusMap::translation(toward_opposite, 2.0 * side_distance);
        }
    }

    const MobiusMap& generator(int k) const { return generators_.at(static_cast<std::size_t>(k - 1)); }
    const MobiusMap& letter_map(int letter) const { return generator(letter_generator(letter)); }
    const Side& side(int k) const { return sides_.at(static_cast<std::size_t>(k - 1)); }

    /// Hyperbolic distance from the centre to each vertex.
    double circumradius() const { return circumradius_; }
    /// Hyperbolic distance from the centre to each side.
    double side_distance() const { return side_distance_; }

    /// Nonnegative exactly when z lies on the centre's side of side k. The
    /// value is proportional, with a factor common to all sides, to
    /// cosh d(z, T_k 0) - cosh d(z, 0) where T_k 0 is the centre of the
    /// neighbouring tile across side k.
    double slack(Complex z, int k) const
    {
        const Complex dir = directions_[static_cast<std::size_t>(k - 1)];
        return 1.0 + std::norm(z) - 2.0 * coth_side_ * (z * std::conj(dir)).real();
    }

    /// The side with the most negative slack below -tolerance, or 0 when z
    /// lies in the closed domain. Ties go to the smallest index.
    int violated_side(Complex z, double tolerance = kSideTolerance) const
    {
        int worst = 0;
        double worst_slack = -tolerance;
        for (int k = 1; k <= kSides; ++k) {
            const double s = slack(z, k);
            if (s < worst_slack) {
                worst_slack = s;
                worst = k;
            }
        }
        return worst;
    }

    bool contains(Complex z, double tolerance = 1e-9) const { return violated_side(z, tolerance) == 0; }

    /// Letter of the translation carrying F onto its neighbour across side k.
    static int letter_across(int k) { return generator_letter((k + 3) % 8 + 1); }

    DeckWord relator() const
    {
        DeckWord w;
        for (int k : kRelatorGenerators)
            w.append(generator_letter(k));
        return w;
    }

    /// Coefficient distance of the relator product to the identity.
    double relator_residual() const
    {
        MobiusMap m;
        for (int k : kRelatorGenerators)
            m = m * generator(k);
        return m.distance_to(MobiusMap::identity());
    }

    /// Interior angle at the vertex shared by sides 1 and 2.
    double interior_angle() const { return octagon_vertex_angle(circumradius_); }

    /// Interior angle of the regular octagon with the given circumradius.
    static double octagon_vertex_angle(double circumradius)
    {
        const double q = std::numbers::pi / 8.0;
        const DiscPoint v = DiscPoint::polar(circumradius, q);
        const MobiusMap to_origin = MobiusMap::chart_at(v).inverse();
        const double d1 = to_origin(DiscPoint::polar(circumradius, -q)).angle();
        const double d2 = to_origin(DiscPoint::polar(circumradius, 3.0 * q)).angle();
        return std::abs(std::remainder(d1 - d2, 2.0 * std::numbers::pi));
    }

private:
    double circumradius_;
    double side_distance_;
    double coth_side_;
    std::array<Complex, 8> directions_{};
    std::array<Side, 8> sides_{};
    std::array<MobiusMap, 8> generators_{};
};

inline MobiusMap DeckWord::evaluate(const FuchsianGroup& group) const
{
    MobiusMap m;
    for (int l : letters_)
        m = m * group.letter_map(l);
    return m;
}

/// Regular octagon with interior angle pi/4 and opposite-side pairings. The
/// circumradius is found by bisection on the (decreasing) vertex angle.
inline FuchsianGroup build_genus2()
{
    const double target = std::numbers::pi / 4.0;
    double lo = 0.1, hi = 10.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (FuchsianGroup::octagon_vertex_angle(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    const double circumradius = 0.5 * (lo + hi);
    if (std::abs(FuchsianGroup::octagon_vertex_angle(circumradius) - target) > 1e-9)
        throw SurfaceError("build_genus2: circumradius bisection did not converge");
    // Right triangle (centre, side midpoint, vertex) with angle pi/8 at the centre.
    const double side_distance = std::atanh(std::tanh(circumradius) * std::cos(std::numbers::pi / 8.0));
    return FuchsianGroup(circumradius, side_distance);
}

inline constexpr std::size_t kLocateIterationCap = 1'000'000;

/// Moves w into the closed fundamental domain, one neighbouring tile at a
/// time. For every move, on_move(letter, step_map) is called where step_map
/// is the inverse of letter_map(letter) and has just been applied to w.
template <class OnMove>
void reduce_into_domain(DiscPoint& w, const FuchsianGroup& group, OnMove&& on_move)
{
    for (std::size_t it = 0;; ++it) {
        const int k = group.violated_side(w.z());
        if (k == 0)
            return;
        if (it >= kLocateIterationCap)
            throw SurfaceError("locate: iteration cap reached (geometry bug)");
        const int letter = FuchsianGroup::letter_across(k);
        const MobiusMap& back = group.letter_map(-letter);
        const Complex before = w.z();
        w = back(w);
        on_move(letter, back, before);
    }
}

struct Located {
    DiscPoint representative;
    DeckWord word;
    MobiusMap chart; // word.evaluate(group), maintained incrementally
};

/// Representative of z in the fundamental domain and the deck word with
/// z = word.evaluate(group)(representative).
inline Located locate(const DiscPoint& z, const FuchsianGroup& group)
{
    Located out{z, {}, {}};
    reduce_into_domain(out.representative, group, [&](int letter, const MobiusMap&, Complex) {
        out.word.append(letter);
        out.chart = out.chart * group.letter_map(letter);
    });
    return out;
}

inline constexpr double kTrackSegmentLimit = 0.1;

struct TrackResult {
    Located start;
    DeckWord word;              // relative to the start tile
    DiscPoint representative;   // of the final point
    MobiusMap chart;            // universal end = chart(representative)
};

/// Deck word of a path's homotopy class rel endpoints, relative to the tile
/// of its starting point, by following side crossings sample by sample.
inline TrackResult track_detailed(const LeafPath& path, const FuchsianGroup& group)
{
    TrackResult out;
    out.start = locate(path.start(), group);
    out.chart = out.start.chart;
    out.representative = out.start.representative;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double d = dist_P(path.points[i - 1], path.points[i]);
        if (!(d < kTrackSegmentLimit)) {
            std::ostringstream msg;
            msg << "track: segment " << i - 1 << "->" << i << " (t=" << path.times[i] << ") has length " << d
                << ", limit " << kTrackSegmentLimit;
            throw SurfaceError(msg.str());
        }
        DiscPoint w = out.chart.inverse()(path.points[i]);
        reduce_into_domain(w, group, [&](int letter, const MobiusMap&, Complex) {
            out.word.append(letter);
            out.chart = out.chart * group.letter_map(letter);
        });
        out.representative = w;
    }
    return out;
}

inline DeckWord track(const LeafPath& path, const FuchsianGroup& group) { return track_detailed(path, group).word; }

/// Brownian motion on the surface, kept as a point of the fundamental domain
/// plus the deck word accumulated since the start. The chart relating the
/// domain to the universal cover is tracked so that increments are drawn in
/// the same Euclidean frame as `sample_path`; with equal streams both
/// samplers produce the same path.
class SurfaceWalker {
public:
    SurfaceWalker(const FuchsianGroup& group, const DiscPoint& start) : group_(&group)
    {
        const Located loc = locate(start, group);
        position_ = loc.representative;
        chart_ = loc.chart;
    }

    const DiscPoint& position() const { return position_; }
    const MobiusMap& chart() const { return chart_; }
    const DeckWord& word() const { return word_; }

    /// Moves by `length` in the universal Euclidean direction `direction`;
    /// on_letter(letter) is called for each tile crossed, in order.
    template <class OnLetter>
    void move(double length, double direction, OnLetter&& on_letter)
    {
        if (length == 0.0)
            return;
        const double local = direction - chart_.turning(position_.z());
        position_ = MobiusMap::chart_at(position_)(DiscPoint::polar(length, local));
        reduce_into_domain(position_, *group_, [&](int letter, const MobiusMap&, Complex) {
            word_.append(letter);
            chart_ = chart_ * group_->letter_map(letter);
            on_letter(letter);
        });
    }

    template <class OnLetter>
    void brownian_step(double dt, RngStream& rng, OnLetter&& on_letter)
    {
        const auto [n1, n2] = rng.normal_pair();
        const double s = std::sqrt(2.0 * dt);
        const Complex v(s * n1, s * n2);
        move(std::abs(v), std::arg(v), on_letter);
    }

    /// Runs Brownian motion for time t with the schedule of `sample_path`.
    template <class OnLetter>
    void run_brownian(double t, double step, RngStream& rng, OnLetter&& on_letter)
    {
        check_sampler_args(t, step);
        const auto [n, last] = step_schedule(t, step);
        for (std::size_t i = 0; i < n; ++i)
            brownian_step(i + 1 == n ? last : step, rng, on_letter);
    }

private:
    const FuchsianGroup* group_;
    DiscPoint position_;
    MobiusMap chart_;
    DeckWord word_;
};

/// Unit-speed geodesic on the surface, followed in the fundamental domain.
/// The tangent direction is carried along exactly; long rays are pseudo-orbits
/// whose tile sequence is that of a ray with a direction within rounding of
/// the requested one near the start.
class GeodesicWalker {
public:
    GeodesicWalker(const FuchsianGroup& group, const GeodesicRay& ray) : group_(&group)
    {
        const Located loc = locate(ray.base, group);
        position_ = loc.representative;
        direction_ = kTwoPi * ray.direction - loc.chart.turning(position_.z());
    }

    const DiscPoint& position() const { return position_; }
    const DeckWord& word() const { return word_; }

    template <class OnLetter>
    void advance(double length, OnLetter&& on_letter)
    {
        const DiscPoint u = DiscPoint::polar(length, direction_);
        const MobiusMap chart = MobiusMap::chart_at(position_);
        direction_ += chart.turning(u.z());
        position_ = chart(u);
        reduce_into_domain(position_, *group_, [&](int letter, const MobiusMap& back, Complex before) {
            direction_ += back.turning(before);
            word_.append(letter);
            on_letter(letter);
        });
        direction_ = std::remainder(direction_, kTwoPi);
    }

    void advance(double length)
    {
        advance(length, [](int) {});
    }

private:
    const FuchsianGroup* group_;
    DiscPoint position_;
    double direction_ = 0.0;
    DeckWord word_;
};

inline constexpr double kGeodesicSpacing = 0.05;

/// Deck word of the geodesic ray gamma_{base, theta} on [0, R].
inline DeckWord geodesic_word(const FuchsianGroup& group, const GeodesicRay& ray, double R,
                              double spacing = kGeodesicSpacing)
{
    if (!(R >= 0.0) || !(spacing > 0.0) || spacing > kGeodesicSpacing)
        throw SurfaceError("geodesic_word: need R >= 0 and 0 < spacing <= 0.05");
    GeodesicWalker walker(group, ray);
    double done = 0.0;
    while (done < R) {
        const double h = std::min(spacing, R - done);
        walker.advance(h);
        done += h;
    }
    return walker.word();
}

/// Text export of the side pairings: one line per generator with the
/// coefficients of z -> (a z + b) / (conj(b) z + conj(a)), 17 significant digits.
inline std::string dump_generators(const FuchsianGroup& group)
{
    std::ostringstream out;
    out.precision(17);
    out << "# genus2-octagon side pairings: z -> (a z + b) / (conj(b) z + conj(a))\n";
    out << "# columns: name a_re a_im b_re b_im\n";
    out << "circumradius " << group.circumradius() << "\n";
    out << "side_distance " << group.side_distance() << "\n";
    for (int k = 1; k <= FuchsianGroup::kSides; ++k) {
        const MobiusMap& g = group.generator(k);
        out << "g" << k << ' ' << g.a().real() << ' ' << g.a().imag() << ' ' << g.b().real() << ' ' << g.b().imag()
            << "\n";
    }
    return out.str();
}

} // namespace hypcocycle
