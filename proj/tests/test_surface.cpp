#include <hypcocycle/diffusion.hpp>
#include <hypcocycle/surface.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace hypcocycle;

namespace {

const FuchsianGroup& group()
{
    static const FuchsianGroup g = build_genus2();
    return g;
}

double point_error(const DiscPoint& a, const DiscPoint& b) { return std::abs(a.z() - b.z()); }

// Straight geodesic from p to q sampled at roughly `spacing`.
LeafPath segment(const DiscPoint& p, const DiscPoint& q, double spacing)
{
    const MobiusMap to_p = MobiusMap::chart_at(p);
    const DiscPoint local = to_p.inverse()(q);
    const double length = local.radius();
    const auto n = static_cast<std::size_t>(std::ceil(length / spacing));
    LeafPath path;
    path.step = spacing;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = length * static_cast<double>(i) / static_cast<double>(n);
        path.times.push_back(s);
        path.points.push_back(to_p(DiscPoint::polar(s, local.angle())));
        path.angle_steps.push_back(0.0);
    }
    return path;
}

LeafPath join(const LeafPath& a, const LeafPath& b)
{
    LeafPath out = a;
    const double t0 = a.times.back();
    for (std::size_t i = 1; i < b.size(); ++i) {
        out.times.push_back(t0 + b.times[i]);
        out.points.push_back(b.points[i]);
        out.angle_steps.push_back(0.0);
    }
    return out;
}

} // namespace

TEST(DeckWord, FreeReduction)
{
    DeckWord w({1, 2, -2, 3});
    EXPECT_EQ(w.letters(), (std::vector<int>{1, 3}));
    w.append(-3);
    w.append(-1);
    EXPECT_TRUE(w.empty());
    EXPECT_THROW(w.append(0), SurfaceError);
    EXPECT_THROW(w.append(5), SurfaceError);
    EXPECT_EQ(DeckWord({1, -2, 4}).str(), "[1, -2, 4]");
}

TEST(DeckWord, InverseAndConcat)
{
    const DeckWord w({1, -3, 2, 4});
    EXPECT_TRUE(w.concat(w.inverse()).empty());
    EXPECT_EQ(w.inverse().letters(), (std::vector<int>{-4, -2, 3, -1}));
    EXPECT_EQ(w.reversed().letters(), (std::vector<int>{4, 2, -3, 1}));
    EXPECT_LT(w.concat(w.inverse()).evaluate(group()).distance_to(MobiusMap::identity()), 1e-15);
}

TEST(DeckWord, EvaluationIsWrittenOrderProduct)
{
    EXPECT_EQ(DeckWord().evaluate(group()).distance_to(MobiusMap::identity()), 0.0);
    const DeckWord w({2, -1, 3});
    const MobiusMap direct = group().letter_map(2) * group().letter_map(-1) * group().letter_map(3);
    EXPECT_LT(w.evaluate(group()).distance_to(direct), 1e-12);
}

TEST(Build, OctagonMatchesHyperbolicTrigonometry)
{
    // Oracle: regular octagon with interior angle pi/4.
    // cosh(circumradius) = cot(pi/8) cot(pi/8), cosh(inradius) = cos(pi/8) / sin(pi/8).
    const double q = std::numbers::pi / 8.0;
    const double cot = std::cos(q) / std::sin(q);
    EXPECT_NEAR(group().circumradius(), std::acosh(cot * cot), 1e-12);
    EXPECT_NEAR(group().side_distance(), std::acosh(cot), 1e-12);
    EXPECT_NEAR(std::cosh(group().circumradius()), 3.0 + 2.0 * std::sqrt(2.0), 1e-11);
}

TEST(Build, RelatorAngleAndInversePairs)
{
    const FuchsianGroup& g = group();
    EXPECT_LE(g.relator_residual(), 1e-8);
    EXPECT_NEAR(g.interior_angle(), std::numbers::pi / 4.0, 1e-9);
    EXPECT_LT(g.relator().evaluate(g).distance_to(MobiusMap::identity()), 1e-8);
    EXPECT_EQ(g.relator().size(), 8u);
    for (int k = 1; k <= 4; ++k)
        EXPECT_LT((g.generator(k) * g.generator(k + 4)).distance_to(MobiusMap::identity()), 1e-10);
}

TEST(Build, SidePairing)
{
    const FuchsianGroup& g = group();
    for (int k = 1; k <= 8; ++k) {
        const Side& from = g.side(k);
        const Side& to = g.side((k + 3) % 8 + 1);
        const DiscPoint a = g.generator(k)(from.start);
        const DiscPoint b = g.generator(k)(from.end);
        const double direct = std::max(point_error(a, to.start), point_error(b, to.end));
        const double flipped = std::max(point_error(a, to.end), point_error(b, to.start));
        EXPECT_LE(std::min(direct, flipped), 1e-9) << "generator " << k;
    }
}

TEST(Locate, Examples)
{
    const FuchsianGroup& g = group();
    const Located zero = locate(DiscPoint{}, g);
    EXPECT_TRUE(zero.word.empty());
    EXPECT_EQ(zero.representative.z(), Complex(0.0, 0.0));

    const Located one = locate(g.generator(1)(DiscPoint{}), g);
    EXPECT_EQ(one.word, DeckWord({1}));
    EXPECT_LT(std::abs(one.representative.z()), 1e-12);

    const DiscPoint z = g.generator(2)(g.generator(1)(DiscPoint{}));
    const Located two = locate(z, g);
    EXPECT_EQ(two.word, DeckWord({2, 1}));
    EXPECT_LT(two.word.evaluate(g).distance_to(g.generator(2) * g.generator(1)), 1e-10);
}

TEST(Locate, TilingOfRandomPoints)
{
    const FuchsianGroup& g = group();
    RngStream rng(21, 0);
    for (int i = 0; i < 1000; ++i) {
        const DiscPoint z(std::polar(0.999 * std::sqrt(rng.uniform()), kTwoPi * rng.uniform()));
        const Located loc = locate(z, g);
        for (int k = 1; k <= 8; ++k)
            EXPECT_GE(g.slack(loc.representative.z(), k), -1e-9);
        EXPECT_LT(point_error(loc.chart(loc.representative), z), 1e-9);
        EXPECT_LT(loc.chart.distance_to(loc.word.evaluate(g)), 1e-9);
    }
}

TEST(Locate, BoundaryDeterminism)
{
    const FuchsianGroup& g = group();
    const DiscPoint on_side = DiscPoint::polar(g.side_distance(), 0.0);
    EXPECT_EQ(g.violated_side(on_side.z()), 0);
    const DiscPoint outside = DiscPoint::polar(g.side_distance() + 1e-9, 0.0);
    EXPECT_EQ(g.violated_side(outside.z()), 1);
    for (const DiscPoint& p : {on_side, DiscPoint::polar(g.side_distance() + 1e-12, 0.0),
                               DiscPoint::polar(g.circumradius() + 1e-12, std::numbers::pi / 8.0)}) {
        const Located a = locate(p, g);
        const Located b = locate(p, g);
        EXPECT_EQ(a.word, b.word);
        EXPECT_EQ(a.representative.z(), b.representative.z());
    }
    // Just outside a vertex both adjacent sides are violated by about the same amount.
    const Complex beyond = std::polar(radius_for_R(g.circumradius() + 1e-6), std::numbers::pi / 8.0);
    const int k = g.violated_side(beyond);
    EXPECT_TRUE(k == 1 || k == 2);
    EXPECT_EQ(g.violated_side(beyond), k);
}

TEST(Track, Examples)
{
    const FuchsianGroup& g = group();
    LeafPath constant;
    constant.step = 0.01;
    for (int i = 0; i < 5; ++i) {
        constant.times.push_back(0.01 * i);
        constant.points.push_back(DiscPoint(0.3, 0.1));
        constant.angle_steps.push_back(0.0);
    }
    EXPECT_TRUE(track(constant, g).empty());

    const DiscPoint target = g.generator(1)(DiscPoint{});
    EXPECT_EQ(track(segment(DiscPoint{}, target, 0.05), g), DeckWord({1}));
    EXPECT_EQ(locate(target, g).word, DeckWord({1}));

    // Out across side 1 and straight back across the paired side of the neighbour.
    const DiscPoint across = DiscPoint::polar(g.side_distance() + 0.3, 0.0);
    const LeafPath out = segment(DiscPoint{}, across, 0.05);
    EXPECT_EQ(track(out, g).size(), 1u);
    EXPECT_TRUE(track(join(out, segment(across, DiscPoint{}, 0.05)), g).empty());
}

TEST(Track, RejectsLongSegments)
{
    const LeafPath jump = segment(DiscPoint{}, DiscPoint(0.5, 0.0), 0.5);
    try {
        track(jump, group());
        FAIL() << "expected a SurfaceError";
    } catch (const SurfaceError& e) {
        EXPECT_NE(std::string(e.what()).find("segment 0->1"), std::string::npos);
    }
}

TEST(Track, ConcatenationAndEndpointConsistency)
{
    const FuchsianGroup& g = group();
    for (int i = 0; i < 10; ++i) {
        const LeafPath path = sample_path(DiscPoint{}, 1.5, 1e-4, RngStream(22, i));
        const TrackResult r = track_detailed(path, g);
        EXPECT_LT(point_error(r.chart(r.representative), path.end()), 1e-8);
        const Located end = locate(path.end(), g);
        EXPECT_LT(point_error(end.representative, r.representative), 1e-8);
        const std::size_t mid = path.size() / 2;
        const DeckWord head = track(path.head(mid), g);
        const LeafPath tail = path.shifted(mid);
        const Located mid_loc = locate(tail.start(), g);
        const MobiusMap whole = r.word.evaluate(g);
        const MobiusMap parts = head.evaluate(g) * track(tail, g).evaluate(g);
        EXPECT_LT(whole.distance_to(parts), 1e-8) << "path " << i;
        EXPECT_LT(mid_loc.chart.distance_to(head.evaluate(g)), 1e-8);
    }
}

TEST(Walkers, SurfaceWalkerReproducesTrackedSamplePath)
{
    const FuchsianGroup& g = group();
    for (int i = 0; i < 5; ++i) {
        const RngStream rng(23, i);
        const LeafPath path = sample_path(DiscPoint{}, 1.0, 1e-4, rng);
        RngStream walker_rng = rng;
        SurfaceWalker walker(g, DiscPoint{});
        std::size_t letters = 0;
        walker.run_brownian(1.0, 1e-4, walker_rng, [&](int) { ++letters; });
        EXPECT_EQ(walker.word(), track(path, g));
        EXPECT_GE(letters, walker.word().size());
    }
}

TEST(Walkers, GeodesicWordIndependentOfSpacing)
{
    const FuchsianGroup& g = group();
    RngStream rng(24, 0);
    for (int i = 0; i < 20; ++i) {
        const GeodesicRay ray{DiscPoint(std::polar(0.4 * rng.uniform(), kTwoPi * rng.uniform())), rng.uniform()};
        const double R = 3.0 + 10.0 * rng.uniform();
        EXPECT_EQ(geodesic_word(g, ray, R, 0.05), geodesic_word(g, ray, R, 0.02));
    }
    EXPECT_THROW(geodesic_word(g, {}, 1.0, 0.1), SurfaceError);
}

TEST(Walkers, GeodesicWordMatchesTrackOfSampledRay)
{
    const FuchsianGroup& g = group();
    const GeodesicRay ray{DiscPoint{}, 0.137};
    const double R = 6.0;
    LeafPath path;
    path.step = 0.02;
    for (int i = 0; i <= 300; ++i) {
        path.times.push_back(0.02 * i);
        path.points.push_back(geodesic_eval(ray, 0.02 * i));
        path.angle_steps.push_back(0.0);
    }
    EXPECT_EQ(geodesic_word(g, ray, R), track(path, g));
}

TEST(Export, DumpFormat)
{
    const FuchsianGroup& g = group();
    std::istringstream in(dump_generators(g));
    std::string line;
    int generators = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        if (name == "circumradius" || name == "side_distance") {
            double v = 0.0;
            ls >> v;
            EXPECT_EQ(v, name == "circumradius" ? g.circumradius() : g.side_distance());
            continue;
        }
        ASSERT_EQ(name[0], 'g');
        const int k = std::stoi(name.substr(1));
        double ar, ai, br, bi;
        ls >> ar >> ai >> br >> bi;
        EXPECT_EQ(Complex(ar, ai), g.generator(k).a());
        EXPECT_EQ(Complex(br, bi), g.generator(k).b());
        ++generators;
    }
    EXPECT_EQ(generators, 8);
}
