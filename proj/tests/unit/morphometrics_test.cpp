#include "oracles.hpp"

#include <walkscope/error.hpp>
#include <walkscope/morphometrics.hpp>
#include <walkscope/synth.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace {

using namespace walkscope;

SkeletonPath line_path(int n, int drow, int dcol, int row0 = 0, int col0 = 0) {
    SkeletonPath p;
    for (int i = 0; i < n; ++i) {
        p.points.push_back({row0 + i * drow, col0 + i * dcol});
    }
    return p;
}

SkeletonPath translate(SkeletonPath p, int dr, int dc) {
    for (PixelCoord& q : p.points) {
        q.row += dr;
        q.col += dc;
    }
    return p;
}

// Quarter turn clockwise on screen: (row, col) -> (col, -row).
SkeletonPath rotate(SkeletonPath p) {
    for (PixelCoord& q : p.points) {
        q = {q.col, -q.row};
    }
    return p;
}

SynthRibbon ring(double radius, int width) {
    RibbonSpec spec;
    spec.kind = RibbonKind::arc;
    spec.radius = radius;
    spec.width = width;
    spec.length = 7.0 * radius;
    spec.canvas_width = static_cast<int>(2 * radius + width + 12);
    spec.canvas_height = spec.canvas_width;
    return make_ribbon(spec);
}

TEST(DistanceTransform, SinglePixel) {
    BitGrid b(5, 5, 0);
    b(2, 2) = 1;
    EXPECT_EQ(distance_transform(b)(2, 2), 1.0);
}

TEST(DistanceTransform, FullWidthRibbonMiddleRow) {
    const BitGrid ribbon(30, 5, 1);
    const DistanceField f = distance_transform(ribbon);
    EXPECT_EQ(f(2, 15), 3.0);
    EXPECT_EQ(f, oracle::distance(ribbon));
}

TEST(DistanceTransform, MatchesBruteForce) {
    std::mt19937 rng(16);
    for (int i = 0; i < 200; ++i) {
        BitGrid b(16, 16, 0);
        const int density = static_cast<int>(rng() % 101);
        for (auto& v : b.values()) {
            v = static_cast<int>(rng() % 100) < density ? 1 : 0;
        }
        ASSERT_EQ(distance_transform(b), oracle::distance(b)) << "mask " << i;
    }
}

TEST(DistanceTransform, LipschitzAndAtLeastOne) {
    std::mt19937 rng(17);
    for (int i = 0; i < 100; ++i) {
        const BitGrid b = oracle::random_blob(rng, 5);
        const DistanceField f = distance_transform(b);
        for (int r = 0; r < b.height(); ++r) {
            for (int c = 0; c < b.width(); ++c) {
                if (b(r, c)) {
                    EXPECT_GE(f(r, c), 1.0);
                } else {
                    EXPECT_EQ(f(r, c), 0.0);
                }
                if (c + 1 < b.width()) {
                    EXPECT_LE(std::abs(f(r, c) - f(r, c + 1)), 1.0 + 1e-12);
                }
                if (r + 1 < b.height()) {
                    EXPECT_LE(std::abs(f(r, c) - f(r + 1, c)), 1.0 + 1e-12);
                }
            }
        }
    }
}

TEST(WidthAt, Examples) {
    BitGrid ribbon(40, 9, 0);
    for (int r = 2; r < 7; ++r) {
        for (int c = 0; c < 40; ++c) {
            ribbon(r, c) = 1;
        }
    }
    const DistanceField f = distance_transform(ribbon);
    EXPECT_EQ(width_at(f, {4, 20}), 5.0);

    BitGrid dot(3, 3, 0);
    dot(1, 1) = 1;
    EXPECT_EQ(width_at(distance_transform(dot), {1, 1}), 1.0);
    EXPECT_THROW(width_at(distance_transform(dot), {0, 0}), PreconditionError);
    EXPECT_THROW(width_at(distance_transform(dot), {5, 0}), PreconditionError);
}

TEST(WidthAt, AxisAlignedRibbonsExact) {
    for (int w : {3, 5, 7, 9, 11, 13}) {
        for (double heading : {0.0, 90.0}) {
            RibbonSpec spec;
            spec.width = w;
            spec.heading = heading;
            spec.length = 100;
            spec.canvas_width = 140;
            spec.canvas_height = 140;
            const SynthRibbon rb = make_ribbon(spec);
            const Skeleton skel = thin(rb.mask);
            const DistanceField f = distance_transform(rb.mask);
            int checked = 0;
            for (int r = 0; r < 140; ++r) {
                for (int c = 0; c < 140; ++c) {
                    const int along = heading == 0.0 ? c - 70 : r - 70;
                    if (skel.test(r, c) && std::abs(along) <= 50 - w) {
                        EXPECT_EQ(width_at(f, {r, c}), w);
                        ++checked;
                    }
                }
            }
            EXPECT_GT(checked, 50);
        }
    }
}

TEST(AngleAt, AxisPaths) {
    const SkeletonPath h = line_path(20, 0, 1, 5, 0);
    const SkeletonPath v = line_path(20, 1, 0, 0, 5);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(angle_at(h, i, 5), 0.0);
        EXPECT_EQ(angle_at(v, i, 5), 90.0);
    }
}

TEST(AngleAt, DiagonalStaircase) {
    const SkeletonPath up = line_path(30, -1, 1, 40, 0);
    EXPECT_NEAR(*angle_at(up, 15, 5), 45.0, 2.0);
    const SkeletonPath down = line_path(30, 1, 1);
    EXPECT_NEAR(*angle_at(down, 15, 5), 135.0, 2.0);

    // A 4-connected staircase: steps alternate right and up.
    SkeletonPath stairs;
    PixelCoord p{60, 0};
    for (int i = 0; i < 60; ++i) {
        stairs.points.push_back(p);
        (i % 2 == 0 ? p.col : p.row) += (i % 2 == 0 ? 1 : -1);
    }
    EXPECT_NEAR(*angle_at(stairs, 30, 5), 45.0, 2.0);
    EXPECT_NEAR(*angle_at(stairs, 31, 5), 45.0, 2.0);
}

TEST(AngleAt, OneSidedAndTooShort) {
    const SkeletonPath h = line_path(8, 0, 1);
    EXPECT_EQ(angle_at(h, 0, 5), 0.0);
    EXPECT_EQ(angle_at(h, 7, 5), 0.0);
    const SkeletonPath short_path = line_path(5, 0, 1);
    EXPECT_FALSE(angle_at(short_path, 2, 5).has_value());
}

TEST(AngleAt, TranslationAndRotation) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        SkeletonPath p;
        PixelCoord q{0, 0};
        for (int i = 0; i < 25; ++i) {
            p.points.push_back(q);
            const int step = static_cast<int>(rng() % 3);
            q.col += 1;
            q.row += step == 0 ? -1 : step == 1 ? 0 : 1;
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto a = angle_at(p, i, 5);
            ASSERT_TRUE(a.has_value());
            EXPECT_NEAR(*angle_at(translate(p, 17, -9), i, 5), *a, 1e-9);
            EXPECT_LT(oracle::angle_diff(*angle_at(rotate(p), i, 5), *a + 90.0), 1e-9);
            EXPECT_GE(*a, 0.0);
            EXPECT_LT(*a, 180.0);
        }
    }
}

TEST(Curvature, ClosedForm) {
    EXPECT_NEAR(*circumcurvature({0, 0}, {1, 1}, {2, 0}), 1.0, 1e-9);
    EXPECT_EQ(*circumcurvature({0, 0}, {5, 0}, {10, 0}), 0.0);
    EXPECT_FALSE(circumcurvature({0, 0}, {0, 0}, {2, 0}).has_value());
    EXPECT_FALSE(curvature_at(line_path(10, 0, 1), 2, 5).has_value());
    EXPECT_EQ(*curvature_at(line_path(11, 0, 1), 5, 5), 0.0);
}

TEST(Curvature, InvarianceUnderMotionAndReversal) {
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> u(-30, 30);
    for (int i = 0; i < 200; ++i) {
        const Point2 a{double(u(rng)), double(u(rng))};
        const Point2 b{double(u(rng)), double(u(rng))};
        const Point2 c{double(u(rng)), double(u(rng))};
        const auto k = circumcurvature(a, b, c);
        if (!k) {
            continue;
        }
        const auto moved = circumcurvature({a.x + 7, a.y - 3}, {b.x + 7, b.y - 3}, {c.x + 7, c.y - 3});
        const auto turned = circumcurvature({-a.y, a.x}, {-b.y, b.x}, {-c.y, c.x});
        const auto reversed = circumcurvature(c, b, a);
        EXPECT_NEAR(*moved, *k, 1e-12);
        EXPECT_NEAR(*turned, *k, 1e-12);
        EXPECT_NEAR(*reversed, *k, 1e-12);
        EXPECT_GE(*k, 0.0);
    }
}

TEST(Curvature, RingOfRadiusFiftyEveryPoint) {
    const SynthRibbon rb = ring(50.0, 7);
    MeasureOptions opts;
    opts.h = 5;
    const TileAnalysis a = analyze_mask(rb.mask, opts);
    ASSERT_FALSE(a.points.empty());
    std::size_t outside = 0;
    double worst = 0.0;
    for (const PointMeasure& p : a.points) {
        ASSERT_TRUE(p.curvature.has_value());
        const double err = std::abs(*p.curvature - 0.02);
        worst = std::max(worst, err);
        outside += err > 0.005 ? 1 : 0;
    }
    EXPECT_EQ(outside, 0u) << "of " << a.points.size() << " points, worst |kappa - 0.02| = " << worst;
}

TEST(Curvature, ScalesInverselyWithSize) {
    auto mean_kappa = [](double radius, int h) {
        MeasureOptions opts;
        opts.h = h;
        return tile_metrics(ring(radius, 5).mask, opts).mean_curvature;
    };
    for (double s : {2.0, 4.0}) {
        const double k1 = mean_kappa(25.0, 5);
        const double ks = mean_kappa(25.0 * s, static_cast<int>(5 * s));
        EXPECT_NEAR(ks * s / k1, 1.0, 0.25) << "s = " << s;
    }
}

TEST(TileMetrics, EmptyMaskUndefined) {
    ClassMask m;
    m.bits = BitGrid(32, 32, 0);
    const TileMetrics t = tile_metrics(m);
    EXPECT_FALSE(t.defined);
    EXPECT_EQ(t.n_points, 0u);
}

TEST(TileMetrics, StraightNineWideRibbon) {
    RibbonSpec spec;
    spec.width = 9;
    spec.heading = 30;
    spec.length = 150;
    spec.canvas_width = 200;
    spec.canvas_height = 200;
    const TileMetrics t = tile_metrics(make_ribbon(spec).mask);
    ASSERT_TRUE(t.defined);
    EXPECT_NEAR(t.mean_width, 9.0, 1.0);
    EXPECT_LE(t.mean_curvature, 0.01);
    EXPECT_LT(oracle::angle_diff(t.mean_angle, 30.0), 3.0);
}

TEST(TileMetrics, TwoRibbonsAverageWidths) {
    BitGrid bits(200, 80, 0);
    for (int c = 20; c < 180; ++c) {
        for (int r = 18; r < 23; ++r) {
            bits(r, c) = 1;
        }
        for (int r = 51; r < 60; ++r) {
            bits(r, c) = 1;
        }
    }
    ClassMask m;
    m.bits = bits;
    const TileMetrics t = tile_metrics(m);
    ASSERT_TRUE(t.defined);
    EXPECT_NEAR(t.mean_width, 7.0, 1.0);
}

TEST(TileMetrics, MeansWithinPointRange) {
    std::mt19937 rng(44);
    for (int i = 0; i < 60; ++i) {
        ClassMask m;
        m.bits = oracle::random_blob(rng, 0);
        const TileAnalysis a = analyze_mask(m);
        EXPECT_EQ(a.metrics.defined, a.metrics.n_points > 0);
        EXPECT_EQ(a.metrics.n_points, a.points.size());
        if (a.points.empty()) {
            continue;
        }
        double wmin = 1e300, wmax = -1e300, amin = 1e300, amax = -1e300;
        for (const PointMeasure& p : a.points) {
            wmin = std::min(wmin, p.width);
            wmax = std::max(wmax, p.width);
            amin = std::min(amin, p.angle);
            amax = std::max(amax, p.angle);
            EXPECT_GT(p.width, 0.0);
            EXPECT_GE(p.angle, 0.0);
            EXPECT_LT(p.angle, 180.0);
            if (p.curvature) {
                EXPECT_GE(*p.curvature, 0.0);
            }
        }
        EXPECT_GE(a.metrics.mean_width, wmin - 1e-9);
        EXPECT_LE(a.metrics.mean_width, wmax + 1e-9);
        EXPECT_GE(a.metrics.mean_angle, amin - 1e-9);
        EXPECT_LE(a.metrics.mean_angle, amax + 1e-9);
    }
}

} // namespace
