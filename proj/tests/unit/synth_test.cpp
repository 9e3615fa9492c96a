#include "temp_dir.hpp"

#include <walkscope/error.hpp>
#include <walkscope/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace walkscope;

int column_count(const BitGrid& b, int c) {
    int n = 0;
    for (int r = 0; r < b.height(); ++r) {
        n += b(r, c);
    }
    return n;
}

int row_count(const BitGrid& b, int r) {
    int n = 0;
    for (int c = 0; c < b.width(); ++c) {
        n += b(r, c);
    }
    return n;
}

TEST(Synth, StraightWidthNineColumns) {
    RibbonSpec spec;
    spec.width = 9;
    spec.heading = 0;
    spec.length = 100;
    spec.canvas_width = 128;
    spec.canvas_height = 64;
    const SynthRibbon rb = make_ribbon(spec);
    int strip = 0;
    for (int c = 0; c < 128; ++c) {
        const int n = column_count(rb.mask.bits, c);
        if (n > 0) {
            EXPECT_EQ(n, 9) << "col " << c;
            ++strip;
        }
    }
    EXPECT_EQ(strip, 101);
    EXPECT_EQ(rb.truth.width, 9.0);
    EXPECT_EQ(rb.truth.angle, 0.0);
    EXPECT_EQ(rb.truth.curvature, 0.0);
}

TEST(Synth, VerticalWidthThree) {
    RibbonSpec spec;
    spec.width = 3;
    spec.heading = 90;
    const SynthRibbon rb = make_ribbon(spec);
    for (int r = 0; r < rb.mask.height(); ++r) {
        const int n = row_count(rb.mask.bits, r);
        EXPECT_TRUE(n == 0 || n == 3) << "row " << r;
    }
    EXPECT_EQ(rb.truth.angle, 90.0);
}

TEST(Synth, ArcTruth) {
    RibbonSpec spec;
    spec.kind = RibbonKind::arc;
    spec.radius = 50;
    spec.width = 7;
    spec.canvas_width = 128;
    spec.canvas_height = 128;
    const SynthRibbon rb = make_ribbon(spec);
    EXPECT_DOUBLE_EQ(rb.truth.curvature, 0.02);
    EXPECT_FALSE(rb.truth.angle.has_value());
    EXPECT_GT(rb.mask.count(), 0u);
}

TEST(Synth, ObliqueStripMatchesHeading) {
    for (double heading : {15.0, 30.0, 60.0, 135.0}) {
        RibbonSpec spec;
        spec.width = 5;
        spec.heading = heading;
        spec.length = 120;
        spec.canvas_width = 160;
        spec.canvas_height = 160;
        const BitGrid& b = make_ribbon(spec).mask.bits;
        // Principal axis of the foreground pixels, y pointing up.
        double n = 0, sx = 0, sy = 0;
        for (int r = 0; r < b.height(); ++r) {
            for (int c = 0; c < b.width(); ++c) {
                if (b(r, c)) {
                    n += 1;
                    sx += c;
                    sy += -r;
                }
            }
        }
        const double mx = sx / n;
        const double my = sy / n;
        double sxx = 0, syy = 0, sxy = 0;
        for (int r = 0; r < b.height(); ++r) {
            for (int c = 0; c < b.width(); ++c) {
                if (b(r, c)) {
                    sxx += (c - mx) * (c - mx);
                    syy += (-r - my) * (-r - my);
                    sxy += (c - mx) * (-r - my);
                }
            }
        }
        double axis = 0.5 * std::atan2(2 * sxy, sxx - syy) * 180.0 / 3.141592653589793;
        if (axis < 0) axis += 180.0;
        EXPECT_NEAR(axis, heading, 0.5) << heading;
        EXPECT_NEAR(n, 5.0 * 120.0, 0.05 * 600.0);
    }
}

TEST(Synth, Deterministic) {
    RibbonSpec spec;
    spec.kind = RibbonKind::arc;
    spec.radius = 30;
    spec.width = 5;
    spec.jitter = true;
    spec.seed = 42;
    EXPECT_EQ(make_ribbon(spec).mask.bits, make_ribbon(spec).mask.bits);
    RibbonSpec other = spec;
    other.seed = 43;
    EXPECT_NE(make_ribbon(spec).mask.bits, make_ribbon(other).mask.bits);
}

TEST(Synth, InvalidSpecsRejected) {
    RibbonSpec even;
    even.width = 8;
    EXPECT_THROW(make_ribbon(even), PreconditionError);
    RibbonSpec thin;
    thin.width = 1;
    EXPECT_THROW(make_ribbon(thin), PreconditionError);
    RibbonSpec tight;
    tight.kind = RibbonKind::arc;
    tight.radius = 7;
    tight.width = 7;
    EXPECT_THROW(make_ribbon(tight), PreconditionError);
    RibbonSpec big;
    big.length = 200;
    EXPECT_THROW(make_ribbon(big), PreconditionError);
    RibbonSpec margin;
    margin.length = 124;
    EXPECT_THROW(make_ribbon(margin), PreconditionError);
}

TEST(Synth, FixtureRoundTrip) {
    testutil::TempDir dir("fixture");
    RibbonSpec spec;
    spec.kind = RibbonKind::arc;
    spec.radius = 40;
    spec.width = 9;
    const SynthRibbon rb = make_ribbon(spec);
    write_fixture(dir.path(), "arc1", rb, spec);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "arc1.png"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "arc1.json"));
    const GroundTruth t = read_truth(dir.path() / "arc1.truth.json");
    EXPECT_EQ(t.width, 9.0);
    EXPECT_DOUBLE_EQ(t.curvature, 1.0 / 40.0);
    EXPECT_FALSE(t.angle.has_value());
    const TileRaster tile = load_tile(dir.path() / "arc1.png");
    EXPECT_EQ(tile.histogram()[to_index(ClassId::sidewalk)], rb.mask.count());
    EXPECT_EQ(tile.tile_id(), "arc1");
}

} // namespace
