#include "oracles.hpp"

#include <walkscope/morphometrics.hpp>
#include <walkscope/skeleton.hpp>
#include <walkscope/synth.hpp>

#include <gtest/gtest.h>

#include <map>
#include <random>

namespace {

using namespace walkscope;

BitGrid from_rows(const std::vector<std::string>& rows) {
    BitGrid b(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), 0);
    for (int r = 0; r < b.height(); ++r) {
        for (int c = 0; c < b.width(); ++c) {
            b(r, c) = rows[r][c] == '#' ? 1 : 0;
        }
    }
    return b;
}

void expect_invariants(const BitGrid& mask, const BitGrid& skel) {
    EXPECT_TRUE(oracle::subset(skel, mask));
    EXPECT_EQ(oracle::count_2x2_blocks(skel), 0);
    EXPECT_EQ(oracle::components(skel), oracle::components(mask));
}

TEST(Thin, EmptyMask) {
    const BitGrid empty(12, 9, 0);
    EXPECT_EQ(thin_bits(empty), empty);
    ClassMask m;
    m.bits = empty;
    EXPECT_EQ(thin(m).count(), 0u);
}

TEST(Thin, ThinLineUnchanged) {
    BitGrid line(20, 5, 0);
    for (int c = 2; c < 18; ++c) {
        line(2, c) = 1;
    }
    EXPECT_EQ(thin_bits(line), line);
}

TEST(Thin, SolidRibbonLiesOnMiddleRow) {
    const BitGrid ribbon(40, 7, 1);
    const BitGrid skel = thin_bits(ribbon);
    expect_invariants(ribbon, skel);
    const DistanceField field = distance_transform(ribbon);
    int on_middle = 0;
    for (int r = 0; r < 7; ++r) {
        for (int c = 7; c < 33; ++c) {
            if (skel(r, c)) {
                EXPECT_EQ(r, 3) << "col " << c;
                EXPECT_LE(std::abs(field(r, c) - field(3, c)), 1.0);
                ++on_middle;
            }
        }
    }
    EXPECT_EQ(on_middle, 26);
    EXPECT_EQ(trace_paths(skel).size(), 1u);
}

TEST(Thin, SquareBlockLosesItsBlock) {
    BitGrid block(6, 6, 0);
    block(2, 2) = block(2, 3) = block(3, 2) = block(3, 3) = 1;
    const BitGrid skel = thin_bits(block);
    expect_invariants(block, skel);
    EXPECT_LE(std::count(skel.values().begin(), skel.values().end(), 1), 2);
}

TEST(Thin, PruneRemovesShortSpur) {
    const BitGrid mask = from_rows({
        "...............",
        ".#############.",
        ".......#.......",
        ".......#.......",
        "...............",
    });
    ThinOptions keep;
    keep.prune_length = 0;
    EXPECT_EQ(thin_bits(mask, keep)(3, 7), 1);
    EXPECT_EQ(thin_bits(mask)(3, 7), 0);

    const BitGrid longer = from_rows({
        "...............",
        ".#############.",
        ".......#.......",
        ".......#.......",
        ".......#.......",
        ".......#.......",
        "...............",
    });
    EXPECT_EQ(thin_bits(longer)(5, 7), 1);
}

TEST(Thin, RandomBlobInvariants) {
    std::mt19937 rng(77);
    for (int i = 0; i < 150; ++i) {
        const BitGrid blob = oracle::random_blob(rng, i % 3 == 0 ? 8 : 0);
        SCOPED_TRACE(i);
        expect_invariants(blob, thin_bits(blob));
    }
}

TEST(Thin, RandomNoiseInvariants) {
    std::mt19937 rng(78);
    for (int i = 0; i < 300; ++i) {
        const BitGrid mask = oracle::random_mask(rng, 24);
        SCOPED_TRACE(i);
        expect_invariants(mask, thin_bits(mask));
    }
}

TEST(Thin, RotationConsistent) {
    std::mt19937 rng(90);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const BitGrid blob = oracle::random_blob(rng, i % 2 == 0 ? 0 : 5);
        if (oracle::rotationally_symmetric(blob)) {
            continue;
        }
        ++checked;
        EXPECT_EQ(thin_bits(oracle::rot90(blob)), oracle::rot90(thin_bits(blob))) << "blob " << i;
    }
    EXPECT_GT(checked, 150);
}

TEST(Thin, RotationConsistentOnRibbons) {
    for (double heading : {0.0, 20.0, 45.0, 70.0}) {
        RibbonSpec spec;
        spec.width = 7;
        spec.heading = heading;
        spec.canvas_width = 131;
        spec.canvas_height = 120;
        const BitGrid mask = make_ribbon(spec).mask.bits;
        EXPECT_EQ(thin_bits(oracle::rot90(mask)), oracle::rot90(thin_bits(mask))) << heading;
    }
}

TEST(Trace, StraightLineOnePath) {
    BitGrid line(12, 3, 0);
    for (int c = 1; c < 11; ++c) {
        line(1, c) = 1;
    }
    const auto paths = trace_paths(line);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_FALSE(paths[0].closed);
    EXPECT_EQ(paths[0].size(), 10u);
}

TEST(Trace, TShapeThreePathsAtJunction) {
    ThinOptions keep;
    keep.prune_length = 0;
    const BitGrid t = thin_bits(from_rows({
        "...........",
        ".#########.",
        ".....#.....",
        ".....#.....",
        ".....#.....",
        "...........",
    }), keep);
    int degree3 = 0;
    PixelCoord junction;
    for (int r = 0; r < t.height(); ++r) {
        for (int c = 0; c < t.width(); ++c) {
            if (t(r, c) && oracle::set_neighbours(t, r, c) >= 3) {
                ++degree3;
                junction = {r, c};
            }
        }
    }
    ASSERT_EQ(degree3, 1);
    const auto paths = trace_paths(t);
    ASSERT_EQ(paths.size(), 3u);
    for (const SkeletonPath& p : paths) {
        EXPECT_FALSE(p.closed);
        const bool touches = p.points.front() == junction || p.points.back() == junction;
        EXPECT_TRUE(touches);
    }
}

TEST(Trace, CircleRingIsClosed) {
    RibbonSpec spec;
    spec.kind = RibbonKind::arc;
    spec.radius = 20;
    spec.width = 5;
    spec.length = 1000;
    spec.canvas_width = 64;
    spec.canvas_height = 64;
    const BitGrid skel = thin_bits(make_ribbon(spec).mask.bits);
    std::size_t n = 0;
    for (int r = 0; r < skel.height(); ++r) {
        for (int c = 0; c < skel.width(); ++c) {
            if (skel(r, c)) {
                ++n;
                EXPECT_EQ(oracle::set_neighbours(skel, r, c), 2) << r << "," << c;
            }
        }
    }
    const auto paths = trace_paths(skel);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_TRUE(paths[0].closed);
    EXPECT_EQ(paths[0].size(), n);
    const PixelCoord a = paths[0].points.front();
    const PixelCoord b = paths[0].points.back();
    EXPECT_LE(std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)), 1);
}

TEST(Trace, IsolatedPixelIsLengthOnePath) {
    BitGrid b(5, 5, 0);
    b(2, 2) = 1;
    const auto paths = trace_paths(b);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].size(), 1u);
}

TEST(Trace, ConservesPixelsAndAdjacency) {
    std::mt19937 rng(31);
    for (int i = 0; i < 120; ++i) {
        const BitGrid skel = thin_bits(oracle::random_blob(rng, i % 4 == 0 ? 6 : 0));
        const auto paths = trace_paths(skel);
        std::map<PixelCoord, int> seen;
        std::size_t total = 0;
        for (const SkeletonPath& p : paths) {
            total += p.size();
            for (std::size_t k = 0; k < p.size(); ++k) {
                ++seen[p.points[k]];
                ASSERT_TRUE(skel[p.points[k]]);
                if (k > 0) {
                    const PixelCoord u = p.points[k - 1];
                    const PixelCoord v = p.points[k];
                    EXPECT_EQ(std::max(std::abs(u.row - v.row), std::abs(u.col - v.col)), 1);
                }
                if (k > 0 && k + 1 < p.size()) {
                    EXPECT_FALSE(is_junction(skel, p.points[k].row, p.points[k].col));
                }
            }
        }
        std::size_t pixels = 0;
        std::size_t shared = 0;
        for (int r = 0; r < skel.height(); ++r) {
            for (int c = 0; c < skel.width(); ++c) {
                if (!skel(r, c)) {
                    continue;
                }
                ++pixels;
                const auto it = seen.find({r, c});
                ASSERT_NE(it, seen.end()) << r << "," << c;
                if (is_junction(skel, r, c)) {
                    shared += static_cast<std::size_t>(it->second - 1);
                } else {
                    EXPECT_EQ(it->second, 1);
                }
            }
        }
        EXPECT_EQ(total - shared, pixels) << "blob " << i;
    }
}

} // namespace
