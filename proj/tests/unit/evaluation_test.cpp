#include <walkscope/error.hpp>
#include <walkscope/evaluation.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace {

using namespace walkscope;

TileRaster tile(int w, int h, std::vector<std::uint8_t> labels) {
    return TileRaster(w, h, std::move(labels), Geotransform{}, "t");
}

TileRaster random_tile(std::mt19937& rng, int side) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(side * side));
    for (auto& l : labels) {
        l = static_cast<std::uint8_t>(rng() % 4);
    }
    return tile(side, side, std::move(labels));
}

ConfusionMatrix random_matrix(std::mt19937& rng) {
    ConfusionMatrix cm;
    for (ClassId g : kAllClasses) {
        for (ClassId p : kAllClasses) {
            cm.add(g, p, rng() % 50);
        }
    }
    return cm;
}

TEST(Confusion, HandCountedTwoByTwo) {
    const ConfusionMatrix cm = confusion(tile(2, 2, {0, 1, 2, 3}), tile(2, 2, {0, 1, 3, 3}));
    EXPECT_EQ(cm(ClassId::road, ClassId::sidewalk), 1u);
    EXPECT_EQ(cm(ClassId::background, ClassId::background), 1u);
    EXPECT_EQ(cm(ClassId::building, ClassId::building), 1u);
    EXPECT_EQ(cm(ClassId::sidewalk, ClassId::sidewalk), 1u);
    EXPECT_EQ(cm.total(), 4u);
}

TEST(Confusion, IdenticalIsDiagonalAndTotalConserved) {
    std::mt19937 rng(1);
    const TileRaster a = random_tile(rng, 16);
    const ConfusionMatrix same = confusion(a, a);
    for (int g = 0; g < kClassCount; ++g) {
        for (int p = 0; p < kClassCount; ++p) {
            if (g != p) {
                EXPECT_EQ(same.at(g, p), 0u);
            }
        }
    }
    EXPECT_EQ(confusion(a, random_tile(rng, 16)).total(), 256u);
}

TEST(Confusion, DimensionMismatchThrows) {
    EXPECT_THROW(confusion(tile(2, 2, {0, 0, 0, 0}), tile(1, 4, {0, 0, 0, 0})), DimensionMismatch);
}

TEST(Confusion, AccumulateCommutesAndAssociates) {
    std::mt19937 rng(2);
    const ConfusionMatrix a = random_matrix(rng);
    const ConfusionMatrix b = random_matrix(rng);
    const ConfusionMatrix c = random_matrix(rng);
    ConfusionMatrix ab = a;
    ab.accumulate(b);
    ConfusionMatrix ba = b;
    ba.accumulate(a);
    EXPECT_EQ(ab, ba);
    ConfusionMatrix ab_c = ab;
    ab_c.accumulate(c);
    ConfusionMatrix bc = b;
    bc.accumulate(c);
    ConfusionMatrix a_bc = a;
    a_bc.accumulate(bc);
    EXPECT_EQ(ab_c, a_bc);
    EXPECT_EQ(ab.total(), a.total() + b.total());
}

TEST(Scores, DiagonalAllOnes) {
    ConfusionMatrix cm;
    for (ClassId c : kAllClasses) {
        cm.add(c, c, 10);
    }
    const ClassScores s = scores(cm);
    for (ClassId c : kAllClasses) {
        EXPECT_EQ(s[c].iou, 1.0);
        EXPECT_EQ(s[c].precision, 1.0);
        EXPECT_EQ(s[c].recall, 1.0);
    }
    EXPECT_EQ(s.miou, 1.0);
}

TEST(Scores, SidewalkRowReconstruction) {
    // Per 100 ground-truth sidewalk pixels: 86 found, 14 missed, 9 false alarms.
    ConfusionMatrix cm;
    cm.add(ClassId::sidewalk, ClassId::sidewalk, 86);
    cm.add(ClassId::sidewalk, ClassId::road, 14);
    cm.add(ClassId::road, ClassId::sidewalk, 9);
    cm.add(ClassId::road, ClassId::road, 500);
    const ClassScore s = scores(cm)[ClassId::sidewalk];
    EXPECT_NEAR(*s.recall, 0.86, 1e-12);
    EXPECT_NEAR(*s.precision, 86.0 / 95.0, 1e-12);
    EXPECT_NEAR(*s.iou, 86.0 / 109.0, 1e-12);
    EXPECT_EQ(std::round(*s.iou * 100) / 100, 0.79);
    EXPECT_EQ(std::round(*s.precision * 100) / 100, 0.91);
    EXPECT_EQ(std::round(*s.recall * 100) / 100, 0.86);
}

TEST(Scores, AbsentClassExcludedFromMiou) {
    ConfusionMatrix cm;
    cm.add(ClassId::background, ClassId::background, 10);
    cm.add(ClassId::road, ClassId::road, 5);
    cm.add(ClassId::road, ClassId::sidewalk, 5);
    cm.add(ClassId::sidewalk, ClassId::sidewalk, 5);
    const ClassScores s = scores(cm);
    EXPECT_FALSE(s[ClassId::building].iou.has_value());
    EXPECT_FALSE(s[ClassId::building].precision.has_value());
    EXPECT_NEAR(*s.miou, (1.0 + 0.5 + 0.5) / 3.0, 1e-12);
    EXPECT_FALSE(scores(ConfusionMatrix{}).miou.has_value());
}

TEST(Scores, InvariantUnderClassRelabelling) {
    std::mt19937 rng(5);
    const std::array<int, 4> perm{2, 0, 3, 1};
    for (int t = 0; t < 20; ++t) {
        const ConfusionMatrix cm = random_matrix(rng);
        ConfusionMatrix permuted;
        for (int g = 0; g < 4; ++g) {
            for (int p = 0; p < 4; ++p) {
                permuted.add(static_cast<ClassId>(perm[g]), static_cast<ClassId>(perm[p]), cm.at(g, p));
            }
        }
        const ClassScores a = scores(cm);
        const ClassScores b = scores(permuted);
        for (int c = 0; c < 4; ++c) {
            EXPECT_EQ(a.per_class[c].iou, b.per_class[perm[c]].iou);
            EXPECT_EQ(a.per_class[c].precision, b.per_class[perm[c]].precision);
            EXPECT_EQ(a.per_class[c].recall, b.per_class[perm[c]].recall);
        }
        EXPECT_NEAR(*a.miou, *b.miou, 1e-12);
    }
}

TEST(Scores, AveragePerTile) {
    ClassScores a;
    a.per_class[to_index(ClassId::sidewalk)].iou = 0.5;
    a.miou = 0.5;
    ClassScores b;
    b.per_class[to_index(ClassId::sidewalk)].iou = 1.0;
    b.per_class[to_index(ClassId::road)].iou = 0.2;
    b.miou = 0.6;
    const ClassScores m = average_scores({a, b});
    EXPECT_DOUBLE_EQ(*m[ClassId::sidewalk].iou, 0.75);
    EXPECT_DOUBLE_EQ(*m[ClassId::road].iou, 0.2);
    EXPECT_FALSE(m[ClassId::building].iou.has_value());
}

TEST(Bins, DefaultsAndLocate) {
    const BinSpec w = default_bins(Feature::width);
    EXPECT_EQ(w.edges, (std::vector<double>{0, 7, 14, kInf}));
    EXPECT_EQ(default_bins(Feature::angle).edges, (std::vector<double>{0, 45, 90, 135, 180}));
    EXPECT_EQ(default_bins(Feature::curvature).edges, (std::vector<double>{0, 0.1, 0.2, 0.3, kInf}));
    EXPECT_EQ(w.locate(7.0), 1u);
    EXPECT_EQ(w.locate(6.999), 0u);
    EXPECT_EQ(w.locate(1e9), 2u);
    EXPECT_FALSE(w.locate(-1.0).has_value());
    EXPECT_FALSE(default_bins(Feature::angle).locate(180.0).has_value());
}

TEST(Bins, InvalidSpecsRejected) {
    EXPECT_THROW((BinSpec{Feature::width, {}}).validate(), PreconditionError);
    EXPECT_THROW((BinSpec{Feature::width, {3}}).validate(), PreconditionError);
    EXPECT_THROW((BinSpec{Feature::width, {0, 5, 5}}).validate(), PreconditionError);
    EXPECT_THROW(binned_rmse({}, BinSpec{Feature::width, {}}), PreconditionError);
}

TEST(BinnedRmse, HandArithmetic) {
    const BinnedRmse r = binned_rmse({{10.0, 11.0}, {12.0, 14.0}}, default_bins(Feature::width));
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].n, 0u);
    EXPECT_FALSE(r.rows[0].rmse.has_value());
    EXPECT_EQ(r.rows[1].n, 2u);
    EXPECT_NEAR(*r.rows[1].rmse, std::sqrt(2.5), 1e-12);
}

TEST(BinnedRmse, KeyChoosesSide) {
    const BinSpec w = default_bins(Feature::width);
    const BinnedRmse by_gt = binned_rmse({{6.0, 8.0}}, w, BinKey::ground_truth);
    const BinnedRmse by_pred = binned_rmse({{6.0, 8.0}}, w, BinKey::prediction);
    EXPECT_EQ(by_gt.rows[0].n, 1u);
    EXPECT_EQ(by_pred.rows[1].n, 1u);
}

TEST(BinnedRmse, ConservationAndJensen) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 20.0);
    std::vector<ValuePair> pairs;
    for (int i = 0; i < 500; ++i) {
        ValuePair p{u(rng), u(rng)};
        if (i % 17 == 0) p.gt.reset();
        if (i % 23 == 0) p.pred.reset();
        if (i % 31 == 0) p.pred = std::nan("");
        pairs.push_back(p);
    }
    const BinSpec spec = default_bins(Feature::width);
    const BinnedRmse r = binned_rmse(pairs, spec);
    std::size_t n = 0;
    for (std::size_t b = 0; b < r.rows.size(); ++b) {
        n += r.rows[b].n;
        double abs_sum = 0.0;
        std::size_t cnt = 0;
        for (const ValuePair& p : pairs) {
            if (p.gt && p.pred && std::isfinite(*p.pred) && spec.locate(*p.gt) == b) {
                abs_sum += std::abs(*p.pred - *p.gt);
                ++cnt;
            }
        }
        EXPECT_EQ(cnt, r.rows[b].n);
        if (cnt > 0) {
            EXPECT_GE(*r.rows[b].rmse + 1e-12, abs_sum / cnt);
        }
    }
    EXPECT_EQ(n + r.dropped_undefined + r.dropped_out_of_range, pairs.size());
    EXPECT_GT(r.dropped_out_of_range, 0u);
}

TEST(Reports, ColumnsAndRows) {
    ConfusionMatrix cm;
    cm.add(ClassId::sidewalk, ClassId::sidewalk, 3);
    cm.add(ClassId::sidewalk, ClassId::road, 1);
    const std::string csv = scores_csv(scores(cm));
    EXPECT_EQ(csv, "Class,IoU,Precision,Recall\n"
                   "Building,,,\n"
                   "Road,0.0000,0.0000,\n"
                   "Sidewalk,0.7500,1.0000,0.7500\n"
                   "Background,,,\n"
                   "mIoU,0.3750,,\n");
    EXPECT_EQ(format_bin(7, 14), "7-14");
    EXPECT_EQ(format_bin(14, kInf), "14-inf");
    EXPECT_EQ(format_bin(0.1, 0.2), "0.1-0.2");
    const std::string table =
        binned_rmse_csv({binned_rmse({{10.0, 11.0}, {12.0, 14.0}}, default_bins(Feature::width))});
    EXPECT_EQ(table, "Feature,Bin,N,RMSE\nWidth,0-7,0,\nWidth,7-14,2,1.5811\nWidth,14-inf,0,\n");
}

} // namespace
