#pragma once

#include <walkscope/raster_io.hpp>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace walkscope {

/// counts[g][p] = pixels with ground-truth class g predicted as p.
class ConfusionMatrix {
public:
    using Counts = std::array<std::array<std::uint64_t, kClassCount>, kClassCount>;

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(const Counts& counts) : counts_(counts) {}

    void add(ClassId gt, ClassId pred, std::uint64_t n = 1) noexcept {
        counts_[to_index(gt)][to_index(pred)] += n;
    }
    ConfusionMatrix& accumulate(const ConfusionMatrix& other) noexcept;

    std::uint64_t operator()(ClassId gt, ClassId pred) const noexcept {
        return counts_[to_index(gt)][to_index(pred)];
    }
    std::uint64_t at(int gt, int pred) const noexcept { return counts_[gt][pred]; }
    const Counts& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    Counts counts_{};
};

/// Throws DimensionMismatch when the tiles differ in size.
ConfusionMatrix confusion(const TileRaster& gt, const TileRaster& pred);

struct ClassScore {
    std::optional<double> iou;
    std::optional<double> precision;
    std::optional<double> recall;
};

struct ClassScores {
    std::array<ClassScore, kClassCount> per_class;
    /// Unweighted mean over classes with a defined IoU.
    std::optional<double> miou;

    const ClassScore& operator[](ClassId c) const noexcept { return per_class[to_index(c)]; }
};

/// IoU = tp/(tp+fp+fn), precision = tp/(tp+fp), recall = tp/(tp+fn);
/// a ratio with a zero denominator is left undefined.
ClassScores scores(const ConfusionMatrix& cm);

/// Mean of per-tile scores, each field over the tiles where it is defined.
ClassScores average_scores(const std::vector<ClassScores>& per_tile);

enum class Feature { width, angle, curvature };

std::string_view feature_name(Feature f) noexcept;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Half-open bins [edges[i], edges[i+1]); the last edge may be +inf.
struct BinSpec {
    Feature feature = Feature::width;
    std::vector<double> edges;

    /// Throws PreconditionError unless there are >= 2 strictly ascending edges.
    void validate() const;
    std::size_t bin_count() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }
    /// Index of the bin holding `value`, nullopt when outside every bin.
    std::optional<std::size_t> locate(double value) const noexcept;
};

/// width 0/7/14/inf, angle 0/45/90/135/180, curvature 0/0.1/0.2/0.3/inf.
BinSpec default_bins(Feature f);

struct BinnedRmseRow {
    Feature feature = Feature::width;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
    /// Present iff n > 0.
    std::optional<double> rmse;
};

/// Either side may be undefined (tile without measurable sidewalk).
struct ValuePair {
    std::optional<double> gt;
    std::optional<double> pred;
};

enum class BinKey { ground_truth, prediction };

struct BinnedRmse {
    std::vector<BinnedRmseRow> rows;
    /// Pairs with an undefined or non-finite side.
    std::size_t dropped_undefined = 0;
    /// Pairs whose key value falls outside every bin.
    std::size_t dropped_out_of_range = 0;
};

/// Per bin: n and sqrt(mean((pred - gt)^2)), binned on the chosen side.
BinnedRmse binned_rmse(const std::vector<ValuePair>& pairs, const BinSpec& spec,
                       BinKey key = BinKey::ground_truth);

/// "7-14", "14-inf", "0.1-0.2".
std::string format_bin(double lo, double hi);

/// Class,IoU,Precision,Recall rows (Building, Road, Sidewalk, Background) then a mIoU row.
std::string scores_csv(const ClassScores& s);
std::string scores_json(const ClassScores& s);

/// Feature,Bin,N,RMSE rows for each table in order.
std::string binned_rmse_csv(const std::vector<BinnedRmse>& tables);
std::string binned_rmse_json(const std::vector<BinnedRmse>& tables);

} // namespace walkscope
