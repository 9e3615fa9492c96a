#pragma once

#include <walkscope/grid.hpp>
#include <walkscope/raster_io.hpp>
#include <walkscope/skeleton.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace walkscope {

/// Euclidean distance (pixels) from each foreground pixel center to the
/// nearest background pixel center. Background cells hold 0; cells outside
/// the grid count as background.
using DistanceField = Grid<double>;

/// Exact EDT: separable lower-envelope-of-parabolas pass over squared distances.
DistanceField distance_transform(const ClassMask& mask);
DistanceField distance_transform(const BitGrid& bits);

/// 2 * dist(p) - 1. Throws PreconditionError when p is background or off-grid.
double width_at(const DistanceField& field, PixelCoord p);

/// Point in image coordinates used by the curvature formula.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// 4 * area(ABC) / (|AB| |BC| |CA|). Collinear triples give exactly 0;
/// any coincident pair gives nullopt.
std::optional<double> circumcurvature(Point2 a, Point2 b, Point2 c) noexcept;

/// Chord orientation in degrees folded to [0, 180), counter-clockwise from the
/// image x-axis with y pointing up (a row decrease is "up"). Uses the neighbours
/// h steps away on both sides when they exist, else the one side that reaches h.
/// nullopt when neither side reaches h. Steps count 1 regardless of direction.
std::optional<double> angle_at(const SkeletonPath& path, std::size_t i, int h);

/// Curvature (1/pixels) of the circle through points i-h, i, i+h. Closed paths
/// wrap. nullopt when either neighbour is missing or two points coincide.
std::optional<double> curvature_at(const SkeletonPath& path, std::size_t i, int h);

struct PointMeasure {
    PixelCoord point;
    double width = 0.0;
    double angle = 0.0;
    /// Absent near open path ends, where only a one-sided chord exists.
    std::optional<double> curvature;
    int h = 0;
};

struct MeasureOptions {
    int h = 5;
    ThinOptions thin;
    bool trim_end_caps = true;
};

struct TileMetrics {
    std::string tile_id;
    double mean_width = 0.0;
    double mean_angle = 0.0;
    double mean_curvature = 0.0;
    /// Points with width and angle; mean_width and mean_angle average over these.
    std::size_t n_points = 0;
    /// Subset of n_points that also carry curvature; mean_curvature averages over these.
    std::size_t n_curvature_points = 0;
    /// Non-junction skeleton pixels without a usable neighbour at distance h.
    std::size_t n_skipped = 0;
    bool defined = false;
};

/// Intermediate products of one tile, kept for debug dumps.
struct TileAnalysis {
    Skeleton skeleton;
    std::vector<SkeletonPath> paths;
    std::vector<PointMeasure> points;
    TileMetrics metrics;
};

/// Number of leading points of `path` that fall inside the end cap of a free
/// end: the smallest k with k >= dist(points[k]) and dist(points[k]) at least
/// the path's median radius minus one. Thinning bends the last inscribed
/// radius of a ribbon toward a corner or along the cap, so these points carry
/// no orientation information. Returns 0 when the front is not a free end.
std::size_t end_cap_length(const DistanceField& field, const Skeleton& skeleton, const SkeletonPath& path,
                           bool from_back = false);

/// Width/angle/curvature at every non-junction skeleton point of every path.
/// With `trim_end_caps`, open paths lose their end-cap points (see
/// end_cap_length) before measuring; trimmed points count as skipped.
std::vector<PointMeasure> measure_paths(const DistanceField& field, const Skeleton& skeleton,
                                        const std::vector<SkeletonPath>& paths, int h,
                                        std::size_t* skipped = nullptr, bool trim_end_caps = true);

/// Means over measured points. defined == (n_points > 0).
TileMetrics summarize(const std::vector<PointMeasure>& points, std::string tile_id,
                      std::size_t skipped = 0);

/// thin -> trace_paths -> per-point measures -> tile means.
TileAnalysis analyze_mask(const ClassMask& mask, const MeasureOptions& options = {},
                          std::string tile_id = {});
TileMetrics tile_metrics(const ClassMask& mask, const MeasureOptions& options = {},
                         std::string tile_id = {});

/// Sidewalk mask of the tile through analyze_mask; tile_id taken from the tile.
TileAnalysis analyze_tile(const TileRaster& tile, const MeasureOptions& options = {});

} // namespace walkscope
