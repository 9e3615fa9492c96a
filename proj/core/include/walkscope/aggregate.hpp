#pragma once

#include <walkscope/geometry.hpp>
#include <walkscope/morphometrics.hpp>
#include <walkscope/vectorize.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace walkscope {

struct LandUseFeature {
    Polygon polygon;
    std::string category;
};

struct LandUseLayer {
    std::vector<LandUseFeature> features;
    std::string crs_id;
};

/// Reads a GeoJSON FeatureCollection; the category is the string value of
/// `category_property` (numbers are converted to their decimal text).
LandUseLayer read_landuse_layer(const std::filesystem::path& path,
                                const std::string& category_property = "landuse");

enum class JoinRule {
    /// Category with the largest clipped area inside the tile.
    majority_area,
    /// Category of the polygon containing the tile center.
    centroid,
};

/// tile_id -> category. Tiles touching no polygon are absent. Ties go to the
/// lexicographically smallest category. Throws CrsMismatch.
std::map<std::string, std::string> landuse_join(const std::vector<TileExtent>& extents,
                                                const LandUseLayer& layer,
                                                JoinRule rule = JoinRule::majority_area);

struct LandUseAggregate {
    std::string category;
    std::size_t n_tiles = 0;
    double mean_width = 0.0;
    double mean_angle = 0.0;
    /// Over the category's tiles that carry curvature; absent when none does.
    std::optional<double> mean_curvature;
};

struct Aggregation {
    std::vector<LandUseAggregate> rows;
    std::size_t n_unassigned = 0;
    /// Assigned tiles whose metrics are undefined.
    std::size_t n_undefined = 0;
};

/// Unweighted mean of tile-level means per category. Rows follow
/// `category_order` first, then remaining categories lexicographically.
Aggregation aggregate_by_landuse(const std::vector<TileMetrics>& metrics,
                                 const std::map<std::string, std::string>& assignment,
                                 const std::vector<std::string>& category_order = {});

/// Land use,# Img.,Width,Angle,Curv.
std::string aggregation_csv(const Aggregation& agg);
std::string aggregation_json(const Aggregation& agg);

} // namespace walkscope
