#pragma once

#include <walkscope/geometry.hpp>
#include <walkscope/raster_io.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace walkscope {

struct ClassPolygon {
    Polygon polygon;
    ClassId class_id = ClassId::background;
};

/// Ground-truth polygons of one or more classes in a single CRS.
struct VectorLayer {
    std::vector<ClassPolygon> features;
    std::string crs_id;
};

/// World extent of one tile. An empty crs_id means "unspecified" and matches any layer.
struct TileExtent {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;
    std::string tile_id;
    std::string crs_id;

    Rect rect() const noexcept { return {min_x, min_y, max_x, max_y}; }
};

/// Throws CrsMismatch when both ids are non-empty and differ.
void require_same_crs(const std::string& a, const std::string& b, const std::string& context);

/// Intersection of every feature with the extent; empty intersections are dropped.
/// Features whose bounds already lie inside the extent are returned untouched.
VectorLayer clip_layer(const VectorLayer& layer, const TileExtent& extent);

/// Classes in descending burn priority. Classes missing from the list are never burned.
using ClassPriority = std::vector<ClassId>;

/// sidewalk > road > building
ClassPriority default_class_priority();

/// Burns polygons into a width x height label grid covering `extent`. A pixel
/// takes the class of the highest-priority polygon containing its center;
/// uncovered pixels are background. Throws PreconditionError on a degenerate
/// extent or non-positive dimensions.
TileRaster rasterize(const std::vector<VectorLayer>& layers, const TileExtent& extent, int width,
                     int height, const ClassPriority& priority = default_class_priority());

Geotransform geotransform_for(const TileExtent& extent, int width, int height);

/// GeoJSON FeatureCollection reader (Polygon and MultiPolygon geometries).
/// With `fixed_class` every feature gets that class; otherwise the class is read
/// from `class_property` (integer id or class name). The CRS comes from the
/// legacy `crs.properties.name` member when present.
VectorLayer read_vector_layer(const std::filesystem::path& path,
                              std::optional<ClassId> fixed_class = std::nullopt,
                              const std::string& class_property = "class");

void write_vector_layer(const std::filesystem::path& path, const VectorLayer& layer,
                        const std::string& class_property = "class");

/// One entry of a tile manifest: extent plus optional raster dimensions.
struct ManifestEntry {
    TileExtent extent;
    int width = 0;
    int height = 0;
};

/// JSON manifest: {"crs_id": "...", "tiles": [{"tile_id", "min_x", "min_y",
/// "max_x", "max_y", "width", "height"}]}. A per-tile crs_id overrides the
/// top-level one.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries,
                    const std::string& crs_id);

} // namespace walkscope
