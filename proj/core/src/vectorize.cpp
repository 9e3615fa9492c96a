#include <walkscope/vectorize.hpp>

#include <walkscope/error.hpp>

#include "json_detail.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>


namespace walkscope {

using nlohmann::json;

void require_same_crs(const std::string& a, const std::string& b, const std::string& context) {
    if (!a.empty() && !b.empty() && a != b) {
        throw CrsMismatch(context + ": CRS '" + a + "' does not match '" + b + "'");
    }
}

VectorLayer clip_layer(const VectorLayer& layer, const TileExtent& extent) {
    require_same_crs(layer.crs_id, extent.crs_id, "clip_layer(" + extent.tile_id + ")");
    const Rect rect = extent.rect();
    VectorLayer out;
    out.crs_id = layer.crs_id.empty() ? extent.crs_id : layer.crs_id;
    for (const ClassPolygon& f : layer.features) {
        const Rect b = bounds(f.polygon.outer);
        if (b.min_x >= rect.min_x && b.max_x <= rect.max_x && b.min_y >= rect.min_y && b.max_y <= rect.max_y) {
            out.features.push_back(f);
            continue;
        }
        if (b.max_x <= rect.min_x || b.min_x >= rect.max_x || b.max_y <= rect.min_y || b.min_y >= rect.max_y) {
            continue;
        }
        if (auto clipped = clip_polygon(f.polygon, rect)) {
            out.features.push_back({std::move(*clipped), f.class_id});
        }
    }
    return out;
}

ClassPriority default_class_priority() {
    return {ClassId::sidewalk, ClassId::road, ClassId::building};
}

Geotransform geotransform_for(const TileExtent& extent, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw PreconditionError("tile " + extent.tile_id + ": raster dimensions must be positive");
    }
    if (extent.rect().degenerate()) {
        throw PreconditionError("tile " + extent.tile_id + ": degenerate extent");
    }
    return Geotransform{extent.min_x, extent.max_y, (extent.max_x - extent.min_x) / width,
                        -(extent.max_y - extent.min_y) / height, extent.crs_id};
}

namespace {

struct Edge {
    WorldPoint a;
    WorldPoint b;
};

// Even-odd scanline fill at pixel centers. A center exactly on a crossing is
// inside on the span start and outside on the span end (half-open [x0, x1)).
void burn_polygon(const Polygon& polygon, const Geotransform& gt, int width, int height,
                  std::uint8_t value, std::vector<std::uint8_t>& labels) {
    std::vector<Edge> edges;
    auto add_ring = [&edges](const Ring& ring) {
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
            edges.push_back({ring[j], ring[i]});
        }
    };
    if (polygon.outer.size() < 3) {
        return;
    }
    add_ring(polygon.outer);
    for (const Ring& hole : polygon.holes) {
        if (hole.size() >= 3) {
            add_ring(hole);
        }
    }
    const Rect b = bounds(polygon.outer);

    // Rows whose center y may fall inside the polygon's y-range.
    const double ry0 = (b.max_y - gt.origin_y) / gt.pixel_size_y - 0.5;
    const double ry1 = (b.min_y - gt.origin_y) / gt.pixel_size_y - 0.5;
    const int row_lo = std::max(0, static_cast<int>(std::floor(std::min(ry0, ry1))) - 1);
    const int row_hi = std::min(height - 1, static_cast<int>(std::ceil(std::max(ry0, ry1))) + 1);

    auto center_x = [&gt](int col) { return gt.origin_x + (col + 0.5) * gt.pixel_size_x; };
    // First column whose center x is >= x.
    auto first_col_at_or_after = [&](double x) {
        double guess = std::ceil((x - gt.origin_x) / gt.pixel_size_x - 0.5);
        guess = std::clamp(guess, -1.0, static_cast<double>(width) + 1.0);
        int c = static_cast<int>(guess);
        while (c > 0 && center_x(c - 1) >= x) {
            --c;
        }
        while (c < width && center_x(c) < x) {
            ++c;
        }
        return std::clamp(c, 0, width);
    };

    std::vector<double> xs;
    for (int row = row_lo; row <= row_hi; ++row) {
        const double y = gt.origin_y + (row + 0.5) * gt.pixel_size_y;
        xs.clear();
        for (const Edge& e : edges) {
            if ((e.a.y <= y) != (e.b.y <= y)) {
                xs.push_back(e.a.x + (y - e.a.y) * (e.b.x - e.a.x) / (e.b.y - e.a.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        auto* line = labels.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(width);
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int c0 = first_col_at_or_after(xs[k]);
            const int c1 = first_col_at_or_after(xs[k + 1]);
            std::fill(line + c0, line + std::max(c0, c1), value);
        }
    }
}

} // namespace

TileRaster rasterize(const std::vector<VectorLayer>& layers, const TileExtent& extent, int width,
                     int height, const ClassPriority& priority) {
    const Geotransform gt = geotransform_for(extent, width, height);
    for (const VectorLayer& layer : layers) {
        require_same_crs(layer.crs_id, extent.crs_id, "rasterize(" + extent.tile_id + ")");
    }
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                                     static_cast<std::uint8_t>(ClassId::background));
    // Lowest priority first so higher classes overwrite.
    for (auto it = priority.rbegin(); it != priority.rend(); ++it) {
        if (*it == ClassId::background) {
            continue;
        }
        const auto value = static_cast<std::uint8_t>(*it);
        for (const VectorLayer& layer : layers) {
            for (const ClassPolygon& f : layer.features) {
                if (f.class_id == *it) {
                    burn_polygon(f.polygon, gt, width, height, value, labels);
                }
            }
        }
    }
    return TileRaster(width, height, std::move(labels), gt, extent.tile_id);
}

using detail::feature_collection;
using detail::load_json;
using detail::polygon_geometry;
using detail::read_crs_name;
using detail::read_geometry_polygons;
using detail::save_json;

VectorLayer read_vector_layer(const std::filesystem::path& path, std::optional<ClassId> fixed_class,
                              const std::string& class_property) {
    const json doc = load_json(path);
    VectorLayer layer;
    try {
        layer.crs_id = read_crs_name(doc);
        for (const json& f : doc.at("features")) {
            ClassId cls = ClassId::background;
            if (fixed_class) {
                cls = *fixed_class;
            } else {
                const json& props = f.at("properties");
                if (!props.contains(class_property)) {
                    throw FormatError("feature without '" + class_property + "' property");
                }
                const json& v = props[class_property];
                const std::optional<ClassId> parsed =
                    v.is_number_integer() ? (is_valid_label(v.get<int>())
                                                 ? std::optional<ClassId>(static_cast<ClassId>(v.get<int>()))
                                                 : std::nullopt)
                                          : parse_class(v.get<std::string>());
                if (!parsed) {
                    throw FormatError("unknown class value " + v.dump());
                }
                cls = *parsed;
            }
            for (Polygon& p : read_geometry_polygons(f.at("geometry"))) {
                layer.features.push_back({std::move(p), cls});
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return layer;
}

void write_vector_layer(const std::filesystem::path& path, const VectorLayer& layer,
                        const std::string& class_property) {
    json doc = feature_collection(layer.crs_id);
    for (const ClassPolygon& f : layer.features) {
        doc["features"].push_back({{"type", "Feature"},
                                   {"properties", {{class_property, std::string(class_name(f.class_id))}}},
                                   {"geometry", polygon_geometry(f.polygon)}});
    }
    save_json(path, doc);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const json doc = load_json(path);
    std::vector<ManifestEntry> out;
    try {
        const std::string crs = doc.value("crs_id", std::string{});
        for (const json& t : doc.at("tiles")) {
            ManifestEntry e;
            e.extent.tile_id = t.at("tile_id").get<std::string>();
            e.extent.min_x = t.at("min_x").get<double>();
            e.extent.min_y = t.at("min_y").get<double>();
            e.extent.max_x = t.at("max_x").get<double>();
            e.extent.max_y = t.at("max_y").get<double>();
            e.extent.crs_id = t.value("crs_id", crs);
            e.width = t.value("width", 0);
            e.height = t.value("height", 0);
            if (e.extent.rect().degenerate()) {
                throw FormatError("tile " + e.extent.tile_id + " has a degenerate extent");
            }
            out.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries,
                    const std::string& crs_id) {
    json doc = {{"crs_id", crs_id}, {"tiles", json::array()}};
    for (const ManifestEntry& e : entries) {
        json t = {{"tile_id", e.extent.tile_id}, {"min_x", e.extent.min_x}, {"min_y", e.extent.min_y},
                  {"max_x", e.extent.max_x},     {"max_y", e.extent.max_y}};
        if (e.width > 0) {
            t["width"] = e.width;
        }
        if (e.height > 0) {
            t["height"] = e.height;
        }
        if (!e.extent.crs_id.empty() && e.extent.crs_id != crs_id) {
            t["crs_id"] = e.extent.crs_id;
        }
        doc["tiles"].push_back(std::move(t));
    }
    save_json(path, doc);
}

} // namespace walkscope
