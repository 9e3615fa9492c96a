#include <walkscope/aggregate.hpp>

#include <walkscope/error.hpp>

#include "json_detail.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace walkscope {

using nlohmann::json;

LandUseLayer read_landuse_layer(const std::filesystem::path& path, const std::string& category_property) {
    const json doc = detail::load_json(path);
    LandUseLayer layer;
    try {
        layer.crs_id = detail::read_crs_name(doc);
        for (const json& f : doc.at("features")) {
            const json& props = f.at("properties");
            if (!props.contains(category_property) || props[category_property].is_null()) {
                throw FormatError("feature without '" + category_property + "' property");
            }
            const json& v = props[category_property];
            const std::string category = v.is_string() ? v.get<std::string>() : v.dump();
            for (Polygon& p : detail::read_geometry_polygons(f.at("geometry"))) {
                layer.features.push_back({std::move(p), category});
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return layer;
}

namespace {

// Sum of pieces in ascending order, so the total does not depend on feature order.
double stable_sum(std::vector<double> pieces) {
    std::sort(pieces.begin(), pieces.end());
    double s = 0.0;
    for (double p : pieces) {
        s += p;
    }
    return s;
}

std::optional<std::string> majority_category(const Rect& rect, const LandUseLayer& layer) {
    std::map<std::string, std::vector<double>> pieces;
    for (const LandUseFeature& f : layer.features) {
        const Rect b = bounds(f.polygon.outer);
        if (b.max_x <= rect.min_x || b.min_x >= rect.max_x || b.max_y <= rect.min_y || b.min_y >= rect.max_y) {
            continue;
        }
        if (auto clipped = clip_polygon(f.polygon, rect)) {
            const double a = area(*clipped);
            if (a > 0.0) {
                pieces[f.category].push_back(a);
            }
        }
    }
    std::optional<std::string> best;
    double best_area = 0.0;
    // Map iteration is lexicographic, so a strict '>' keeps the smallest name on ties.
    for (auto& [category, parts] : pieces) {
        const double a = stable_sum(std::move(parts));
        if (!best || a > best_area) {
            best = category;
            best_area = a;
        }
    }
    return best;
}

std::optional<std::string> centroid_category(const Rect& rect, const LandUseLayer& layer) {
    const WorldPoint c = rect.center();
    std::optional<std::string> best;
    for (const LandUseFeature& f : layer.features) {
        if (contains(f.polygon, c) && (!best || f.category < *best)) {
            best = f.category;
        }
    }
    return best;
}

} // namespace

std::map<std::string, std::string> landuse_join(const std::vector<TileExtent>& extents, const LandUseLayer& layer,
                                                JoinRule rule) {
    std::map<std::string, std::string> out;
    for (const TileExtent& e : extents) {
        require_same_crs(layer.crs_id, e.crs_id, "landuse_join(" + e.tile_id + ")");
        const Rect rect = e.rect();
        auto cat = rule == JoinRule::majority_area ? majority_category(rect, layer) : centroid_category(rect, layer);
        if (cat) {
            out[e.tile_id] = std::move(*cat);
        }
    }
    return out;
}

Aggregation aggregate_by_landuse(const std::vector<TileMetrics>& metrics,
                                 const std::map<std::string, std::string>& assignment,
                                 const std::vector<std::string>& category_order) {
    struct Acc {
        std::vector<double> width;
        std::vector<double> angle;
        std::vector<double> curvature;
    };
    std::map<std::string, Acc> acc;
    Aggregation out;
    for (const TileMetrics& m : metrics) {
        const auto it = assignment.find(m.tile_id);
        if (it == assignment.end()) {
            ++out.n_unassigned;
            continue;
        }
        if (!m.defined) {
            ++out.n_undefined;
            continue;
        }
        Acc& a = acc[it->second];
        a.width.push_back(m.mean_width);
        a.angle.push_back(m.mean_angle);
        if (m.n_curvature_points > 0) {
            a.curvature.push_back(m.mean_curvature);
        }
    }

    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const std::string& c : category_order) {
        if (acc.contains(c) && seen.insert(c).second) {
            order.push_back(c);
        }
    }
    for (const auto& [c, _] : acc) {
        if (seen.insert(c).second) {
            order.push_back(c);
        }
    }
    for (const std::string& c : order) {
        Acc& a = acc[c];
        const double n = static_cast<double>(a.width.size());
        std::optional<double> curvature;
        if (!a.curvature.empty()) {
            curvature = stable_sum(a.curvature) / static_cast<double>(a.curvature.size());
        }
        out.rows.push_back({c, a.width.size(), stable_sum(a.width) / n, stable_sum(a.angle) / n, curvature});
    }
    return out;
}

std::string aggregation_csv(const Aggregation& agg) {
    std::string out = "Land use,# Img.,Width,Angle,Curv.\n";
    for (const LandUseAggregate& r : agg.rows) {
        const bool quote = r.category.find_first_of(",\"") != std::string::npos;
        std::string name = r.category;
        if (quote) {
            std::string escaped;
            for (char ch : name) {
                escaped += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            }
            name = "\"" + escaped + "\"";
        }
        out += fmt::format("{},{},{:.2f},{:.2f},{}\n", name, r.n_tiles, r.mean_width, r.mean_angle,
                           r.mean_curvature ? fmt::format("{:.3f}", *r.mean_curvature) : std::string{});
    }
    return out;
}

std::string aggregation_json(const Aggregation& agg) {
    json rows = json::array();
    for (const LandUseAggregate& r : agg.rows) {
        rows.push_back({{"Land use", r.category},
                        {"# Img.", r.n_tiles},
                        {"Width", r.mean_width},
                        {"Angle", r.mean_angle},
                        {"Curv.", r.mean_curvature ? json(*r.mean_curvature) : json(nullptr)}});
    }
    json doc = {{"rows", rows}, {"unassigned", agg.n_unassigned}, {"undefined", agg.n_undefined}};
    return doc.dump(2) + "\n";
}

} // namespace walkscope
