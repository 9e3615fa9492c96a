#include "json_detail.hpp"

#include <walkscope/error.hpp>

#include <fstream>

namespace walkscope::detail {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

namespace {

Ring parse_ring(const json& coords) {
    Ring ring;
    for (const json& pt : coords) {
        if (!pt.is_array() || pt.size() < 2) {
            throw FormatError("ring coordinate must be [x, y]");
        }
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (ring.size() >= 2 && ring.front() == ring.back()) {
        ring.pop_back();
    }
    return ring;
}

Polygon parse_polygon(const json& rings) {
    if (!rings.is_array() || rings.empty()) {
        throw FormatError("polygon needs at least one ring");
    }
    Polygon poly;
    poly.outer = parse_ring(rings[0]);
    for (std::size_t i = 1; i < rings.size(); ++i) {
        poly.holes.push_back(parse_ring(rings[i]));
    }
    validate(poly);
    return poly;
}

json ring_json(const Ring& ring) {
    json out = json::array();
    for (const WorldPoint& p : ring) {
        out.push_back({p.x, p.y});
    }
    if (!ring.empty()) {
        out.push_back({ring.front().x, ring.front().y});
    }
    return out;
}

} // namespace

std::string read_crs_name(const json& doc) {
    if (doc.contains("crs") && doc["crs"].is_object()) {
        const json& crs = doc["crs"];
        if (crs.contains("properties") && crs["properties"].contains("name")) {
            return crs["properties"]["name"].get<std::string>();
        }
    }
    return {};
}

std::vector<Polygon> read_geometry_polygons(const json& geometry) {
    std::vector<Polygon> out;
    if (geometry.is_null()) {
        return out;
    }
    const std::string type = geometry.value("type", "");
    const json& coords = geometry.at("coordinates");
    if (type == "Polygon") {
        out.push_back(parse_polygon(coords));
    } else if (type == "MultiPolygon") {
        for (const json& rings : coords) {
            out.push_back(parse_polygon(rings));
        }
    } else {
        throw FormatError("unsupported geometry type '" + type + "'");
    }
    return out;
}

json feature_collection(const std::string& crs_id) {
    json doc = {{"type", "FeatureCollection"}, {"features", json::array()}};
    if (!crs_id.empty()) {
        doc["crs"] = {{"type", "name"}, {"properties", {{"name", crs_id}}}};
    }
    return doc;
}

json polygon_geometry(const Polygon& polygon) {
    json rings = json::array();
    rings.push_back(ring_json(polygon.outer));
    for (const Ring& h : polygon.holes) {
        rings.push_back(ring_json(h));
    }
    return {{"type", "Polygon"}, {"coordinates", rings}};
}

} // namespace walkscope::detail
