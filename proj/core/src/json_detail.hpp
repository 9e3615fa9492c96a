#pragma once

// Private GeoJSON/JSON helpers shared by the vector readers.

#include <walkscope/geometry.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace walkscope::detail {

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Legacy GeoJSON `crs.properties.name`, or "" when absent.
std::string read_crs_name(const nlohmann::json& doc);

/// Polygon or MultiPolygon geometry; null geometry gives no polygons.
std::vector<Polygon> read_geometry_polygons(const nlohmann::json& geometry);

nlohmann::json feature_collection(const std::string& crs_id);
nlohmann::json polygon_geometry(const Polygon& polygon);

} // namespace walkscope::detail
