#include <walkscope/raster_io.hpp>

#include <walkscope/error.hpp>
#include <walkscope/image_codec.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace walkscope {

using nlohmann::json;

std::string_view class_name(ClassId c) noexcept {
    switch (c) {
    case ClassId::background: return "background";
    case ClassId::building: return "building";
    case ClassId::road: return "road";
    case ClassId::sidewalk: return "sidewalk";
    }
    return "unknown";
}

std::string_view class_display_name(ClassId c) noexcept {
    switch (c) {
    case ClassId::background: return "Background";
    case ClassId::building: return "Building";
    case ClassId::road: return "Road";
    case ClassId::sidewalk: return "Sidewalk";
    }
    return "Unknown";
}

std::optional<ClassId> parse_class(std::string_view text) noexcept {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    for (ClassId c : kAllClasses) {
        if (lower == class_name(c) || lower == std::to_string(to_index(c))) {
            return c;
        }
    }
    return std::nullopt;
}

void Geotransform::validate() const {
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
        throw FormatError("geotransform origin must be finite");
    }
    if (!(pixel_size_x > 0.0) || !std::isfinite(pixel_size_x)) {
        throw FormatError("geotransform pixel_size_x must be positive");
    }
    if (pixel_size_y == 0.0 || !std::isfinite(pixel_size_y)) {
        throw FormatError("geotransform pixel_size_y must be non-zero");
    }
}

WorldPoint pixel_to_world(const Geotransform& gt, int row, int col) {
    return {gt.origin_x + (col + 0.5) * gt.pixel_size_x, gt.origin_y + (row + 0.5) * gt.pixel_size_y};
}

PixelPosition world_to_pixel(const Geotransform& gt, WorldPoint p) {
    return {(p.y - gt.origin_y) / gt.pixel_size_y - 0.5, (p.x - gt.origin_x) / gt.pixel_size_x - 0.5};
}

Rect grid_extent(const Geotransform& gt, int width, int height) {
    const double x0 = gt.origin_x;
    const double x1 = gt.origin_x + width * gt.pixel_size_x;
    const double y0 = gt.origin_y;
    const double y1 = gt.origin_y + height * gt.pixel_size_y;
    return {std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
}

TileRaster::TileRaster(int width, int height, std::vector<std::uint8_t> labels, Geotransform gt,
                       std::string tile_id)
    : gt_(std::move(gt)), tile_id_(std::move(tile_id)) {
    if (width < 0 || height < 0 ||
        labels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DimensionMismatch("tile " + tile_id_ + ": " + std::to_string(labels.size()) +
                                " labels for a " + std::to_string(width) + "x" + std::to_string(height) +
                                " grid");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!is_valid_label(labels[i])) {
            throw InvalidLabelError(static_cast<int>(i / static_cast<std::size_t>(width)),
                                    static_cast<int>(i % static_cast<std::size_t>(width)), labels[i]);
        }
    }
    gt_.validate();
    labels_ = Grid<std::uint8_t>(width, height, std::move(labels));
}

std::array<std::uint64_t, kClassCount> TileRaster::histogram() const {
    std::array<std::uint64_t, kClassCount> h{};
    for (std::uint8_t v : labels_.values()) {
        ++h[v];
    }
    return h;
}

std::size_t ClassMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits.values().begin(), bits.values().end(), 1));
}

ClassMask extract_class_mask(const TileRaster& tile, ClassId class_id) {
    ClassMask mask{BitGrid(tile.width(), tile.height()), class_id, tile.geotransform()};
    const auto src = tile.labels().values();
    auto dst = mask.bits.values();
    const auto want = static_cast<std::uint8_t>(class_id);
    std::transform(src.begin(), src.end(), dst.begin(),
                   [want](std::uint8_t v) { return static_cast<std::uint8_t>(v == want); });
    return mask;
}

namespace {

template <typename T>
T required(const json& j, const char* key, const std::filesystem::path& path) {
    if (!j.contains(key)) {
        throw FormatError(path.string() + ": missing key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(path.string() + ": key '" + key + "' has the wrong type");
    }
}

} // namespace

Sidecar read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open sidecar " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) {
        throw FormatError(path.string() + ": sidecar must be a JSON object");
    }
    Sidecar s;
    s.geotransform.origin_x = required<double>(j, "origin_x", path);
    s.geotransform.origin_y = required<double>(j, "origin_y", path);
    s.geotransform.pixel_size_x = required<double>(j, "pixel_size_x", path);
    s.geotransform.pixel_size_y = required<double>(j, "pixel_size_y", path);
    s.geotransform.crs_id = required<std::string>(j, "crs_id", path);
    if (j.contains("tile_id")) {
        s.tile_id = required<std::string>(j, "tile_id", path);
    }
    if (j.contains("width")) {
        s.width = required<int>(j, "width", path);
    }
    if (j.contains("height")) {
        s.height = required<int>(j, "height", path);
    }
    try {
        s.geotransform.validate();
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return s;
}

void write_sidecar(const std::filesystem::path& path, const Sidecar& s) {
    json j = {
        {"origin_x", s.geotransform.origin_x},
        {"origin_y", s.geotransform.origin_y},
        {"pixel_size_x", s.geotransform.pixel_size_x},
        {"pixel_size_y", s.geotransform.pixel_size_y},
        {"crs_id", s.geotransform.crs_id},
        {"tile_id", s.tile_id},
    };
    if (s.width) {
        j["width"] = *s.width;
    }
    if (s.height) {
        j["height"] = *s.height;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write sidecar " + path.string());
    }
    out << j.dump(2) << '\n';
}

std::filesystem::path default_sidecar_path(const std::filesystem::path& image_path) {
    auto p = image_path;
    p.replace_extension(".json");
    return p;
}

TileRaster load_tile(const std::filesystem::path& image_path, const std::filesystem::path& sidecar_path) {
    const Sidecar sidecar = read_sidecar(sidecar_path);
    GrayImage img = read_gray_image(image_path);
    if ((sidecar.width && *sidecar.width != img.width()) || (sidecar.height && *sidecar.height != img.height())) {
        throw DimensionMismatch(image_path.string() + ": image is " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + " but the sidecar declares " +
                                std::to_string(sidecar.width.value_or(img.width())) + "x" +
                                std::to_string(sidecar.height.value_or(img.height())));
    }
    std::string tile_id = sidecar.tile_id.empty() ? image_path.stem().string() : sidecar.tile_id;
    const int w = img.width();
    const int h = img.height();
    std::vector<std::uint8_t> labels(img.values().begin(), img.values().end());
    return TileRaster(w, h, std::move(labels), sidecar.geotransform, std::move(tile_id));
}

TileRaster load_tile(const std::filesystem::path& image_path) {
    return load_tile(image_path, default_sidecar_path(image_path));
}

void save_tile(const TileRaster& tile, const std::filesystem::path& image_path,
               const std::filesystem::path& sidecar_path) {
    write_gray_image(image_path, tile.labels());
    write_sidecar(sidecar_path, Sidecar{tile.geotransform(), tile.tile_id(), tile.width(), tile.height()});
}

void save_tile(const TileRaster& tile, const std::filesystem::path& image_path) {
    save_tile(tile, image_path, default_sidecar_path(image_path));
}

} // namespace walkscope
