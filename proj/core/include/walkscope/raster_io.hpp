#pragma once

#include <walkscope/geometry.hpp>
#include <walkscope/grid.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace walkscope {

/// Canonical label encoding of every tile on disk.
enum class ClassId : std::uint8_t {
    background = 0,
    building = 1,
    road = 2,
    sidewalk = 3,
};

inline constexpr int kClassCount = 4;
inline constexpr std::array<ClassId, kClassCount> kAllClasses = {
    ClassId::background, ClassId::building, ClassId::road, ClassId::sidewalk};

constexpr int to_index(ClassId c) noexcept { return static_cast<int>(c); }
constexpr bool is_valid_label(int value) noexcept { return value >= 0 && value < kClassCount; }

/// "background", "building", "road", "sidewalk".
std::string_view class_name(ClassId c) noexcept;
/// Capitalised display name used in reports ("Sidewalk").
std::string_view class_display_name(ClassId c) noexcept;
/// Accepts lower-case names, display names, or the decimal id.
std::optional<ClassId> parse_class(std::string_view text) noexcept;

/// Fractional pixel position; (row, col) = (0, 0) is the top-left pixel center.
struct PixelPosition {
    double row = 0.0;
    double col = 0.0;
};

struct Geotransform {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size_x = 1.0;
    double pixel_size_y = -1.0;
    std::string crs_id;

    /// Throws FormatError unless pixel_size_x > 0 and pixel_size_y != 0.
    void validate() const;

    friend bool operator==(const Geotransform&, const Geotransform&) = default;
};

/// World coordinate of the center of pixel (row, col).
WorldPoint pixel_to_world(const Geotransform& gt, int row, int col);
/// Inverse of pixel_to_world on pixel centers.
PixelPosition world_to_pixel(const Geotransform& gt, WorldPoint p);
/// World rectangle covered by a width x height grid placed by `gt`.
Rect grid_extent(const Geotransform& gt, int width, int height);

/// Class-labelled tile. Labels are validated on construction and immutable afterwards.
class TileRaster {
public:
    TileRaster() = default;
    /// Throws DimensionMismatch on a size mismatch, InvalidLabelError on the first bad label.
    TileRaster(int width, int height, std::vector<std::uint8_t> labels, Geotransform gt,
               std::string tile_id);

    int width() const noexcept { return labels_.width(); }
    int height() const noexcept { return labels_.height(); }
    const Grid<std::uint8_t>& labels() const noexcept { return labels_; }
    ClassId label(int row, int col) const noexcept { return static_cast<ClassId>(labels_(row, col)); }
    const Geotransform& geotransform() const noexcept { return gt_; }
    const std::string& tile_id() const noexcept { return tile_id_; }

    /// Pixel count per class, indexed by to_index(ClassId).
    std::array<std::uint64_t, kClassCount> histogram() const;

private:
    Grid<std::uint8_t> labels_;
    Geotransform gt_;
    std::string tile_id_;
};

/// Binary foreground mask for one class.
struct ClassMask {
    BitGrid bits;
    ClassId class_id = ClassId::sidewalk;
    Geotransform geotransform;

    int width() const noexcept { return bits.width(); }
    int height() const noexcept { return bits.height(); }
    /// Out-of-grid positions read as background.
    bool test(int row, int col) const noexcept { return bits.contains(row, col) && bits(row, col) != 0; }
    std::size_t count() const noexcept;
};

ClassMask extract_class_mask(const TileRaster& tile, ClassId class_id);

/// Georeference sidecar contents.
struct Sidecar {
    Geotransform geotransform;
    std::string tile_id;
    std::optional<int> width;
    std::optional<int> height;
};

Sidecar read_sidecar(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const Sidecar& sidecar);

/// `<dir>/<stem>.json` next to a tile image.
std::filesystem::path default_sidecar_path(const std::filesystem::path& image_path);

/// Reads an 8-bit single-channel PNG or PGM plus its JSON sidecar.
/// tile_id falls back to the image file stem when the sidecar omits it.
TileRaster load_tile(const std::filesystem::path& image_path, const std::filesystem::path& sidecar_path);
TileRaster load_tile(const std::filesystem::path& image_path);

/// Writes labels (format chosen by extension, .png or .pgm) and the sidecar.
void save_tile(const TileRaster& tile, const std::filesystem::path& image_path,
               const std::filesystem::path& sidecar_path);
void save_tile(const TileRaster& tile, const std::filesystem::path& image_path);

} // namespace walkscope
