#pragma once

#include <walkscope/raster_io.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace walkscope {

enum class RibbonKind { straight, arc };

struct RibbonSpec {
    RibbonKind kind = RibbonKind::straight;
    /// Odd, >= 3, measured perpendicular to the centerline.
    int width = 9;
    /// Straight: direction of the centerline, degrees counter-clockwise from +x with y up.
    double heading = 0.0;
    /// Arc: centerline radius in pixels.
    double radius = 50.0;
    /// Straight: centerline length. Arc: arc length along the centerline;
    /// values >= 2*pi*radius give a full annulus.
    double length = 100.0;
    int canvas_width = 128;
    int canvas_height = 128;
    /// Arc: angle of the sector midpoint, degrees.
    double arc_mid_angle = 90.0;
    /// Sub-pixel shift of the centerline drawn from `seed` when set.
    bool jitter = false;
    std::uint64_t seed = 0;
};

struct GroundTruth {
    double width = 0.0;
    /// Straight ribbons only.
    std::optional<double> angle;
    double curvature = 0.0;
};

struct SynthRibbon {
    ClassMask mask;
    GroundTruth truth;
};

/// Throws PreconditionError when the width is even or < 3, the arc radius is
/// not above the width, or the ribbon does not fit the canvas with a 2-pixel margin.
SynthRibbon make_ribbon(const RibbonSpec& spec);

/// Tile with the ribbon labelled sidewalk over background.
TileRaster ribbon_tile(const SynthRibbon& ribbon, const std::string& tile_id);

/// Writes `<dir>/<id>.png`, `<dir>/<id>.json` (sidecar) and `<dir>/<id>.truth.json`.
void write_fixture(const std::filesystem::path& dir, const std::string& tile_id,
                   const SynthRibbon& ribbon, const RibbonSpec& spec);

GroundTruth read_truth(const std::filesystem::path& path);

} // namespace walkscope
