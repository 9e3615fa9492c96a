#pragma once

#include <walkscope/grid.hpp>
#include <walkscope/raster_io.hpp>

#include <vector>

namespace walkscope {

/// One-pixel-wide skeleton of a class mask.
struct Skeleton {
    BitGrid bits;
    ClassId source_class = ClassId::sidewalk;

    int width() const noexcept { return bits.width(); }
    int height() const noexcept { return bits.height(); }
    bool test(int row, int col) const noexcept { return bits.contains(row, col) && bits(row, col) != 0; }
    std::size_t count() const noexcept;
};

struct ThinOptions {
    /// Spurs (endpoint-to-junction branches) with fewer pixels than this are removed. 0 disables.
    int prune_length = 3;
};

/// Zhang-Suen two-subiteration thinning run to a fixpoint. Each candidate the
/// subiteration marks is re-checked against the current image before removal,
/// so only simple points are deleted and 8-connectivity of every component is
/// kept. Redundant corner pixels are then dropped. A 2x2 block where every
/// pixel anchors its own branch loses a corner whose neighbours stay connected
/// some other way, or is rerouted through an adjacent foreground pixel.
Skeleton thin(const ClassMask& mask, const ThinOptions& options = {});

/// Thinning on a bare bit grid (same algorithm as above).
BitGrid thin_bits(const BitGrid& bits, const ThinOptions& options = {});

/// Ordered run of skeleton pixels.
struct SkeletonPath {
    std::vector<PixelCoord> points;
    bool closed = false;

    std::size_t size() const noexcept { return points.size(); }
};

/// Number of set 8-neighbours of (row, col).
int neighbor_count(const BitGrid& bits, int row, int col) noexcept;

/// Degree >= 3.
bool is_junction(const BitGrid& bits, int row, int col) noexcept;

/// Splits the skeleton into paths. Junction pixels terminate every incident
/// path and may therefore appear in several paths; every other pixel appears
/// in exactly one. Isolated pixels and junction pixels not reached by any
/// path become length-1 paths. Pure cycles come back with closed = true.
std::vector<SkeletonPath> trace_paths(const Skeleton& skeleton);
std::vector<SkeletonPath> trace_paths(const BitGrid& bits);

} // namespace walkscope
