#pragma once

#include <optional>
#include <vector>

namespace walkscope {

/// Point in map units. y grows northward for north-up rasters.
struct WorldPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

/// Open ring: the closing vertex is implicit (front() is not repeated at back()).
using Ring = std::vector<WorldPoint>;

struct Polygon {
    Ring outer;
    std::vector<Ring> holes;

    friend bool operator==(const Polygon&, const Polygon&) = default;
};

/// Axis-aligned rectangle in map units.
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    bool degenerate() const noexcept { return !(min_x < max_x && min_y < max_y); }
    double area() const noexcept { return (max_x - min_x) * (max_y - min_y); }
    WorldPoint center() const noexcept { return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}; }
    bool contains(WorldPoint p, double tol = 0.0) const noexcept {
        return p.x >= min_x - tol && p.x <= max_x + tol && p.y >= min_y - tol && p.y <= max_y + tol;
    }
};

/// Shoelace area, positive for counter-clockwise rings.
double signed_area(const Ring& ring);

/// |outer| minus the sum of |hole| areas.
double area(const Polygon& polygon);

Rect bounds(const Ring& ring);

/// Sutherland-Hodgman clip of one ring against a rectangle. Concave rings may
/// come back with zero-width bridge edges along the rectangle border; their
/// area is still exact.
Ring clip_ring(const Ring& ring, const Rect& rect);

/// Clips outer ring and holes independently. Returns nullopt when the clipped
/// outer ring has zero area.
std::optional<Polygon> clip_polygon(const Polygon& polygon, const Rect& rect);

/// Even-odd point-in-polygon with the half-open crossing rule used by the
/// scanline rasterizer (a point on a lower or left edge is inside).
bool contains(const Polygon& polygon, WorldPoint p);

/// Checks outer ring has >= 3 vertices and non-zero area, and every hole
/// vertex lies inside or on the outer ring. Throws FormatError otherwise.
void validate(const Polygon& polygon);

} // namespace walkscope
