#include <walkscope/geometry.hpp>

#include <walkscope/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace walkscope {

double signed_area(const Ring& ring) {
    const std::size_t n = ring.size();
    if (n < 3) {
        return 0.0;
    }
    double twice = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
    }
    return twice / 2.0;
}

double area(const Polygon& polygon) {
    double a = std::abs(signed_area(polygon.outer));
    for (const Ring& hole : polygon.holes) {
        a -= std::abs(signed_area(hole));
    }
    return a;
}

Rect bounds(const Ring& ring) {
    Rect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const WorldPoint& p : ring) {
        r.min_x = std::min(r.min_x, p.x);
        r.min_y = std::min(r.min_y, p.y);
        r.max_x = std::max(r.max_x, p.x);
        r.max_y = std::max(r.max_y, p.y);
    }
    return r;
}

namespace {

enum class Side { left, right, bottom, top };

bool inside(WorldPoint p, Side side, double k) {
    switch (side) {
    case Side::left: return p.x >= k;
    case Side::right: return p.x <= k;
    case Side::bottom: return p.y >= k;
    case Side::top: return p.y <= k;
    }
    return false;
}

// Intersection of segment ab with the clip line; the clipped coordinate is set exactly.
WorldPoint intersect(WorldPoint a, WorldPoint b, Side side, double k) {
    if (side == Side::left || side == Side::right) {
        const double t = (k - a.x) / (b.x - a.x);
        return {k, a.y + t * (b.y - a.y)};
    }
    const double t = (k - a.y) / (b.y - a.y);
    return {a.x + t * (b.x - a.x), k};
}

Ring clip_against(const Ring& in, Side side, double k) {
    Ring out;
    if (in.empty()) {
        return out;
    }
    out.reserve(in.size() + 4);
    WorldPoint prev = in.back();
    bool prev_in = inside(prev, side, k);
    for (const WorldPoint& cur : in) {
        const bool cur_in = inside(cur, side, k);
        if (cur_in) {
            if (!prev_in) {
                out.push_back(intersect(prev, cur, side, k));
            }
            out.push_back(cur);
        } else if (prev_in) {
            out.push_back(intersect(prev, cur, side, k));
        }
        prev = cur;
        prev_in = cur_in;
    }
    return out;
}

double cross(WorldPoint o, WorldPoint a, WorldPoint b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(WorldPoint p, WorldPoint a, WorldPoint b) {
    if (cross(a, b, p) != 0.0) {
        return false;
    }
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
           p.y <= std::max(a.y, b.y);
}

bool on_boundary(const Ring& ring, WorldPoint p) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        if (on_segment(p, ring[j], ring[i])) {
            return true;
        }
    }
    return false;
}

int crossings_left_of(const Ring& ring, WorldPoint p) {
    int n = 0;
    const std::size_t size = ring.size();
    for (std::size_t i = 0, j = size - 1; i < size; j = i++) {
        const WorldPoint a = ring[j];
        const WorldPoint b = ring[i];
        if ((a.y <= p.y) != (b.y <= p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x <= p.x) {
                ++n;
            }
        }
    }
    return n;
}

} // namespace

Ring clip_ring(const Ring& ring, const Rect& rect) {
    Ring r = clip_against(ring, Side::left, rect.min_x);
    r = clip_against(r, Side::right, rect.max_x);
    r = clip_against(r, Side::bottom, rect.min_y);
    r = clip_against(r, Side::top, rect.max_y);
    return r;
}

std::optional<Polygon> clip_polygon(const Polygon& polygon, const Rect& rect) {
    Polygon out;
    out.outer = clip_ring(polygon.outer, rect);
    if (out.outer.size() < 3 || signed_area(out.outer) == 0.0) {
        return std::nullopt;
    }
    for (const Ring& hole : polygon.holes) {
        Ring h = clip_ring(hole, rect);
        if (h.size() >= 3 && signed_area(h) != 0.0) {
            out.holes.push_back(std::move(h));
        }
    }
    return out;
}

bool contains(const Polygon& polygon, WorldPoint p) {
    int n = crossings_left_of(polygon.outer, p);
    for (const Ring& hole : polygon.holes) {
        n += crossings_left_of(hole, p);
    }
    return (n % 2) == 1;
}

void validate(const Polygon& polygon) {
    if (polygon.outer.size() < 3) {
        throw FormatError("polygon outer ring has fewer than 3 vertices");
    }
    if (signed_area(polygon.outer) == 0.0) {
        throw FormatError("polygon outer ring has zero area");
    }
    const Polygon outer_only{polygon.outer, {}};
    for (const Ring& hole : polygon.holes) {
        if (hole.size() < 3) {
            throw FormatError("polygon hole has fewer than 3 vertices");
        }
        for (const WorldPoint& p : hole) {
            if (!contains(outer_only, p) && !on_boundary(polygon.outer, p)) {
                throw FormatError("polygon hole is not contained in its outer ring");
            }
        }
    }
}

} // namespace walkscope
