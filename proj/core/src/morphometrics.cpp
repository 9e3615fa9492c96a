#include <walkscope/morphometrics.hpp>

#include <walkscope/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace walkscope {

namespace {

constexpr double kFar = std::numeric_limits<double>::infinity();

// 1-D squared distance transform of sampled function f (lower envelope of
// parabolas). Sites with f = +inf are never added to the envelope.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kFar) {
            continue;
        }
        const double fq = f[q] + static_cast<double>(q) * q;
        double s = -kFar;
        while (k >= 0) {
            const int p = v[k];
            s = (fq - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) {
                break;
            }
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -kFar : s;
        z[k + 1] = kFar;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kFar);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) {
            ++j;
        }
        const double dq = q - v[j];
        d[q] = dq * dq + f[v[j]];
    }
}

} // namespace

DistanceField distance_transform(const BitGrid& bits) {
    // One ring of background around the grid stands in for everything outside it.
    const int w = bits.width() + 2;
    const int h = bits.height() + 2;
    std::vector<double> sq(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0);
    for (int r = 0; r < bits.height(); ++r) {
        for (int c = 0; c < bits.width(); ++c) {
            if (bits(r, c) != 0) {
                sq[static_cast<std::size_t>(r + 1) * w + (c + 1)] = kFar;
            }
        }
    }
    std::vector<double> f;
    std::vector<double> d;
    std::vector<int> v;
    std::vector<double> z;

    f.resize(static_cast<std::size_t>(h));
    d.resize(static_cast<std::size_t>(h));
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) {
            f[r] = sq[static_cast<std::size_t>(r) * w + c];
        }
        edt_1d(f, d, v, z);
        for (int r = 0; r < h; ++r) {
            sq[static_cast<std::size_t>(r) * w + c] = d[r];
        }
    }
    f.resize(static_cast<std::size_t>(w));
    d.resize(static_cast<std::size_t>(w));
    for (int r = 0; r < h; ++r) {
        std::copy_n(sq.begin() + static_cast<std::ptrdiff_t>(r) * w, w, f.begin());
        edt_1d(f, d, v, z);
        std::copy(d.begin(), d.end(), sq.begin() + static_cast<std::ptrdiff_t>(r) * w);
    }

    DistanceField field(bits.width(), bits.height(), 0.0);
    for (int r = 0; r < bits.height(); ++r) {
        for (int c = 0; c < bits.width(); ++c) {
            field(r, c) = std::sqrt(sq[static_cast<std::size_t>(r + 1) * w + (c + 1)]);
        }
    }
    return field;
}

DistanceField distance_transform(const ClassMask& mask) {
    return distance_transform(mask.bits);
}

double width_at(const DistanceField& field, PixelCoord p) {
    if (!field.contains(p) || field[p] <= 0.0) {
        throw PreconditionError("width_at: pixel (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                                ") is not foreground");
    }
    return 2.0 * field[p] - 1.0;
}

std::optional<double> circumcurvature(Point2 a, Point2 b, Point2 c) noexcept {
    const double ab = std::hypot(b.x - a.x, b.y - a.y);
    const double bc = std::hypot(c.x - b.x, c.y - b.y);
    const double ca = std::hypot(a.x - c.x, a.y - c.y);
    if (ab == 0.0 || bc == 0.0 || ca == 0.0) {
        return std::nullopt;
    }
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross == 0.0) {
        return 0.0;
    }
    // 4 * area = 2 * |cross|
    return 2.0 * std::abs(cross) / (ab * bc * ca);
}

namespace {

struct Neighbours {
    std::optional<std::size_t> before;
    std::optional<std::size_t> after;
};

Neighbours neighbours(const SkeletonPath& path, std::size_t i, int h) {
    const std::size_t n = path.size();
    if (h <= 0 || i >= n) {
        return {};
    }
    const auto step = static_cast<std::size_t>(h);
    if (path.closed && n >= 2 * step + 1) {
        return {(i + n - step) % n, (i + step) % n};
    }
    Neighbours out;
    if (i >= step) {
        out.before = i - step;
    }
    if (i + step < n) {
        out.after = i + step;
    }
    return out;
}

Point2 to_point(PixelCoord p) {
    return {static_cast<double>(p.col), static_cast<double>(p.row)};
}

} // namespace

std::optional<double> angle_at(const SkeletonPath& path, std::size_t i, int h) {
    const Neighbours nb = neighbours(path, i, h);
    PixelCoord from;
    PixelCoord to;
    if (nb.before && nb.after) {
        from = path.points[*nb.before];
        to = path.points[*nb.after];
    } else if (nb.after) {
        from = path.points[i];
        to = path.points[*nb.after];
    } else if (nb.before) {
        from = path.points[*nb.before];
        to = path.points[i];
    } else {
        return std::nullopt;
    }
    const double dx = to.col - from.col;
    const double dy = -(to.row - from.row);
    if (dx == 0.0 && dy == 0.0) {
        return std::nullopt;
    }
    double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    if (deg < 0.0) {
        deg += 180.0;
    }
    if (deg >= 180.0) {
        deg -= 180.0;
    }
    return deg == 0.0 ? 0.0 : deg;
}

std::optional<double> curvature_at(const SkeletonPath& path, std::size_t i, int h) {
    const Neighbours nb = neighbours(path, i, h);
    if (!nb.before || !nb.after) {
        return std::nullopt;
    }
    return circumcurvature(to_point(path.points[*nb.before]), to_point(path.points[i]),
                           to_point(path.points[*nb.after]));
}

std::size_t end_cap_length(const DistanceField& field, const Skeleton& skeleton, const SkeletonPath& path,
                           bool from_back) {
    const std::size_t n = path.size();
    if (path.closed || n == 0) {
        return 0;
    }
    auto at = [&](std::size_t k) { return from_back ? path.points[n - 1 - k] : path.points[k]; };
    const PixelCoord end = at(0);
    if (n > 1 && neighbor_count(skeleton.bits, end.row, end.col) != 1) {
        return 0;
    }
    // Plateau radius of the path; inside the cap the radius is bounded by the
    // cap instead of the sides.
    std::vector<double> radii;
    radii.reserve(n);
    for (const PixelCoord& p : path.points) {
        radii.push_back(field[p]);
    }
    std::nth_element(radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(n / 2), radii.end());
    const double plateau = radii[n / 2] - 1.0;

    std::size_t k = 0;
    while (k < n && (static_cast<double>(k) < field[at(k)] || field[at(k)] < plateau)) {
        ++k;
    }
    return k;
}

std::vector<PointMeasure> measure_paths(const DistanceField& field, const Skeleton& skeleton,
                                        const std::vector<SkeletonPath>& paths, int h, std::size_t* skipped,
                                        bool trim_end_caps) {
    std::vector<PointMeasure> out;
    std::size_t skip = 0;
    SkeletonPath core;
    for (const SkeletonPath& path : paths) {
        std::size_t lo = 0;
        std::size_t hi = path.size();
        if (trim_end_caps && !path.closed) {
            lo = std::min(hi, end_cap_length(field, skeleton, path));
            hi -= std::min(hi - lo, end_cap_length(field, skeleton, path, true));
        }
        for (std::size_t i = 0; i < path.size(); ++i) {
            if ((i < lo || i >= hi) && !is_junction(skeleton.bits, path.points[i].row, path.points[i].col)) {
                ++skip;
            }
        }
        core.closed = path.closed;
        core.points.assign(path.points.begin() + static_cast<std::ptrdiff_t>(lo),
                           path.points.begin() + static_cast<std::ptrdiff_t>(hi));
        for (std::size_t i = 0; i < core.size(); ++i) {
            const PixelCoord p = core.points[i];
            if (is_junction(skeleton.bits, p.row, p.col)) {
                continue;
            }
            const std::optional<double> angle = angle_at(core, i, h);
            if (!angle) {
                ++skip;
                continue;
            }
            out.push_back(PointMeasure{p, width_at(field, p), *angle, curvature_at(core, i, h), h});
        }
    }
    if (skipped != nullptr) {
        *skipped = skip;
    }
    return out;
}

TileMetrics summarize(const std::vector<PointMeasure>& points, std::string tile_id, std::size_t skipped) {
    TileMetrics m;
    m.tile_id = std::move(tile_id);
    m.n_skipped = skipped;
    double sw = 0.0;
    double sa = 0.0;
    double sk = 0.0;
    for (const PointMeasure& p : points) {
        sw += p.width;
        sa += p.angle;
        if (p.curvature) {
            sk += *p.curvature;
            ++m.n_curvature_points;
        }
    }
    m.n_points = points.size();
    m.defined = m.n_points > 0;
    if (m.defined) {
        m.mean_width = sw / static_cast<double>(m.n_points);
        m.mean_angle = sa / static_cast<double>(m.n_points);
    }
    if (m.n_curvature_points > 0) {
        m.mean_curvature = sk / static_cast<double>(m.n_curvature_points);
    }
    return m;
}

TileAnalysis analyze_mask(const ClassMask& mask, const MeasureOptions& options, std::string tile_id) {
    if (options.h < 1) {
        throw PreconditionError("finite-difference scale h must be >= 1");
    }
    TileAnalysis a;
    a.skeleton = thin(mask, options.thin);
    a.paths = trace_paths(a.skeleton);
    const DistanceField field = distance_transform(mask);
    std::size_t skipped = 0;
    a.points = measure_paths(field, a.skeleton, a.paths, options.h, &skipped, options.trim_end_caps);
    a.metrics = summarize(a.points, std::move(tile_id), skipped);
    return a;
}

TileMetrics tile_metrics(const ClassMask& mask, const MeasureOptions& options, std::string tile_id) {
    return analyze_mask(mask, options, std::move(tile_id)).metrics;
}

TileAnalysis analyze_tile(const TileRaster& tile, const MeasureOptions& options) {
    return analyze_mask(extract_class_mask(tile, ClassId::sidewalk), options, tile.tile_id());
}

} // namespace walkscope
