#include <walkscope/synth.hpp>

#include <walkscope/error.hpp>

#include "json_detail.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace walkscope {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kMargin = 2;

bool inside_canvas(double col, double row, const RibbonSpec& s) {
    return col >= kMargin && row >= kMargin && col <= s.canvas_width - 1 - kMargin &&
           row <= s.canvas_height - 1 - kMargin;
}

void check_spec(const RibbonSpec& s) {
    if (s.width < 3 || s.width % 2 == 0) {
        throw PreconditionError("ribbon width must be odd and >= 3, got " + std::to_string(s.width));
    }
    if (s.canvas_width <= 0 || s.canvas_height <= 0) {
        throw PreconditionError("ribbon canvas must be non-empty");
    }
    if (!(s.length > 0.0)) {
        throw PreconditionError("ribbon length must be positive");
    }
    if (s.kind == RibbonKind::arc && !(s.radius > s.width)) {
        throw PreconditionError("arc radius must exceed the ribbon width");
    }
}

struct Center {
    double col;
    double row;
};

Center ribbon_center(const RibbonSpec& s) {
    Center c{static_cast<double>(s.canvas_width / 2), static_cast<double>(s.canvas_height / 2)};
    if (s.jitter) {
        std::mt19937_64 rng(s.seed);
        std::uniform_real_distribution<double> shift(-0.5, 0.5);
        c.col += shift(rng);
        c.row += shift(rng);
    }
    return c;
}

BitGrid straight_bits(const RibbonSpec& s, Center c) {
    const double th = s.heading * kDeg;
    // Along-track unit vector in (col, row) with row pointing down.
    const double ux = std::cos(th);
    const double uy = -std::sin(th);
    const double nx = -uy;
    const double ny = ux;
    const double half_len = s.length / 2.0;
    const double half_w = s.width / 2.0;

    for (double a : {-half_len, half_len}) {
        for (double b : {-half_w, half_w}) {
            if (!inside_canvas(c.col + a * ux + b * nx, c.row + a * uy + b * ny, s)) {
                throw PreconditionError("straight ribbon does not fit the canvas");
            }
        }
    }

    BitGrid bits(s.canvas_width, s.canvas_height, 0);
    constexpr double eps = 1e-9;
    for (int r = 0; r < s.canvas_height; ++r) {
        for (int col = 0; col < s.canvas_width; ++col) {
            const double dx = col - c.col;
            const double dy = r - c.row;
            const double along = dx * ux + dy * uy;
            const double perp = dx * nx + dy * ny;
            if (std::abs(along) <= half_len + eps && std::abs(perp) <= half_w + eps) {
                bits(r, col) = 1;
            }
        }
    }
    return bits;
}

double wrap_angle(double a) {
    a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
    if (a < 0.0) {
        a += 2.0 * std::numbers::pi;
    }
    return a - std::numbers::pi;
}

BitGrid arc_bits(const RibbonSpec& s, Center c) {
    const double span = s.length / s.radius;
    const bool full = span >= 2.0 * std::numbers::pi;
    const double mid = s.arc_mid_angle * kDeg;
    const double half_w = s.width / 2.0;

    constexpr int kSamples = 2048;
    for (int i = 0; i <= kSamples; ++i) {
        const double phi = full ? 2.0 * std::numbers::pi * i / kSamples : mid - span / 2.0 + span * i / kSamples;
        for (double rho : {s.radius - half_w, s.radius + half_w}) {
            if (!inside_canvas(c.col + rho * std::cos(phi), c.row - rho * std::sin(phi), s)) {
                throw PreconditionError("arc ribbon does not fit the canvas");
            }
        }
    }

    BitGrid bits(s.canvas_width, s.canvas_height, 0);
    constexpr double eps = 1e-9;
    for (int r = 0; r < s.canvas_height; ++r) {
        for (int col = 0; col < s.canvas_width; ++col) {
            const double dx = col - c.col;
            const double dy = c.row - r;
            const double rho = std::hypot(dx, dy);
            if (std::abs(rho - s.radius) > half_w + eps) {
                continue;
            }
            if (!full && std::abs(wrap_angle(std::atan2(dy, dx) - mid)) > span / 2.0 + eps) {
                continue;
            }
            bits(r, col) = 1;
        }
    }
    return bits;
}

} // namespace

SynthRibbon make_ribbon(const RibbonSpec& spec) {
    check_spec(spec);
    const Center c = ribbon_center(spec);
    SynthRibbon out;
    out.mask.class_id = ClassId::sidewalk;
    out.mask.geotransform = Geotransform{0.0, static_cast<double>(spec.canvas_height), 1.0, -1.0, "synthetic"};
    out.truth.width = spec.width;
    if (spec.kind == RibbonKind::straight) {
        out.mask.bits = straight_bits(spec, c);
        double heading = std::fmod(spec.heading, 180.0);
        if (heading < 0.0) {
            heading += 180.0;
        }
        out.truth.angle = heading;
        out.truth.curvature = 0.0;
    } else {
        out.mask.bits = arc_bits(spec, c);
        out.truth.curvature = 1.0 / spec.radius;
    }
    return out;
}

TileRaster ribbon_tile(const SynthRibbon& ribbon, const std::string& tile_id) {
    std::vector<std::uint8_t> labels(ribbon.mask.bits.values().begin(), ribbon.mask.bits.values().end());
    for (auto& v : labels) {
        v = v != 0 ? static_cast<std::uint8_t>(ClassId::sidewalk) : static_cast<std::uint8_t>(ClassId::background);
    }
    return TileRaster(ribbon.mask.width(), ribbon.mask.height(), std::move(labels), ribbon.mask.geotransform,
                      tile_id);
}

void write_fixture(const std::filesystem::path& dir, const std::string& tile_id, const SynthRibbon& ribbon,
                   const RibbonSpec& spec) {
    std::filesystem::create_directories(dir);
    save_tile(ribbon_tile(ribbon, tile_id), dir / (tile_id + ".png"));
    nlohmann::json truth = {
        {"kind", spec.kind == RibbonKind::straight ? "straight" : "arc"},
        {"width", ribbon.truth.width},
        {"angle", ribbon.truth.angle ? nlohmann::json(*ribbon.truth.angle) : nlohmann::json(nullptr)},
        {"curvature", ribbon.truth.curvature},
        {"length", spec.length},
        {"seed", spec.seed},
    };
    if (spec.kind == RibbonKind::straight) {
        truth["heading"] = spec.heading;
    } else {
        truth["radius"] = spec.radius;
    }
    detail::save_json(dir / (tile_id + ".truth.json"), truth);
}

GroundTruth read_truth(const std::filesystem::path& path) {
    const nlohmann::json j = detail::load_json(path);
    GroundTruth t;
    try {
        t.width = j.at("width").get<double>();
        t.curvature = j.at("curvature").get<double>();
        if (j.contains("angle") && !j["angle"].is_null()) {
            t.angle = j["angle"].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return t;
}

} // namespace walkscope
