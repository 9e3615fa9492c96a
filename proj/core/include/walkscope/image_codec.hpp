#pragma once

#include <walkscope/grid.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace walkscope {

/// 8-bit grayscale image as stored on disk.
using GrayImage = Grid<std::uint8_t>;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Grid<Rgb>;

/// Detects PNG or binary PGM (P5) by magic bytes. Rejects colour, alpha and 16-bit input.
GrayImage read_gray_image(const std::filesystem::path& path);

/// Format chosen by extension: ".pgm" writes P5, anything else writes PNG.
void write_gray_image(const std::filesystem::path& path, const GrayImage& image);

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_rgb_png(const std::filesystem::path& path);

} // namespace walkscope
