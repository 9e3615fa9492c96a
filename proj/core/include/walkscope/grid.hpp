#pragma once

#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace walkscope {

/// Integer pixel index; row grows downward, col grows rightward.
struct PixelCoord {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// Dense row-major 2-D array.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
        assert(width >= 0 && height >= 0);
    }
    Grid(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        assert(data_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int row, int col) const noexcept {
        return row >= 0 && col >= 0 && row < height_ && col < width_;
    }
    bool contains(PixelCoord p) const noexcept { return contains(p.row, p.col); }

    T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
    const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
    T& operator[](PixelCoord p) noexcept { return data_[index(p.row, p.col)]; }
    const T& operator[](PixelCoord p) const noexcept { return data_[index(p.row, p.col)]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        assert(contains(row, col));
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Binary image; 1 = set, 0 = clear.
using BitGrid = Grid<std::uint8_t>;

} // namespace walkscope
