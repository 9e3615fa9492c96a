#include <walkscope/skeleton.hpp>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <optional>
#include <tuple>

namespace walkscope {

namespace {

// Clockwise from north: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDr = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<int, 8> kDc = {0, 1, 1, 1, 0, -1, -1, -1};

// Working image with a one-pixel background border so neighbour reads never
// leave the buffer.
class PaddedImage {
public:
    explicit PaddedImage(const BitGrid& bits)
        : width_(bits.width() + 2), height_(bits.height() + 2),
          data_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), 0) {
        for (int r = 0; r < bits.height(); ++r) {
            for (int c = 0; c < bits.width(); ++c) {
                data_[idx(r + 1, c + 1)] = bits(r, c) != 0 ? 1 : 0;
            }
        }
        for (int k = 0; k < 8; ++k) {
            offsets_[k] = kDr[k] * width_ + kDc[k];
        }
    }

    std::size_t idx(int r, int c) const noexcept {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c);
    }
    int inner_width() const noexcept { return width_ - 2; }
    int inner_height() const noexcept { return height_ - 2; }

    std::uint8_t& at(std::size_t i) noexcept { return data_[i]; }
    std::uint8_t at(std::size_t i) const noexcept { return data_[i]; }

    std::array<std::uint8_t, 8> ring(std::size_t i) const noexcept {
        std::array<std::uint8_t, 8> n{};
        for (int k = 0; k < 8; ++k) {
            n[k] = data_[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offsets_[k])];
        }
        return n;
    }

    std::ptrdiff_t offset(int k) const noexcept { return offsets_[k]; }

    BitGrid unpad() const {
        BitGrid out(inner_width(), inner_height());
        for (int r = 0; r < inner_height(); ++r) {
            for (int c = 0; c < inner_width(); ++c) {
                out(r, c) = data_[idx(r + 1, c + 1)];
            }
        }
        return out;
    }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
    std::array<std::ptrdiff_t, 8> offsets_{};
};

int degree(const std::array<std::uint8_t, 8>& n) noexcept {
    int b = 0;
    for (auto v : n) {
        b += v;
    }
    return b;
}

// 0 -> 1 transitions around the ring.
int transitions(const std::array<std::uint8_t, 8>& n) noexcept {
    int a = 0;
    for (int k = 0; k < 8; ++k) {
        a += (n[k] == 0 && n[(k + 1) % 8] == 1) ? 1 : 0;
    }
    return a;
}

// Yokoi 8-connectivity number; a set pixel is simple iff it equals 1.
int connectivity8(const std::array<std::uint8_t, 8>& n) noexcept {
    int c = 0;
    for (int k = 0; k < 8; k += 2) {
        const int a = 1 - n[k];
        const int b = 1 - n[(k + 1) % 8];
        const int d = 1 - n[(k + 2) % 8];
        c += a - a * b * d;
    }
    return c;
}

bool removable(const std::array<std::uint8_t, 8>& n) noexcept {
    return degree(n) >= 2 && connectivity8(n) == 1;
}

void zhang_suen(PaddedImage& img) {
    const int h = img.inner_height();
    const int w = img.inner_width();
    std::vector<std::size_t> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int step = 0; step < 2; ++step) {
            marked.clear();
            for (int r = 1; r <= h; ++r) {
                for (int c = 1; c <= w; ++c) {
                    const std::size_t i = img.idx(r, c);
                    if (img.at(i) == 0) {
                        continue;
                    }
                    const auto n = img.ring(i);
                    const int b = degree(n);
                    if (b < 2 || b > 6 || transitions(n) != 1) {
                        continue;
                    }
                    // n: 0=P2(N) 1=P3 2=P4(E) 3=P5 4=P6(S) 5=P7 6=P8(W) 7=P9
                    const bool ok = step == 0 ? (n[0] * n[2] * n[4] == 0 && n[2] * n[4] * n[6] == 0)
                                              : (n[0] * n[2] * n[6] == 0 && n[0] * n[4] * n[6] == 0);
                    if (ok) {
                        marked.push_back(i);
                    }
                }
            }
            // Parallel deletion can erase 2-pixel-thick diagonals and 2x2
            // blocks outright; re-checking simplicity against the current
            // image keeps every component.
            for (std::size_t i : marked) {
                if (removable(img.ring(i))) {
                    img.at(i) = 0;
                    changed = true;
                }
            }
        }
    }
}

// Deletes simple non-end pixels left after thinning (staircase corners, 2x2 blocks).
void remove_redundant(PaddedImage& img) {
    const int h = img.inner_height();
    const int w = img.inner_width();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 1; r <= h; ++r) {
            for (int c = 1; c <= w; ++c) {
                const std::size_t i = img.idx(r, c);
                if (img.at(i) != 0 && removable(img.ring(i))) {
                    img.at(i) = 0;
                    changed = true;
                }
            }
        }
    }
}

class BlockBreaker {
public:
    BlockBreaker(PaddedImage& img, const PaddedImage& source)
        : img_(img), source_(source), stamp_(static_cast<std::size_t>(img.inner_width() + 2) *
                                                 static_cast<std::size_t>(img.inner_height() + 2),
                                             0) {}

    void run() {
        const int h = img_.inner_height();
        const int w = img_.inner_width();
        for (int r = 1; r < h; ++r) {
            for (int c = 1; c < w; ++c) {
                const std::size_t i = img_.idx(r, c);
                if (block_at(i)) {
                    const std::array<std::size_t, 4> corners = {i, i + 1, img_.idx(r + 1, c), img_.idx(r + 1, c) + 1};
                    if (!delete_corner(corners)) {
                        reroute_corner(corners);
                    }
                }
            }
        }
    }

private:
    bool block_at(std::size_t top_left) const {
        const std::size_t below = top_left + static_cast<std::size_t>(img_.offset(4));
        return img_.at(top_left) != 0 && img_.at(top_left + 1) != 0 && img_.at(below) != 0 && img_.at(below + 1) != 0;
    }

    bool touches_block(std::size_t i) const {
        // Top-left corners of the four 2x2 windows that contain i.
        const std::ptrdiff_t up = img_.offset(0);
        const auto base = static_cast<std::ptrdiff_t>(i);
        for (std::ptrdiff_t tl : {base, base - 1, base + up, base + up - 1}) {
            if (block_at(static_cast<std::size_t>(tl))) {
                return true;
            }
        }
        return false;
    }

    std::vector<std::size_t> neighbours(std::size_t i) const {
        std::vector<std::size_t> out;
        for (int k = 0; k < 8; ++k) {
            const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + img_.offset(k));
            if (img_.at(j) != 0) {
                out.push_back(j);
            }
        }
        return out;
    }

    // True when every pixel of `targets` lies in one 8-component of the image.
    bool connected(const std::vector<std::size_t>& targets) {
        if (targets.size() < 2) {
            return true;
        }
        ++epoch_;
        std::size_t remaining = targets.size();
        for (std::size_t t : targets) {
            stamp_[t] = epoch_ | kTarget;
        }
        std::vector<std::size_t> stack{targets.front()};
        stamp_[targets.front()] = epoch_;
        --remaining;
        while (!stack.empty() && remaining > 0) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (int k = 0; k < 8; ++k) {
                const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cur) + img_.offset(k));
                if (img_.at(j) == 0 || stamp_[j] == epoch_) {
                    continue;
                }
                if (stamp_[j] == (epoch_ | kTarget)) {
                    --remaining;
                }
                stamp_[j] = epoch_;
                stack.push_back(j);
            }
        }
        return remaining == 0;
    }

    bool delete_corner(const std::array<std::size_t, 4>& corners) {
        for (std::size_t p : corners) {
            img_.at(p) = 0;
            if (connected(neighbours(p))) {
                return true;
            }
            img_.at(p) = 1;
        }
        return false;
    }

    bool reroute_corner(const std::array<std::size_t, 4>& corners) {
        for (std::size_t p : corners) {
            const std::vector<std::size_t> before = neighbours(p);
            img_.at(p) = 0;
            for (int k = 0; k < 8; ++k) {
                const auto q = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + img_.offset(k));
                if (img_.at(q) != 0 || source_.at(q) == 0 ||
                    std::find(corners.begin(), corners.end(), q) != corners.end()) {
                    continue;
                }
                img_.at(q) = 1;
                std::vector<std::size_t> targets = before;
                targets.push_back(q);
                if (!touches_block(q) && connected(targets)) {
                    return true;
                }
                img_.at(q) = 0;
            }
            img_.at(p) = 1;
        }
        return false;
    }

    static constexpr std::uint32_t kTarget = 0x80000000u;

    PaddedImage& img_;
    const PaddedImage& source_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

void prune_spurs(PaddedImage& img, int prune_length) {
    if (prune_length <= 0) {
        return;
    }
    const int h = img.inner_height();
    const int w = img.inner_width();
    auto deg_at = [&img](std::size_t i) { return degree(img.ring(i)); };

    std::vector<std::size_t> doomed;
    std::vector<std::size_t> chain;
    for (int r = 1; r <= h; ++r) {
        for (int c = 1; c <= w; ++c) {
            const std::size_t start = img.idx(r, c);
            if (img.at(start) == 0 || deg_at(start) != 1) {
                continue;
            }
            chain.assign(1, start);
            std::size_t prev = start;
            std::size_t cur = start;
            bool spur = false;
            while (static_cast<int>(chain.size()) < prune_length) {
                std::size_t next = 0;
                bool found = false;
                for (int k = 0; k < 8; ++k) {
                    const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cur) + img.offset(k));
                    if (img.at(j) != 0 && j != prev && std::find(chain.begin(), chain.end(), j) == chain.end()) {
                        next = j;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    break;
                }
                const int d = deg_at(next);
                if (d >= 3) {
                    spur = true;
                    break;
                }
                if (d != 2) {
                    break;
                }
                chain.push_back(next);
                prev = cur;
                cur = next;
            }
            if (spur) {
                doomed.insert(doomed.end(), chain.begin(), chain.end());
            }
        }
    }
    for (std::size_t i : doomed) {
        img.at(i) = 0;
    }
}

} // namespace

std::size_t Skeleton::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits.values().begin(), bits.values().end(), 1));
}

namespace {

BitGrid rotate_clockwise(const BitGrid& bits) {
    BitGrid out(bits.height(), bits.width());
    for (int r = 0; r < bits.height(); ++r) {
        for (int c = 0; c < bits.width(); ++c) {
            out(c, bits.height() - 1 - r) = bits(r, c);
        }
    }
    return out;
}

BitGrid thin_oriented(const BitGrid& bits, const ThinOptions& options) {
    const PaddedImage source(bits);
    PaddedImage img = source;
    zhang_suen(img);
    remove_redundant(img);
    BlockBreaker(img, source).run();
    remove_redundant(img);
    if (options.prune_length > 0) {
        prune_spurs(img, options.prune_length);
        remove_redundant(img);
    }
    return img.unpad();
}

} // namespace

// Zhang-Suen favours one diagonal, so the mask is thinned in whichever of its
// four quarter-turn orientations sorts first and the result is turned back.
BitGrid thin_bits(const BitGrid& bits, const ThinOptions& options) {
    std::array<BitGrid, 4> turns;
    turns[0] = BitGrid(bits.width(), bits.height());
    std::transform(bits.values().begin(), bits.values().end(), turns[0].values().begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v != 0 ? 1 : 0); });
    for (int k = 1; k < 4; ++k) {
        turns[k] = rotate_clockwise(turns[k - 1]);
    }
    auto key = [](const BitGrid& g) {
        return std::tuple<int, int, const std::vector<std::uint8_t>&>(g.width(), g.height(), g.storage());
    };
    int best = 0;
    for (int k = 1; k < 4; ++k) {
        if (key(turns[k]) < key(turns[best])) {
            best = k;
        }
    }
    BitGrid out = thin_oriented(turns[best], options);
    for (int k = best; k % 4 != 0; ++k) {
        out = rotate_clockwise(out);
    }
    return out;
}

Skeleton thin(const ClassMask& mask, const ThinOptions& options) {
    return Skeleton{thin_bits(mask.bits, options), mask.class_id};
}

int neighbor_count(const BitGrid& bits, int row, int col) noexcept {
    int n = 0;
    for (int k = 0; k < 8; ++k) {
        const int r = row + kDr[k];
        const int c = col + kDc[k];
        if (bits.contains(r, c) && bits(r, c) != 0) {
            ++n;
        }
    }
    return n;
}

bool is_junction(const BitGrid& bits, int row, int col) noexcept {
    return neighbor_count(bits, row, col) >= 3;
}

std::vector<SkeletonPath> trace_paths(const BitGrid& bits) {
    const int h = bits.height();
    const int w = bits.width();
    Grid<int> deg(w, h, 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (bits(r, c) != 0) {
                deg(r, c) = neighbor_count(bits, r, c);
            }
        }
    }
    auto set = [&bits](int r, int c) { return bits.contains(r, c) && bits(r, c) != 0; };
    auto junction = [&deg](PixelCoord p) { return deg[p] >= 3; };

    BitGrid visited(w, h, 0);
    BitGrid junction_used(w, h, 0);
    std::vector<SkeletonPath> paths;

    // Extends `path` from its last point until an end, a junction, or a visited pixel.
    auto walk = [&](SkeletonPath& path) {
        while (true) {
            const PixelCoord cur = path.points.back();
            const PixelCoord prev = path.points.size() >= 2 ? path.points[path.points.size() - 2] : cur;
            std::optional<PixelCoord> step;
            std::optional<PixelCoord> stop;
            for (int k = 0; k < 8; ++k) {
                const PixelCoord q{cur.row + kDr[k], cur.col + kDc[k]};
                if (!set(q.row, q.col) || q == prev) {
                    continue;
                }
                if (junction(q)) {
                    const bool back_to_start = path.points.size() <= 2 && q == path.points.front();
                    if (!stop && !back_to_start) {
                        stop = q;
                    }
                } else if (visited[q] == 0 && !step) {
                    step = q;
                }
            }
            if (step) {
                visited[*step] = 1;
                path.points.push_back(*step);
                continue;
            }
            if (stop) {
                junction_used[*stop] = 1;
                path.points.push_back(*stop);
            }
            return;
        }
    };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (bits(r, c) != 0 && deg(r, c) == 1 && visited(r, c) == 0) {
                SkeletonPath path;
                path.points.push_back({r, c});
                visited(r, c) = 1;
                walk(path);
                paths.push_back(std::move(path));
            }
        }
    }

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (bits(r, c) == 0 || deg(r, c) < 3) {
                continue;
            }
            for (int k = 0; k < 8; ++k) {
                const PixelCoord q{r + kDr[k], c + kDc[k]};
                if (!set(q.row, q.col) || junction(q) || visited[q] != 0) {
                    continue;
                }
                SkeletonPath path;
                path.points = {{r, c}, q};
                visited[q] = 1;
                junction_used(r, c) = 1;
                walk(path);
                paths.push_back(std::move(path));
            }
        }
    }

    // Whatever is left is isolated pixels and pure cycles.
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (bits(r, c) == 0 || visited(r, c) != 0 || deg(r, c) >= 3) {
                continue;
            }
            SkeletonPath path;
            path.points.push_back({r, c});
            visited(r, c) = 1;
            walk(path);
            if (path.points.size() >= 3) {
                const PixelCoord a = path.points.front();
                const PixelCoord b = path.points.back();
                path.closed = std::abs(a.row - b.row) <= 1 && std::abs(a.col - b.col) <= 1;
            }
            paths.push_back(std::move(path));
        }
    }

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (bits(r, c) != 0 && deg(r, c) >= 3 && junction_used(r, c) == 0) {
                paths.push_back(SkeletonPath{{{r, c}}, false});
            }
        }
    }
    return paths;
}

std::vector<SkeletonPath> trace_paths(const Skeleton& skeleton) {
    return trace_paths(skeleton.bits);
}

} // namespace walkscope
