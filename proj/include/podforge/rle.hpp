#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "podforge/error.hpp"
#include "podforge/image.hpp"

namespace podforge {

// Run-length encoded binary mask, column-major (pixel order x*height + y),
// counts alternate background/foreground starting with background. Counts
// always sum to width*height.
struct Rle {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> counts;

    bool operator==(const Rle&) const = default;
};

// `mask` is row-major, one byte per pixel, nonzero = foreground.
inline Rle rle_encode(const std::vector<std::uint8_t>& mask, int width, int height) {
    if (static_cast<std::size_t>(width) * height != mask.size())
        throw InvalidArgument("mask size does not match dimensions");
    Rle rle{width, height, {}};
    std::uint32_t run = 0;
    bool fg = false;  // counts start with a background run (possibly zero)
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            const bool v = mask[static_cast<std::size_t>(y) * width + x] != 0;
            if (v == fg) {
                ++run;
            } else {
                rle.counts.push_back(run);
                run = 1;
                fg = v;
            }
        }
    }
    rle.counts.push_back(run);
    return rle;
}

// Builds an RLE from strictly increasing column-major linear positions.
inline Rle rle_from_sorted_positions(const std::vector<std::uint32_t>& positions, int width,
                                     int height) {
    const std::uint64_t total = static_cast<std::uint64_t>(width) * height;
    Rle rle{width, height, {}};
    std::uint64_t cursor = 0;
    std::size_t i = 0;
    while (i < positions.size()) {
        std::size_t j = i + 1;
        while (j < positions.size() && positions[j] == positions[j - 1] + 1) ++j;
        rle.counts.push_back(static_cast<std::uint32_t>(positions[i] - cursor));
        rle.counts.push_back(static_cast<std::uint32_t>(j - i));
        cursor = positions[j - 1] + 1;
        i = j;
    }
    if (rle.counts.empty() || cursor < total)
        rle.counts.push_back(static_cast<std::uint32_t>(total - cursor));
    return rle;
}

inline std::vector<std::uint8_t> rle_decode(const Rle& rle) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(rle.width) * rle.height, 0);
    std::size_t pos = 0;
    bool fg = false;
    for (std::uint32_t c : rle.counts) {
        if (fg) {
            for (std::uint32_t k = 0; k < c; ++k) {
                const std::size_t p = pos + k;
                const int x = static_cast<int>(p / rle.height);
                const int y = static_cast<int>(p % rle.height);
                mask[static_cast<std::size_t>(y) * rle.width + x] = 1;
            }
        }
        pos += c;
        fg = !fg;
    }
    if (pos != static_cast<std::size_t>(rle.width) * rle.height)
        throw InvalidArgument("RLE counts do not sum to width*height");
    return mask;
}

inline std::uint64_t rle_area(const Rle& rle) {
    std::uint64_t area = 0;
    for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
    return area;
}

// Tight bbox of the foreground, derived from the runs directly.
inline RectI rle_bbox(const Rle& rle) {
    int minx = rle.width, miny = rle.height, maxx = -1, maxy = -1;
    std::uint64_t pos = 0;
    bool fg = false;
    for (std::uint32_t c : rle.counts) {
        if (fg && c > 0) {
            for (std::uint64_t p = pos; p < pos + c;) {
                const int x = static_cast<int>(p / rle.height);
                const int y0 = static_cast<int>(p % rle.height);
                const std::uint64_t col_end = (p / rle.height + 1) * rle.height;
                const std::uint64_t seg_end = std::min<std::uint64_t>(pos + c, col_end);
                const int y1 = static_cast<int>((seg_end - 1) % rle.height);
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y0);
                maxy = std::max(maxy, y1);
                p = seg_end;
            }
        }
        pos += c;
        fg = !fg;
    }
    if (maxx < 0) return {0, 0, 0, 0};
    return {minx, miny, maxx - minx + 1, maxy - miny + 1};
}

namespace detail {
// Foreground runs as half-open [start, end) spans in column-major linear order.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> fg_spans(const Rle& rle) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    std::uint64_t pos = 0;
    bool fg = false;
    for (std::uint32_t c : rle.counts) {
        if (fg && c > 0) spans.emplace_back(pos, pos + c);
        pos += c;
        fg = !fg;
    }
    return spans;
}
}  // namespace detail

// IoU computed on the runs without decoding; exact.
inline double rle_iou(const Rle& a, const Rle& b) {
    if (a.width != b.width || a.height != b.height)
        throw InvalidArgument("rle_iou: dimension mismatch");
    const auto sa = detail::fg_spans(a);
    const auto sb = detail::fg_spans(b);
    std::uint64_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const auto lo = std::max(sa[i].first, sb[j].first);
        const auto hi = std::min(sa[i].second, sb[j].second);
        if (hi > lo) inter += hi - lo;
        if (sa[i].second < sb[j].second) ++i; else ++j;
    }
    const std::uint64_t uni = rle_area(a) + rle_area(b) - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace podforge
