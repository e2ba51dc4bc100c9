#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#include "podforge/error.hpp"

namespace podforge {

// Interleaved 8-bit image, 3 (RGB) or 4 (RGBA) channels, row-major.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    std::uint8_t* px(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }
    const std::uint8_t* px(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels &&
               data == o.data;
    }
};

struct Rect {
    double x = 0, y = 0, w = 0, h = 0;
    bool operator==(const Rect&) const = default;
};

struct RectI {
    int x = 0, y = 0, w = 0, h = 0;
    bool operator==(const RectI&) const = default;
};

struct Color {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Color&) const = default;
};

// Tight bounding box of pixels with alpha > 0. Throws if the mask is empty.
inline RectI tight_alpha_bbox(const Image& img) {
    if (img.channels != 4) throw InvalidArgument("tight_alpha_bbox needs RGBA");
    int minx = img.width, miny = img.height, maxx = -1, maxy = -1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.px(x, y)[3] > 0) {
                minx = std::min(minx, x);
                miny = std::min(miny, y);
                maxx = std::max(maxx, x);
                maxy = std::max(maxy, y);
            }
        }
    }
    if (maxx < 0) throw InvalidArgument("alpha mask is empty");
    return {minx, miny, maxx - minx + 1, maxy - miny + 1};
}

}  // namespace podforge
