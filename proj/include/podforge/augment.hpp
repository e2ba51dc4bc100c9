#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "podforge/annotations.hpp"
#include "podforge/error.hpp"
#include "podforge/image.hpp"
#include "podforge/rle.hpp"

namespace podforge {

enum class AugmentOp { FlipUd, Rotate, Brightness, GaussianBlur, Resize };

struct AugmentSpec {
    AugmentOp op = AugmentOp::FlipUd;
    double rotation_deg = 0;     // multiple of 90
    double brightness = 1.0;     // > 0
    double blur_sigma = 0;       // >= 0
    int target_long_side = 0;    // resize only

    static AugmentSpec flip_ud() { return {AugmentOp::FlipUd}; }
    static AugmentSpec rotate(double deg) { return {AugmentOp::Rotate, deg}; }
    static AugmentSpec brightness_of(double f) { return {AugmentOp::Brightness, 0, f}; }
    static AugmentSpec gaussian_blur(double sigma) { return {AugmentOp::GaussianBlur, 0, 1.0, sigma}; }
    static AugmentSpec resize_to(int long_side) { return {AugmentOp::Resize, 0, 1.0, 0, long_side}; }
};

inline const char* augment_op_name(AugmentOp op) {
    switch (op) {
        case AugmentOp::FlipUd: return "flip_ud";
        case AugmentOp::Rotate: return "rotate";
        case AugmentOp::Brightness: return "brightness";
        case AugmentOp::GaussianBlur: return "gaussian_blur";
        case AugmentOp::Resize: return "resize";
    }
    return "?";
}

namespace detail {

inline Image flip_ud_image(const Image& img) {
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        std::memcpy(out.px(0, img.height - 1 - y), img.px(0, y),
                    static_cast<std::size_t>(img.width) * img.channels);
    return out;
}

// 90 degrees clockwise: (x, y) -> (H-1-y, x), dims swap.
inline Image rot90cw_image(const Image& img) {
    Image out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            std::memcpy(out.px(img.height - 1 - y, x), img.px(x, y), img.channels);
    return out;
}

inline std::vector<std::uint8_t> flip_ud_bits(const std::vector<std::uint8_t>& bits, int w, int h) {
    std::vector<std::uint8_t> out(bits.size());
    for (int y = 0; y < h; ++y)
        std::memcpy(&out[static_cast<std::size_t>(h - 1 - y) * w],
                    &bits[static_cast<std::size_t>(y) * w], w);
    return out;
}

inline std::vector<std::uint8_t> rot90cw_bits(const std::vector<std::uint8_t>& bits, int w, int h) {
    std::vector<std::uint8_t> out(bits.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out[static_cast<std::size_t>(x) * h + (h - 1 - y)] =
                bits[static_cast<std::size_t>(y) * w + x];
    return out;
}

inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable blur, replicate-edge boundary.
inline Image gaussian_blur_image(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);

    std::vector<double> tmp(img.data.size());
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0;
                for (int i = -radius; i <= radius; ++i) {
                    const int sx = std::clamp(x + i, 0, img.width - 1);
                    acc += kernel[i + radius] * img.px(sx, y)[c];
                }
                tmp[(static_cast<std::size_t>(y) * img.width + x) * img.channels + c] = acc;
            }
        }
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0;
                for (int i = -radius; i <= radius; ++i) {
                    const int sy = std::clamp(y + i, 0, img.height - 1);
                    acc += kernel[i + radius] *
                           tmp[(static_cast<std::size_t>(sy) * img.width + x) * img.channels + c];
                }
                out.px(x, y)[c] =
                    static_cast<std::uint8_t>(std::lround(std::clamp(acc, 0.0, 255.0)));
            }
        }
    }
    return out;
}

inline Image resize_bilinear(const Image& img, int new_w, int new_h) {
    Image out(new_w, new_h, img.channels);
    const double fx = static_cast<double>(img.width) / new_w;
    const double fy = static_cast<double>(img.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        for (int x = 0; x < new_w; ++x) {
            const double sx = (x + 0.5) * fx - 0.5;
            const double sy = (y + 0.5) * fy - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, img.width - 1);
            const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, img.height - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const double wx = std::clamp(sx - x0, 0.0, 1.0);
            const double wy = std::clamp(sy - y0, 0.0, 1.0);
            for (int c = 0; c < img.channels; ++c) {
                const double v = (1 - wx) * (1 - wy) * img.px(x0, y0)[c] +
                                 wx * (1 - wy) * img.px(x1, y0)[c] +
                                 (1 - wx) * wy * img.px(x0, y1)[c] +
                                 wx * wy * img.px(x1, y1)[c];
                out.px(x, y)[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    return out;
}

inline std::vector<std::uint8_t> resize_nearest_bits(const std::vector<std::uint8_t>& bits,
                                                     int w, int h, int new_w, int new_h) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(new_w) * new_h);
    const double fx = static_cast<double>(w) / new_w;
    const double fy = static_cast<double>(h) / new_h;
    for (int y = 0; y < new_h; ++y) {
        for (int x = 0; x < new_w; ++x) {
            const int sx = std::min(static_cast<int>((x + 0.5) * fx), w - 1);
            const int sy = std::min(static_cast<int>((y + 0.5) * fy), h - 1);
            out[static_cast<std::size_t>(y) * new_w + x] =
                bits[static_cast<std::size_t>(sy) * w + sx];
        }
    }
    return out;
}

inline void recompute_geometry(InstanceAnnotation& ann) {
    ann.area = rle_area(ann.segmentation);
    const RectI b = rle_bbox(ann.segmentation);
    ann.bbox = {double(b.x), double(b.y), double(b.w), double(b.h)};
}

}  // namespace detail

// Aspect-preserving downscale to a target long side. Masks are resampled
// nearest-neighbor; bbox coordinates scale by the common factor.
inline std::pair<Image, std::vector<InstanceAnnotation>> resize(
    const Image& image, std::vector<InstanceAnnotation> annotations, int target_long_side) {
    const int long_side = std::max(image.width, image.height);
    if (target_long_side > long_side)
        throw InvalidArgument("resize: upscaling not supported");
    if (target_long_side <= 0) throw InvalidArgument("resize: target must be positive");
    if (target_long_side == long_side) return {image, std::move(annotations)};

    const double factor = static_cast<double>(target_long_side) / long_side;
    const int new_w = image.width == long_side
                          ? target_long_side
                          : static_cast<int>(std::lround(image.width * factor));
    const int new_h = image.height == long_side
                          ? target_long_side
                          : static_cast<int>(std::lround(image.height * factor));

    Image out = detail::resize_bilinear(image, new_w, new_h);
    for (InstanceAnnotation& ann : annotations) {
        if (!ann.segmentation.counts.empty()) {
            const auto bits = rle_decode(ann.segmentation);
            ann.segmentation = rle_encode(
                detail::resize_nearest_bits(bits, image.width, image.height, new_w, new_h),
                new_w, new_h);
            ann.area = rle_area(ann.segmentation);
        }
        ann.bbox = {ann.bbox.x * factor, ann.bbox.y * factor, ann.bbox.w * factor,
                    ann.bbox.h * factor};
    }
    return {std::move(out), std::move(annotations)};
}

// Applies one augmentation to image and annotations together. Geometric ops
// transform masks and bboxes exactly; photometric ops leave annotations alone.
inline std::pair<Image, std::vector<InstanceAnnotation>> apply(
    const AugmentSpec& spec, const Image& image, std::vector<InstanceAnnotation> annotations) {
    switch (spec.op) {
        case AugmentOp::FlipUd: {
            Image out = detail::flip_ud_image(image);
            for (InstanceAnnotation& ann : annotations) {
                if (!ann.segmentation.counts.empty()) {
                    ann.segmentation = rle_encode(
                        detail::flip_ud_bits(rle_decode(ann.segmentation), image.width,
                                             image.height),
                        image.width, image.height);
                    detail::recompute_geometry(ann);
                } else {
                    ann.bbox.y = image.height - ann.bbox.y - ann.bbox.h;
                }
            }
            return {std::move(out), std::move(annotations)};
        }
        case AugmentOp::Rotate: {
            const double deg = std::fmod(std::fmod(spec.rotation_deg, 360.0) + 360.0, 360.0);
            const int quarter = static_cast<int>(deg / 90.0);
            if (deg != quarter * 90.0)
                throw InvalidArgument("rotate: angle must be a multiple of 90 degrees");
            Image out = image;
            int w = image.width, h = image.height;
            std::vector<std::vector<std::uint8_t>> bits;
            bits.reserve(annotations.size());
            for (const auto& ann : annotations)
                bits.push_back(ann.segmentation.counts.empty()
                                   ? std::vector<std::uint8_t>{}
                                   : rle_decode(ann.segmentation));
            for (int k = 0; k < quarter; ++k) {
                out = detail::rot90cw_image(out);
                for (auto& b : bits)
                    if (!b.empty()) b = detail::rot90cw_bits(b, w, h);
                std::swap(w, h);
            }
            for (std::size_t i = 0; i < annotations.size(); ++i) {
                if (!bits[i].empty()) {
                    annotations[i].segmentation = rle_encode(bits[i], w, h);
                    detail::recompute_geometry(annotations[i]);
                }
            }
            return {std::move(out), std::move(annotations)};
        }
        case AugmentOp::Brightness: {
            if (spec.brightness <= 0.0)
                throw InvalidArgument("brightness: factor must be > 0");
            Image out = image;
            for (std::uint8_t& v : out.data)
                v = static_cast<std::uint8_t>(
                    std::lround(std::clamp(v * spec.brightness, 0.0, 255.0)));
            return {std::move(out), std::move(annotations)};
        }
        case AugmentOp::GaussianBlur: {
            if (spec.blur_sigma < 0.0) throw InvalidArgument("blur: sigma must be >= 0");
            return {detail::gaussian_blur_image(image, spec.blur_sigma), std::move(annotations)};
        }
        case AugmentOp::Resize:
            return resize(image, std::move(annotations), spec.target_long_side);
    }
    throw InvalidArgument("unknown augment op");
}

}  // namespace podforge
