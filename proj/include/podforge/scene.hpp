#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "podforge/asset_pool.hpp"
#include "podforge/error.hpp"
#include "podforge/image.hpp"
#include "podforge/rle.hpp"
#include "podforge/rng.hpp"

namespace podforge {

struct GenerationConfig {
    int canvas_w = 1024;
    int canvas_h = 1024;
    double overlap_coefficient = 0.1;  // smaller -> denser packing
    double scale_lo = 0.8;
    double scale_hi = 1.2;
    double rotation_lo_deg = 0.0;
    double rotation_hi_deg = 360.0;
    int max_attempts = 5000;
    int max_consecutive_rejections = 200;
    double min_visible_fraction = 0.25;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (canvas_w <= 0 || canvas_h <= 0) throw InvalidArgument("canvas must be positive");
        if (!(overlap_coefficient > 0.0 && overlap_coefficient <= 1.0))
            throw InvalidArgument("overlap_coefficient must be in (0, 1]");
        if (!(scale_lo > 0.0 && scale_lo <= scale_hi))
            throw InvalidArgument("scale range must satisfy 0 < lo <= hi");
        if (max_attempts < 0) throw InvalidArgument("max_attempts must be >= 0");
        if (max_consecutive_rejections < 1)
            throw InvalidArgument("max_consecutive_rejections must be >= 1");
        if (min_visible_fraction < 0.0 || min_visible_fraction > 1.0)
            throw InvalidArgument("min_visible_fraction must be in [0, 1]");
    }
};

struct Placement {
    std::string pod_id;
    double center_x = 0;
    double center_y = 0;
    double rotation_deg = 0;
    double scale = 1;
    int z_index = 0;        // paste order; later occludes earlier
    Rect placed_bbox;       // AABB of the transformed tight bbox on canvas
};

struct SceneInstance {
    int instance_id = 0;
    Placement placement;
    Rle visible_pixels;
    RectI visible_bbox;
    std::uint64_t amodal_area = 0;  // on-canvas object pixels before occlusion
    Color mask_color;
};

struct Scene {
    Image image;  // RGB composite
    Image mask;   // RGB, black background, one color per surviving instance
    std::vector<SceneInstance> instances;
    GenerationConfig config_snapshot;
    int scene_index = 0;
};

// Bijective id -> color mapping; id+1 packed big-endian into (r,g,b), never black.
inline Color mask_color(int instance_id) {
    if (instance_id < 0 || instance_id >= (1 << 24) - 1)
        throw InvalidArgument("instance_id out of 24-bit palette range");
    const std::uint32_t v = static_cast<std::uint32_t>(instance_id) + 1;
    return {static_cast<std::uint8_t>((v >> 16) & 255),
            static_cast<std::uint8_t>((v >> 8) & 255),
            static_cast<std::uint8_t>(v & 255)};
}

// Dynamic minimum center distance between two placed pods: c * (w_i + w_j) / 2
// with post-scale bounding-box widths.
inline double placement_threshold(double w_i, double w_j, double coefficient) {
    if (w_i <= 0.0 || w_j <= 0.0) throw InvalidArgument("widths must be positive");
    if (!(coefficient > 0.0 && coefficient <= 1.0))
        throw InvalidArgument("coefficient must be in (0, 1]");
    return coefficient * (w_i + w_j) / 2.0;
}

// Accepts iff the center is strictly in-canvas and every prior placement is at
// least the dynamic threshold away (boundary inclusive).
inline bool accept_placement(const Placement& candidate, const std::vector<Placement>& placed,
                             const GenerationConfig& config) {
    if (!(candidate.center_x > 0.0 && candidate.center_x < config.canvas_w &&
          candidate.center_y > 0.0 && candidate.center_y < config.canvas_h))
        return false;
    for (const Placement& p : placed) {
        const double dx = candidate.center_x - p.center_x;
        const double dy = candidate.center_y - p.center_y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < placement_threshold(candidate.placed_bbox.w, p.placed_bbox.w,
                                       config.overlap_coefficient))
            return false;
    }
    return true;
}

struct Transform {
    double rotation_deg = 0;
    double scale = 1;
    double center_x = 0;
    double center_y = 0;
};

// Exactly three u64 draws in the fixed order rotation -> scale -> center (the
// center draw is split into two 32-bit halves), so replay is deterministic
// regardless of acceptance outcomes.
inline Transform sample_transform(Rng& rng, const GenerationConfig& config) {
    Transform t;
    t.rotation_deg = config.rotation_lo_deg +
                     rng.next_double() * (config.rotation_hi_deg - config.rotation_lo_deg);
    t.scale = config.scale_lo + rng.next_double() * (config.scale_hi - config.scale_lo);
    const std::uint64_t c = rng.next_u64();
    t.center_x = static_cast<double>(c >> 32) * 0x1.0p-32 * config.canvas_w;
    t.center_y = static_cast<double>(c & 0xffffffffULL) * 0x1.0p-32 * config.canvas_h;
    return t;
}

namespace detail {

// AABB of the pod's tight bbox corners under rotation+scale about the anchor,
// translated to the candidate center.
inline Rect placed_bbox_of(const PodAsset& pod, const Transform& t) {
    const double rad = t.rotation_deg * 3.14159265358979323846 / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    const RectI bb = pod.tight_bbox;
    const double xs[2] = {bb.x - pod.anchor_x, bb.x + bb.w - pod.anchor_x};
    const double ys[2] = {bb.y - pod.anchor_y, bb.y + bb.h - pod.anchor_y};
    double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
    for (double px : xs) {
        for (double py : ys) {
            const double rx = t.scale * (c * px - s * py) + t.center_x;
            const double ry = t.scale * (s * px + c * py) + t.center_y;
            minx = std::min(minx, rx);
            maxx = std::max(maxx, rx);
            miny = std::min(miny, ry);
            maxy = std::max(maxy, ry);
        }
    }
    return {minx, miny, maxx - minx, maxy - miny};
}

inline std::uint8_t bilinear(const Image& img, double x, double y, int channel) {
    const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, img.width - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    const double v = (1 - fx) * (1 - fy) * img.px(x0, y0)[channel] +
                     fx * (1 - fy) * img.px(x1, y0)[channel] +
                     (1 - fx) * fy * img.px(x0, y1)[channel] +
                     fx * fy * img.px(x1, y1)[channel];
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace detail

// Algorithm: pick a background, then repeatedly draw (pod, transform) candidates
// and keep those passing accept_placement, until the attempt budget or the
// consecutive-rejection cap is hit. Accepted pods are pasted in z-order; the
// ground-truth mask records visible regions only. Pure function of
// (config, pools, scene_index).
inline Scene compose_scene(const GenerationConfig& config, const PodPool& pods,
                           const BackgroundPool& backgrounds, int scene_index) {
    config.validate();
    if (pods.assets.empty()) throw PoolEmpty("pod pool");
    if (backgrounds.assets.empty()) throw PoolEmpty("background pool");

    Rng rng = derive_scene_rng(config.master_seed, static_cast<std::uint64_t>(scene_index));

    Scene scene;
    scene.config_snapshot = config;
    scene.scene_index = scene_index;
    scene.image = backgrounds.assets[rng.next_index(backgrounds.assets.size())].pixels;
    scene.mask = Image(config.canvas_w, config.canvas_h, 3, 0);

    // Rejection-sampled placement loop. Rejected candidates still consume their
    // RNG draws, so the stream position depends only on the attempt count.
    std::vector<Placement> placed;
    std::vector<std::size_t> placed_pod;  // pool index per placement
    int attempts = 0, consecutive_rejections = 0;
    while (attempts < config.max_attempts &&
           consecutive_rejections < config.max_consecutive_rejections) {
        ++attempts;
        const std::size_t pod_idx = rng.next_index(pods.assets.size());
        const PodAsset& pod = pods.assets[pod_idx];
        const Transform t = sample_transform(rng, config);

        Placement cand;
        cand.pod_id = pod.id;
        cand.center_x = t.center_x;
        cand.center_y = t.center_y;
        cand.rotation_deg = t.rotation_deg;
        cand.scale = t.scale;
        cand.z_index = static_cast<int>(placed.size());
        cand.placed_bbox = detail::placed_bbox_of(pod, t);

        if (accept_placement(cand, placed, config)) {
            placed.push_back(cand);
            placed_pod.push_back(pod_idx);
            consecutive_rejections = 0;
        } else {
            ++consecutive_rejections;
        }
    }

    // Paste in z-order into an instance-id map; later pods overwrite earlier.
    std::vector<std::int32_t> idmap(
        static_cast<std::size_t>(config.canvas_w) * config.canvas_h, -1);
    std::vector<std::uint64_t> amodal(placed.size(), 0);

    for (std::size_t i = 0; i < placed.size(); ++i) {
        const Placement& p = placed[i];
        const PodAsset& pod = pods.assets[placed_pod[i]];
        const double rad = -p.rotation_deg * 3.14159265358979323846 / 180.0;  // inverse
        const double c = std::cos(rad), s = std::sin(rad);
        const double inv_scale = 1.0 / p.scale;

        const int x0 = std::max(0, static_cast<int>(std::floor(p.placed_bbox.x)) - 1);
        const int y0 = std::max(0, static_cast<int>(std::floor(p.placed_bbox.y)) - 1);
        const int x1 = std::min(config.canvas_w - 1,
                                static_cast<int>(std::ceil(p.placed_bbox.x + p.placed_bbox.w)) + 1);
        const int y1 = std::min(config.canvas_h - 1,
                                static_cast<int>(std::ceil(p.placed_bbox.y + p.placed_bbox.h)) + 1);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = (x + 0.5) - p.center_x;
                const double dy = (y + 0.5) - p.center_y;
                const double sx = pod.anchor_x + inv_scale * (c * dx - s * dy);
                const double sy = pod.anchor_y + inv_scale * (s * dx + c * dy);
                // nearest-neighbor alpha keeps the mask binary
                const int nx = static_cast<int>(std::lround(sx - 0.5));
                const int ny = static_cast<int>(std::lround(sy - 0.5));
                if (!pod.pixels.in_bounds(nx, ny) || pod.pixels.px(nx, ny)[3] == 0) continue;
                ++amodal[i];
                idmap[static_cast<std::size_t>(y) * config.canvas_w + x] =
                    static_cast<std::int32_t>(i);
                std::uint8_t* dst = scene.image.px(x, y);
                dst[0] = detail::bilinear(pod.pixels, sx - 0.5, sy - 0.5, 0);
                dst[1] = detail::bilinear(pod.pixels, sx - 0.5, sy - 0.5, 1);
                dst[2] = detail::bilinear(pod.pixels, sx - 0.5, sy - 0.5, 2);
            }
        }
    }

    // Visible pixel counts, then the visibility filter: nearly buried pods stay
    // in the image but get no annotation and no mask color.
    std::vector<std::uint64_t> visible(placed.size(), 0);
    for (std::int32_t id : idmap)
        if (id >= 0) ++visible[static_cast<std::size_t>(id)];

    std::vector<bool> survives(placed.size(), false);
    for (std::size_t i = 0; i < placed.size(); ++i)
        survives[i] = amodal[i] > 0 &&
                      static_cast<double>(visible[i]) >=
                          config.min_visible_fraction * static_cast<double>(amodal[i]);

    // Single column-major pass: mask colors for survivors plus per-instance
    // sorted pixel positions for the RLEs.
    std::vector<std::vector<std::uint32_t>> positions(placed.size());
    for (int x = 0; x < config.canvas_w; ++x) {
        for (int y = 0; y < config.canvas_h; ++y) {
            const std::int32_t id = idmap[static_cast<std::size_t>(y) * config.canvas_w + x];
            if (id < 0 || !survives[static_cast<std::size_t>(id)]) continue;
            positions[static_cast<std::size_t>(id)].push_back(
                static_cast<std::uint32_t>(x) * config.canvas_h + y);
            const Color col = mask_color(id);
            std::uint8_t* m = scene.mask.px(x, y);
            m[0] = col.r;
            m[1] = col.g;
            m[2] = col.b;
        }
    }

    for (std::size_t i = 0; i < placed.size(); ++i) {
        if (!survives[i]) continue;
        SceneInstance inst;
        inst.instance_id = static_cast<int>(i);
        inst.placement = placed[i];
        inst.amodal_area = amodal[i];
        inst.mask_color = mask_color(inst.instance_id);
        inst.visible_pixels =
            rle_from_sorted_positions(positions[i], config.canvas_w, config.canvas_h);
        inst.visible_bbox = rle_bbox(inst.visible_pixels);
        scene.instances.push_back(std::move(inst));
    }
    return scene;
}

// Inspection image: visible regions tinted at 50% opacity, visible bboxes outlined.
inline Image render_overlay(const Image& base, const std::vector<SceneInstance>& instances) {
    Image out = base;
    for (const SceneInstance& inst : instances) {
        const auto bits = rle_decode(inst.visible_pixels);
        for (int y = 0; y < out.height; ++y) {
            for (int x = 0; x < out.width; ++x) {
                if (!bits[static_cast<std::size_t>(y) * out.width + x]) continue;
                std::uint8_t* p = out.px(x, y);
                p[0] = static_cast<std::uint8_t>((p[0] + inst.mask_color.r) / 2);
                p[1] = static_cast<std::uint8_t>((p[1] + inst.mask_color.g) / 2);
                p[2] = static_cast<std::uint8_t>((p[2] + inst.mask_color.b) / 2);
            }
        }
        const RectI b = inst.visible_bbox;
        auto outline = [&](int x, int y) {
            if (!out.in_bounds(x, y)) return;
            std::uint8_t* p = out.px(x, y);
            p[0] = inst.mask_color.r;
            p[1] = inst.mask_color.g;
            p[2] = inst.mask_color.b;
        };
        for (int x = b.x; x < b.x + b.w; ++x) {
            outline(x, b.y);
            outline(x, b.y + b.h - 1);
        }
        for (int y = b.y; y < b.y + b.h; ++y) {
            outline(b.x, y);
            outline(b.x + b.w - 1, y);
        }
    }
    return out;
}

inline Image render_overlay(const Scene& scene) {
    return render_overlay(scene.image, scene.instances);
}

}  // namespace podforge
