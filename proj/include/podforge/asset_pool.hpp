#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "podforge/error.hpp"
#include "podforge/image.hpp"
#include "podforge/png_io.hpp"

namespace podforge {

// Cut-out object with a binary alpha mask. Alpha is binarized at load
// (>= 128 -> 255, else 0) so soft-matted edges become crisp annotations.
struct PodAsset {
    std::string id;
    std::string cultivar;  // optional label from pool.json
    Image pixels;          // RGBA, zero-padded square canvas
    RectI tight_bbox;      // bounds the nonzero-alpha region exactly
    double anchor_x = 0;   // center of tight_bbox
    double anchor_y = 0;
};

struct BackgroundAsset {
    std::string id;
    Image pixels;  // RGB, canvas-sized
};

struct PodPool {
    std::vector<PodAsset> assets;
};

struct BackgroundPool {
    std::vector<BackgroundAsset> assets;
};

// Re-canvases the asset onto a square of side ceil(sqrt(w^2+h^2)) + 2 with the
// object bbox centered, so a rotation by any angle about the canvas center
// stays inside. Idempotent on the object pixel set.
inline PodAsset zero_pad(const PodAsset& asset) {
    const RectI bb = asset.tight_bbox;
    const int side =
        static_cast<int>(std::ceil(std::sqrt(double(bb.w) * bb.w + double(bb.h) * bb.h))) + 2;
    PodAsset out;
    out.id = asset.id;
    out.cultivar = asset.cultivar;
    out.pixels = Image(side, side, 4, 0);
    const int dx = (side - bb.w) / 2;
    const int dy = (side - bb.h) / 2;
    for (int y = 0; y < bb.h; ++y) {
        for (int x = 0; x < bb.w; ++x) {
            const std::uint8_t* src = asset.pixels.px(bb.x + x, bb.y + y);
            if (src[3] == 0) continue;
            std::uint8_t* dst = out.pixels.px(dx + x, dy + y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
            dst[3] = src[3];
        }
    }
    out.tight_bbox = {dx, dy, bb.w, bb.h};
    out.anchor_x = dx + bb.w / 2.0;
    out.anchor_y = dy + bb.h / 2.0;
    return out;
}

namespace detail {

inline std::vector<std::filesystem::path> sorted_pngs(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError(dir.string(), "not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return files;
}

inline std::map<std::string, std::string> load_cultivar_sidecar(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    const auto sidecar = dir / "pool.json";
    if (!std::filesystem::exists(sidecar)) return out;
    std::ifstream in(sidecar);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(sidecar.string(), e.what());
    }
    for (auto& [k, v] : j.items()) out[k] = v.get<std::string>();
    return out;
}

}  // namespace detail

// Loads the pod pool in lexicographic filename order; every asset comes back
// zero-padded with a recomputed tight bbox.
inline PodPool load_pod_pool(const std::filesystem::path& dir) {
    const auto files = detail::sorted_pngs(dir);
    if (files.empty()) throw PoolEmpty(dir.string());
    const auto cultivars = detail::load_cultivar_sidecar(dir);

    PodPool pool;
    for (const auto& f : files) {
        const std::string id = f.stem().string();
        PngInfo png = read_png(f.string());
        if (!png.had_alpha || png.image.channels != 4)
            throw InvalidAsset(id, "missing alpha channel");
        // binarize alpha at 128
        bool any = false;
        for (std::size_t i = 3; i < png.image.data.size(); i += 4) {
            png.image.data[i] = png.image.data[i] >= 128 ? 255 : 0;
            any |= png.image.data[i] != 0;
        }
        if (!any) throw InvalidAsset(id, "alpha mask is empty");

        PodAsset raw;
        raw.id = id;
        if (auto it = cultivars.find(f.filename().string()); it != cultivars.end())
            raw.cultivar = it->second;
        raw.pixels = std::move(png.image);
        raw.tight_bbox = tight_alpha_bbox(raw.pixels);
        PodAsset padded = zero_pad(raw);
        padded.tight_bbox = tight_alpha_bbox(padded.pixels);
        pool.assets.push_back(std::move(padded));
    }
    return pool;
}

inline BackgroundPool load_background_pool(const std::filesystem::path& dir, int canvas_w,
                                           int canvas_h) {
    const auto files = detail::sorted_pngs(dir);
    if (files.empty()) throw PoolEmpty(dir.string());

    BackgroundPool pool;
    for (const auto& f : files) {
        const std::string id = f.stem().string();
        PngInfo png = read_png(f.string());
        Image img = std::move(png.image);
        if (img.channels == 4) {
            // drop alpha for backgrounds
            Image rgb(img.width, img.height, 3);
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x)
                    std::memcpy(rgb.px(x, y), img.px(x, y), 3);
            img = std::move(rgb);
        }
        if (img.width != canvas_w || img.height != canvas_h)
            throw InvalidAsset(id, "dimensions do not match canvas");
        pool.assets.push_back({id, std::move(img)});
    }
    return pool;
}

}  // namespace podforge
