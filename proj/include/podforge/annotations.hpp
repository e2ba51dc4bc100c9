#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "podforge/error.hpp"
#include "podforge/image.hpp"
#include "podforge/png_io.hpp"
#include "podforge/rle.hpp"
#include "podforge/scene.hpp"

namespace podforge {

inline constexpr int kPodCategoryId = 1;  // single foreground class

struct InstanceAnnotation {
    int annotation_id = 0;
    int image_id = 0;
    int category_id = kPodCategoryId;
    Rect bbox;  // [x, y, w, h], top-left origin
    Rle segmentation;
    std::uint64_t area = 0;
    int iscrowd = 0;

    bool operator==(const InstanceAnnotation&) const = default;
};

struct ImageRecord {
    int id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;

    bool operator==(const ImageRecord&) const = default;
};

struct AnnotationSet {
    std::vector<ImageRecord> images;
    std::vector<InstanceAnnotation> annotations;

    bool operator==(const AnnotationSet&) const = default;
};

struct DatasetManifest {
    std::map<std::string, std::vector<int>> splits;  // train/val/test -> image ids
    GenerationConfig config;
    std::uint64_t master_seed = 0;
    std::string created_at;                // RFC 3339; the only non-deterministic field
    double mean_instance_count = 0;
    double mean_generation_seconds = 0;    // carried next to created_at, also run-dependent
};

// One annotation per surviving instance; annotation ids are assigned densely
// starting from image_id * 1'000'000 so ids stay unique across a dataset.
inline std::vector<InstanceAnnotation> scene_to_annotations(const Scene& scene, int image_id) {
    std::set<std::uint32_t> seen_colors;
    std::vector<InstanceAnnotation> out;
    int next_id = image_id * 1000000;
    for (const SceneInstance& inst : scene.instances) {
        const std::uint32_t packed = (std::uint32_t(inst.mask_color.r) << 16) |
                                     (std::uint32_t(inst.mask_color.g) << 8) |
                                     inst.mask_color.b;
        if (!seen_colors.insert(packed).second)
            throw CorruptScene("duplicate mask color in scene " +
                               std::to_string(scene.scene_index));
        InstanceAnnotation ann;
        ann.annotation_id = next_id++;
        ann.image_id = image_id;
        ann.segmentation = inst.visible_pixels;
        ann.area = rle_area(ann.segmentation);
        const RectI b = inst.visible_bbox;
        ann.bbox = {double(b.x), double(b.y), double(b.w), double(b.h)};
        out.push_back(std::move(ann));
    }
    return out;
}

// Groups nonzero mask pixels by exact color; inverse of the scene's mask render.
inline std::map<std::uint32_t, std::vector<std::pair<int, int>>> mask_to_instances(
    const Image& mask) {
    std::map<std::uint32_t, std::vector<std::pair<int, int>>> groups;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const std::uint8_t* p = mask.px(x, y);
            const std::uint32_t c =
                (std::uint32_t(p[0]) << 16) | (std::uint32_t(p[1]) << 8) | p[2];
            if (c != 0) groups[c].emplace_back(x, y);
        }
    }
    return groups;
}

// ---- interchange JSON (images / annotations / categories arrays) ----

inline nlohmann::json rle_to_json(const Rle& rle) {
    return {{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

inline Rle rle_from_json(const nlohmann::json& j) {
    Rle rle;
    rle.height = j.at("size").at(0).get<int>();
    rle.width = j.at("size").at(1).get<int>();
    rle.counts = j.at("counts").get<std::vector<std::uint32_t>>();
    return rle;
}

inline nlohmann::json annotation_set_to_json(const AnnotationSet& set) {
    nlohmann::json j;
    j["images"] = nlohmann::json::array();
    for (const auto& im : set.images)
        j["images"].push_back({{"id", im.id},
                               {"file_name", im.file_name},
                               {"width", im.width},
                               {"height", im.height}});
    j["annotations"] = nlohmann::json::array();
    for (const auto& a : set.annotations)
        j["annotations"].push_back({{"id", a.annotation_id},
                                    {"image_id", a.image_id},
                                    {"category_id", a.category_id},
                                    {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
                                    {"segmentation", rle_to_json(a.segmentation)},
                                    {"area", a.area},
                                    {"iscrowd", a.iscrowd}});
    j["categories"] = nlohmann::json::array({{{"id", kPodCategoryId}, {"name", "pod"}}});
    return j;
}

inline AnnotationSet annotation_set_from_json(const nlohmann::json& j) {
    AnnotationSet set;
    for (const auto& im : j.at("images"))
        set.images.push_back({im.at("id").get<int>(), im.at("file_name").get<std::string>(),
                              im.at("width").get<int>(), im.at("height").get<int>()});
    for (const auto& a : j.at("annotations")) {
        InstanceAnnotation ann;
        ann.annotation_id = a.at("id").get<int>();
        ann.image_id = a.at("image_id").get<int>();
        ann.category_id = a.at("category_id").get<int>();
        const auto& bb = a.at("bbox");
        ann.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(), bb.at(2).get<double>(),
                    bb.at(3).get<double>()};
        if (a.contains("segmentation") && !a.at("segmentation").is_null())
            ann.segmentation = rle_from_json(a.at("segmentation"));
        ann.area = a.at("area").get<std::uint64_t>();
        ann.iscrowd = a.value("iscrowd", 0);
        set.annotations.push_back(std::move(ann));
    }
    return set;
}

inline AnnotationSet read_annotation_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
    return annotation_set_from_json(j);
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << j.dump(2) << '\n';
}

// ---- dataset statistics ----

// Per-channel mean over all pixels of all images, weighted by pixel count.
inline std::array<double, 3> dataset_pixel_mean(const std::vector<const Image*>& images) {
    if (images.empty()) throw InvalidArgument("dataset_pixel_mean: empty image set");
    double sum[3] = {0, 0, 0};
    std::uint64_t n = 0;
    for (const Image* img : images) {
        for (int y = 0; y < img->height; ++y) {
            for (int x = 0; x < img->width; ++x) {
                const std::uint8_t* p = img->px(x, y);
                sum[0] += p[0];
                sum[1] += p[1];
                sum[2] += p[2];
            }
        }
        n += static_cast<std::uint64_t>(img->width) * img->height;
    }
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

struct DatasetStatsRow {
    double overlap_coefficient = 0;
    int canvas_w = 0;
    int canvas_h = 0;
    int image_count = 0;
    double mean_instance_count = 0;
    double mean_generation_seconds = 0;
};

// Rows mirror the coefficient / image size / pod count / time-per-image table.
inline std::vector<DatasetStatsRow> dataset_stats(
    const std::vector<std::pair<double, std::vector<int>>>& instance_counts_per_dataset) {
    std::vector<DatasetStatsRow> rows;
    for (const auto& [coeff, counts] : instance_counts_per_dataset) {
        if (counts.empty()) throw InvalidArgument("dataset_stats: empty dataset");
        DatasetStatsRow row;
        row.overlap_coefficient = coeff;
        row.image_count = static_cast<int>(counts.size());
        double total = 0;
        for (int c : counts) total += c;
        row.mean_instance_count = total / counts.size();
        rows.push_back(row);
    }
    return rows;
}

// ---- dataset writing ----

struct SplitPlan {
    int train = 0;
    int val = 0;
    int test = 0;
};

inline std::string zero6(int v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d", v);
    return buf;
}

inline std::string now_rfc3339() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["splits"] = m.splits;
    j["master_seed"] = m.master_seed;
    j["config"] = {{"canvas", {m.config.canvas_w, m.config.canvas_h}},
                   {"overlap_coefficient", m.config.overlap_coefficient},
                   {"scale_range", {m.config.scale_lo, m.config.scale_hi}},
                   {"rotation_range_deg", {m.config.rotation_lo_deg, m.config.rotation_hi_deg}},
                   {"max_attempts", m.config.max_attempts},
                   {"max_consecutive_rejections", m.config.max_consecutive_rejections},
                   {"min_visible_fraction", m.config.min_visible_fraction},
                   {"master_seed", m.config.master_seed}};
    j["mean_instance_count"] = m.mean_instance_count;
    // run block: wall-clock facts, excluded from determinism comparisons
    j["run"] = {{"created_at", m.created_at},
                {"mean_generation_seconds", m.mean_generation_seconds}};
    return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.splits = j.at("splits").get<std::map<std::string, std::vector<int>>>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    m.config.canvas_w = c.at("canvas").at(0).get<int>();
    m.config.canvas_h = c.at("canvas").at(1).get<int>();
    m.config.overlap_coefficient = c.at("overlap_coefficient").get<double>();
    m.config.scale_lo = c.at("scale_range").at(0).get<double>();
    m.config.scale_hi = c.at("scale_range").at(1).get<double>();
    m.config.rotation_lo_deg = c.at("rotation_range_deg").at(0).get<double>();
    m.config.rotation_hi_deg = c.at("rotation_range_deg").at(1).get<double>();
    m.config.max_attempts = c.at("max_attempts").get<int>();
    m.config.max_consecutive_rejections = c.at("max_consecutive_rejections").get<int>();
    m.config.min_visible_fraction = c.at("min_visible_fraction").get<double>();
    m.config.master_seed = c.at("master_seed").get<std::uint64_t>();
    m.mean_instance_count = j.value("mean_instance_count", 0.0);
    if (j.contains("run")) {
        m.created_at = j["run"].value("created_at", "");
        m.mean_generation_seconds = j["run"].value("mean_generation_seconds", 0.0);
    }
    return m;
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
    return manifest_from_json(j);
}

// Writes images/, masks/, annotations_{split}.json and manifest.json.
// Image ids equal scene indices; splits are assigned in scene order
// (first n_train train, then n_val val, then n_test test).
inline DatasetManifest write_dataset(const std::vector<Scene>& scenes, const SplitPlan& plan,
                                     const std::filesystem::path& out_dir,
                                     double mean_generation_seconds = 0.0,
                                     const GenerationConfig* empty_config = nullptr) {
    if (plan.train < 0 || plan.val < 0 || plan.test < 0)
        throw InvalidArgument("split counts must be non-negative");
    const int needed = plan.train + plan.val + plan.test;
    if (needed > static_cast<int>(scenes.size()))
        throw InsufficientScenes(std::to_string(scenes.size()) + " scenes for plan of " +
                                 std::to_string(needed));
    for (const Scene& s : scenes)
        if (s.image.width != scenes.front().image.width ||
            s.image.height != scenes.front().image.height)
            throw InvalidArgument("scenes must share canvas size");

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "images", ec);
    std::filesystem::create_directories(out_dir / "masks", ec);
    if (ec) throw IoError(out_dir.string(), ec.message());

    DatasetManifest manifest;
    if (!scenes.empty()) {
        manifest.config = scenes.front().config_snapshot;
    } else if (empty_config) {
        manifest.config = *empty_config;
    }
    manifest.master_seed = manifest.config.master_seed;
    manifest.created_at = now_rfc3339();
    manifest.mean_generation_seconds = mean_generation_seconds;

    double total_instances = 0;
    for (const Scene& s : scenes) {
        const std::string stem = zero6(s.scene_index);
        write_png((out_dir / "images" / (stem + ".png")).string(), s.image);
        write_png((out_dir / "masks" / (stem + "_mask.png")).string(), s.mask);
        total_instances += static_cast<double>(s.instances.size());
    }
    manifest.mean_instance_count =
        scenes.empty() ? 0.0 : total_instances / static_cast<double>(scenes.size());

    const std::array<std::pair<std::string, int>, 3> split_sizes = {
        {{"train", plan.train}, {"val", plan.val}, {"test", plan.test}}};
    int cursor = 0;
    for (const auto& [name, count] : split_sizes) {
        AnnotationSet set;
        std::vector<int> ids;
        for (int k = 0; k < count; ++k, ++cursor) {
            const Scene& s = scenes[cursor];
            const int image_id = s.scene_index;
            ids.push_back(image_id);
            set.images.push_back({image_id, "images/" + zero6(image_id) + ".png",
                                  s.image.width, s.image.height});
            auto anns = scene_to_annotations(s, image_id);
            set.annotations.insert(set.annotations.end(), anns.begin(), anns.end());
        }
        manifest.splits[name] = ids;
        write_json_file(out_dir / ("annotations_" + name + ".json"),
                        annotation_set_to_json(set));
    }
    write_json_file(out_dir / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

}  // namespace podforge
