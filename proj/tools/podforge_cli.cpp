// podforge command-line tool: generate synthetic pod scenes, inspect dataset
// statistics, evaluate predictions, render annotation overlays, and emit the
// two-step transfer-learning plan.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "podforge/annotations.hpp"
#include "podforge/asset_pool.hpp"
#include "podforge/augment.hpp"
#include "podforge/evaluator.hpp"
#include "podforge/generate.hpp"
#include "podforge/png_io.hpp"
#include "podforge/scene.hpp"
#include "podforge/transfer_plan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateJob {
    podforge::GenerationConfig config;
    podforge::SplitPlan split;
    bool split_given = false;
};

GenerateJob load_generate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw podforge::IoError(path, "cannot open config");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw podforge::ParseError(path, e.what());
    }
    GenerateJob job;
    auto& c = job.config;
    if (j.contains("canvas")) {
        c.canvas_w = j["canvas"].at(0).get<int>();
        c.canvas_h = j["canvas"].at(1).get<int>();
    }
    c.overlap_coefficient = j.value("overlap_coefficient", c.overlap_coefficient);
    if (j.contains("scale_range")) {
        c.scale_lo = j["scale_range"].at(0).get<double>();
        c.scale_hi = j["scale_range"].at(1).get<double>();
    }
    if (j.contains("rotation_range_deg")) {
        c.rotation_lo_deg = j["rotation_range_deg"].at(0).get<double>();
        c.rotation_hi_deg = j["rotation_range_deg"].at(1).get<double>();
    }
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    c.max_consecutive_rejections =
        j.value("max_consecutive_rejections", c.max_consecutive_rejections);
    c.min_visible_fraction = j.value("min_visible_fraction", c.min_visible_fraction);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("split")) {
        job.split.train = j["split"].value("train", 0);
        job.split.val = j["split"].value("val", 0);
        job.split.test = j["split"].value("test", 0);
        job.split_given = true;
    }
    return job;
}

int cmd_generate(const std::string& config_path, const std::string& pools_dir,
                 const std::string& out_dir, int count, int threads) {
    GenerateJob job = load_generate_config(config_path);
    if (const char* env_seed = std::getenv("PODFORGE_SEED"))
        job.config.master_seed = std::stoull(env_seed);

    podforge::DatasetManifest manifest;
    if (count == 0) {
        std::vector<podforge::Scene> none;
        manifest = podforge::write_dataset(none, {}, out_dir, 0.0, &job.config);
    } else {
        const auto pods = podforge::load_pod_pool(fs::path(pools_dir) / "pods");
        const auto backgrounds = podforge::load_background_pool(
            fs::path(pools_dir) / "backgrounds", job.config.canvas_w, job.config.canvas_h);
        auto run = podforge::generate_scenes(job.config, pods, backgrounds, count, threads);

        podforge::SplitPlan split = job.split;
        if (!job.split_given) {
            // default 10:1 train:val ratio, no test pool
            split.val = count / 11;
            split.train = count - split.val;
        }
        manifest = podforge::write_dataset(run.scenes, split, out_dir,
                                           run.mean_seconds_per_scene);
    }

    json summary = {{"overlap_coefficient", job.config.overlap_coefficient},
                    {"scenes", count},
                    {"mean_instance_count", manifest.mean_instance_count},
                    {"mean_generation_seconds", manifest.mean_generation_seconds},
                    {"out_dir", out_dir}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_stats(const std::vector<std::string>& dataset_dirs) {
    std::vector<std::pair<double, std::vector<int>>> per_dataset;
    std::vector<double> gen_times;
    for (const auto& dir : dataset_dirs) {
        const auto manifest = podforge::read_manifest(fs::path(dir) / "manifest.json");
        std::vector<int> counts;
        for (const auto& [split, ids] : manifest.splits) {
            const auto path = fs::path(dir) / ("annotations_" + split + ".json");
            if (!fs::exists(path)) continue;
            const auto set = podforge::read_annotation_file(path);
            std::map<int, int> per_image;
            for (const auto& im : set.images) per_image[im.id] = 0;
            for (const auto& a : set.annotations) per_image[a.image_id]++;
            for (const auto& [id, n] : per_image) counts.push_back(n);
        }
        per_dataset.emplace_back(manifest.config.overlap_coefficient, std::move(counts));
        gen_times.push_back(manifest.mean_generation_seconds);
    }
    auto rows = podforge::dataset_stats(per_dataset);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto manifest =
            podforge::read_manifest(fs::path(dataset_dirs[i]) / "manifest.json");
        rows[i].canvas_w = manifest.config.canvas_w;
        rows[i].canvas_h = manifest.config.canvas_h;
        rows[i].mean_generation_seconds = gen_times[i];
    }

    json out = json::array();
    std::printf("%-24s %-12s %-16s %-20s\n", "overlap_coefficient", "image_size",
                "mean_pod_count", "mean_time_per_image_s");
    for (const auto& r : rows) {
        std::printf("%-24.2f %dx%-7d %-16.2f %-20.4f\n", r.overlap_coefficient, r.canvas_w,
                    r.canvas_h, r.mean_instance_count, r.mean_generation_seconds);
        out.push_back({{"overlap_coefficient", r.overlap_coefficient},
                       {"image_size", {r.canvas_w, r.canvas_h}},
                       {"image_count", r.image_count},
                       {"mean_pod_count", r.mean_instance_count},
                       {"mean_time_per_image_s", r.mean_generation_seconds}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& mode_str, const std::string& report_out) {
    const auto gt = podforge::read_annotation_file(gt_path);

    std::ifstream in(pred_path);
    if (!in) throw podforge::IoError(pred_path, "cannot open");
    json pj;
    try {
        in >> pj;
    } catch (const json::exception& e) {
        throw podforge::ParseError(pred_path, e.what());
    }
    const auto dets = podforge::detections_from_json(pj);

    const auto mode = mode_str == "mask" ? podforge::EvalMode::Mask : podforge::EvalMode::Box;
    const auto report = podforge::evaluate(gt.annotations, dets, mode);
    std::cout << podforge::report_to_table(report);
    if (!report_out.empty())
        podforge::write_json_file(report_out, podforge::report_to_json(report));
    return 0;
}

int cmd_render_overlay(const std::string& image_path, const std::string& ann_path,
                       int image_id, const std::string& out_path) {
    const auto png = podforge::read_png(image_path);
    podforge::Image base = png.image;
    if (base.channels == 4) {
        podforge::Image rgb(base.width, base.height, 3);
        for (int y = 0; y < base.height; ++y)
            for (int x = 0; x < base.width; ++x) std::memcpy(rgb.px(x, y), base.px(x, y), 3);
        base = std::move(rgb);
    }
    const auto set = podforge::read_annotation_file(ann_path);
    if (image_id < 0 && !set.images.empty()) image_id = set.images.front().id;

    std::vector<podforge::SceneInstance> instances;
    int next = 0;
    for (const auto& a : set.annotations) {
        if (a.image_id != image_id || a.segmentation.counts.empty()) continue;
        podforge::SceneInstance inst;
        inst.instance_id = next;
        inst.visible_pixels = a.segmentation;
        inst.visible_bbox = podforge::rle_bbox(a.segmentation);
        inst.mask_color = podforge::mask_color(next);
        ++next;
        instances.push_back(std::move(inst));
    }
    podforge::write_png(out_path, podforge::render_overlay(base, instances));
    return 0;
}

int cmd_plan(const std::string& synthetic_manifest, const std::string& real_manifest,
             const std::string& out_path) {
    const auto manifest = podforge::read_manifest(synthetic_manifest);
    if (!fs::exists(real_manifest))
        throw podforge::IoError(real_manifest, "manifest not found");

    // pixel mean over every image referenced by the synthetic manifest
    const fs::path base = fs::path(synthetic_manifest).parent_path();
    std::vector<podforge::Image> images;
    for (const auto& [split, ids] : manifest.splits) {
        for (int id : ids) {
            const auto path = base / "images" / (podforge::zero6(id) + ".png");
            images.push_back(podforge::read_png(path.string()).image);
        }
    }
    if (images.empty())
        throw podforge::InvalidArgument("synthetic manifest references no images");
    std::vector<const podforge::Image*> ptrs;
    for (const auto& im : images) ptrs.push_back(&im);
    const auto mean = podforge::dataset_pixel_mean(ptrs);

    const auto plan = podforge::make_transfer_plan(synthetic_manifest, real_manifest, mean,
                                                   podforge::now_rfc3339());
    podforge::write_json_file(out_path, podforge::transfer_plan_to_json(plan));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"podforge: synthetic overlapping-pod scene generation and evaluation"};
    app.require_subcommand(1);

    std::string config_path, pools_dir, out_dir;
    int count = 0, threads = 1;
    auto* gen = app.add_subcommand("generate", "Generate scenes and write a dataset");
    gen->add_option("--config", config_path, "Generation config JSON")->required();
    gen->add_option("--pools", pools_dir, "Directory with pods/ and backgrounds/")->required();
    gen->add_option("--out", out_dir, "Output dataset directory")->required();
    gen->add_option("--count", count, "Number of scenes")->required();
    gen->add_option("--threads", threads, "Worker threads (output is invariant to this)");

    std::vector<std::string> dataset_dirs;
    auto* stats = app.add_subcommand("stats", "Summarize dataset instance counts and timings");
    stats->add_option("datasets", dataset_dirs, "Dataset directories")->required();

    std::string gt_path, pred_path, mode = "box", report_out;
    auto* ev = app.add_subcommand("evaluate", "Score predictions against ground truth");
    ev->add_option("--gt", gt_path, "Ground-truth annotation JSON")->required();
    ev->add_option("--pred", pred_path, "Predictions JSON (array of detections)")->required();
    ev->add_option("--mode", mode, "box or mask")->check(CLI::IsMember({"box", "mask"}));
    ev->add_option("--report", report_out, "Optional JSON report output path");

    std::string image_path, ann_path, overlay_out;
    int image_id = -1;
    auto* ov = app.add_subcommand("render-overlay", "Tint annotated regions onto an image");
    ov->add_option("--image", image_path, "Input PNG")->required();
    ov->add_option("--annotations", ann_path, "Annotation JSON")->required();
    ov->add_option("--image-id", image_id, "Image id to render (default: first)");
    ov->add_option("--out", overlay_out, "Output PNG")->required();

    std::string synth_manifest, real_manifest, plan_out;
    auto* plan = app.add_subcommand("plan", "Emit the two-step transfer-learning plan");
    plan->add_option("--synthetic", synth_manifest, "Synthetic dataset manifest")->required();
    plan->add_option("--real", real_manifest, "Real dataset manifest")->required();
    plan->add_option("--out", plan_out, "Plan JSON output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(config_path, pools_dir, out_dir, count, threads);
        if (stats->parsed()) return cmd_stats(dataset_dirs);
        if (ev->parsed()) return cmd_evaluate(gt_path, pred_path, mode, report_out);
        if (ov->parsed()) return cmd_render_overlay(image_path, ann_path, image_id, overlay_out);
        if (plan->parsed()) return cmd_plan(synth_manifest, real_manifest, plan_out);
    } catch (const podforge::Error& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 2;
}
