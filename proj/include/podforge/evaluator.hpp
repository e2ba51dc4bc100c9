#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "podforge/annotations.hpp"
#include "podforge/error.hpp"
#include "podforge/rle.hpp"

namespace podforge {

struct Detection {
    int image_id = 0;
    double score = 0;  // in [0, 1]
    Rect bbox;
    std::optional<Rle> segmentation;
    int category_id = kPodCategoryId;
};

enum class EvalMode { Box, Mask };

inline const std::array<double, 10>& iou_thresholds() {
    static const std::array<double, 10> t = {0.50, 0.55, 0.60, 0.65, 0.70,
                                             0.75, 0.80, 0.85, 0.90, 0.95};
    return t;
}

struct ThresholdResult {
    double ap = 0;
    double max_recall = 0;
};

struct EvalReport {
    double recall_50_95 = 0;
    double ap_50 = 0;
    double ap_75 = 0;
    double ap_50_95 = 0;
    std::map<double, ThresholdResult> per_threshold;
    EvalMode mode = EvalMode::Box;
};

inline double iou_box(const Rect& a, const Rect& b) {
    if (a.w < 0 || a.h < 0 || b.w < 0 || b.h < 0)
        throw InvalidArgument("iou_box: negative extent");
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

inline double iou_mask(const Rle& a, const Rle& b) { return rle_iou(a, b); }

// Per-detection outcome after greedy matching, in original detection order.
struct Assignment {
    std::vector<bool> is_tp;  // parallel to the detection list
    int total_gts = 0;
    int matched_gts = 0;
};

// Greedy matcher: per image, detections in descending score (ties by input
// order) each claim the unmatched ground truth of highest IoU >= threshold.
template <typename IouFn>
Assignment match_greedy(const std::vector<InstanceAnnotation>& gts,
                        const std::vector<Detection>& dets, double iou_thresh, IouFn&& iou) {
    Assignment out;
    out.is_tp.assign(dets.size(), false);
    out.total_gts = static_cast<int>(gts.size());

    std::map<int, std::vector<std::size_t>> gts_by_image, dets_by_image;
    for (std::size_t i = 0; i < gts.size(); ++i) gts_by_image[gts[i].image_id].push_back(i);
    for (std::size_t i = 0; i < dets.size(); ++i) dets_by_image[dets[i].image_id].push_back(i);

    for (auto& [image_id, det_idx] : dets_by_image) {
        std::stable_sort(det_idx.begin(), det_idx.end(), [&](std::size_t a, std::size_t b) {
            return dets[a].score > dets[b].score;
        });
        auto git = gts_by_image.find(image_id);
        if (git == gts_by_image.end()) continue;
        const auto& gt_idx = git->second;
        std::vector<bool> gt_used(gt_idx.size(), false);

        for (std::size_t d : det_idx) {
            double best = -1;
            std::size_t best_g = 0;
            for (std::size_t g = 0; g < gt_idx.size(); ++g) {
                if (gt_used[g]) continue;
                const double v = iou(gts[gt_idx[g]], dets[d]);
                if (v >= iou_thresh && v > best) {
                    best = v;
                    best_g = g;
                }
            }
            if (best >= 0) {
                gt_used[best_g] = true;
                out.is_tp[d] = true;
                ++out.matched_gts;
            }
        }
    }
    return out;
}

// 101-point interpolated AP over the global score ranking.
inline double average_precision(const std::vector<Detection>& dets, const Assignment& asg) {
    if (asg.total_gts == 0) throw InvalidArgument("average_precision: no ground truths");
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].score > dets[b].score;
    });

    std::vector<double> precision, recall;
    int tp = 0, fp = 0;
    for (std::size_t i : order) {
        asg.is_tp[i] ? ++tp : ++fp;
        precision.push_back(static_cast<double>(tp) / (tp + fp));
        recall.push_back(static_cast<double>(tp) / asg.total_gts);
    }
    // interpolated precision: running max from the right
    for (std::size_t i = precision.size(); i-- > 1;)
        precision[i - 1] = std::max(precision[i - 1], precision[i]);

    double ap = 0;
    std::size_t k = 0;
    for (int r = 0; r <= 100; ++r) {
        const double level = r / 100.0;
        while (k < recall.size() && recall[k] < level - 1e-12) ++k;
        if (k < recall.size()) ap += precision[k];
    }
    return ap / 101.0;
}

inline EvalReport evaluate(const std::vector<InstanceAnnotation>& gts,
                           const std::vector<Detection>& dets, EvalMode mode) {
    if (gts.empty()) throw InvalidArgument("evaluate: no ground truths (metrics undefined)");
    if (mode == EvalMode::Mask) {
        for (const auto& d : dets)
            if (!d.segmentation) throw InvalidArgument("evaluate: mask mode needs segmentations");
        for (const auto& g : gts)
            if (g.segmentation.counts.empty())
                throw InvalidArgument("evaluate: mask mode needs ground-truth segmentations");
    }
    for (const auto& d : dets)
        if (d.score < 0.0 || d.score > 1.0)
            throw InvalidArgument("evaluate: scores must be in [0, 1]");

    auto iou = [mode](const InstanceAnnotation& g, const Detection& d) {
        return mode == EvalMode::Box ? iou_box(g.bbox, d.bbox)
                                     : iou_mask(g.segmentation, *d.segmentation);
    };

    EvalReport report;
    report.mode = mode;
    double ap_sum = 0, recall_sum = 0;
    for (double t : iou_thresholds()) {
        const Assignment asg = match_greedy(gts, dets, t, iou);
        ThresholdResult res;
        res.ap = dets.empty() ? 0.0 : average_precision(dets, asg);
        res.max_recall = static_cast<double>(asg.matched_gts) / asg.total_gts;
        report.per_threshold[t] = res;
        ap_sum += res.ap;
        recall_sum += res.max_recall;
    }
    report.ap_50 = report.per_threshold.at(0.50).ap;
    report.ap_75 = report.per_threshold.at(0.75).ap;
    report.ap_50_95 = ap_sum / 10.0;
    report.recall_50_95 = recall_sum / 10.0;
    return report;
}

// ---- interchange ----

inline std::vector<Detection> detections_from_json(const nlohmann::json& j) {
    std::vector<Detection> dets;
    for (const auto& d : j) {
        Detection det;
        det.image_id = d.at("image_id").get<int>();
        det.score = d.at("score").get<double>();
        const auto& bb = d.at("bbox");
        det.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(), bb.at(2).get<double>(),
                    bb.at(3).get<double>()};
        if (d.contains("segmentation") && !d.at("segmentation").is_null())
            det.segmentation = rle_from_json(d.at("segmentation"));
        det.category_id = d.value("category_id", kPodCategoryId);
        dets.push_back(std::move(det));
    }
    return dets;
}

inline nlohmann::json detections_to_json(const std::vector<Detection>& dets) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& d : dets) {
        nlohmann::json e = {{"image_id", d.image_id},
                            {"score", d.score},
                            {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
                            {"category_id", d.category_id}};
        if (d.segmentation) e["segmentation"] = rle_to_json(*d.segmentation);
        j.push_back(std::move(e));
    }
    return j;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& [t, res] : r.per_threshold)
        per.push_back({{"iou_threshold", t}, {"ap", res.ap}, {"max_recall", res.max_recall}});
    return {{"mode", r.mode == EvalMode::Box ? "box" : "mask"},
            {"recall_50_95", r.recall_50_95},
            {"ap_50", r.ap_50},
            {"ap_75", r.ap_75},
            {"ap_50_95", r.ap_50_95},
            {"per_threshold", per}};
}

// Aligned text row in the canonical report column order.
inline std::string report_to_table(const EvalReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%-12s %-16s %-8s %-8s %-12s\n%-12s %-16.3f %-8.3f %-8.3f %-12.3f\n",
                  "Mode", "Recall@[.5:.95]", "AP50", "AP75", "AP@[.5:.95]",
                  r.mode == EvalMode::Box ? "box" : "mask", r.recall_50_95, r.ap_50, r.ap_75,
                  r.ap_50_95);
    return buf;
}

}  // namespace podforge
