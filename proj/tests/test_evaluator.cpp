#include <doctest.h>

#include <cmath>

#include "eval_oracle.hpp"
#include "podforge/evaluator.hpp"
#include "podforge/rng.hpp"

using namespace podforge;

namespace {

InstanceAnnotation gt_box(int image_id, double x, double y, double w, double h) {
    InstanceAnnotation g;
    g.image_id = image_id;
    g.bbox = {x, y, w, h};
    return g;
}

Detection det_box(int image_id, double score, double x, double y, double w, double h) {
    Detection d;
    d.image_id = image_id;
    d.score = score;
    d.bbox = {x, y, w, h};
    return d;
}

// random micro-case: boxes on a 32x32 grid so IoUs span the whole range
std::pair<std::vector<InstanceAnnotation>, std::vector<Detection>> random_case(Rng& rng) {
    std::vector<InstanceAnnotation> gts;
    std::vector<Detection> dets;
    const int images = 1 + int(rng.next_index(2));
    const int n_gt = 1 + int(rng.next_index(5));
    const int n_det = int(rng.next_index(8));
    for (int g = 0; g < n_gt; ++g)
        gts.push_back(gt_box(int(rng.next_index(images)), rng.next_double() * 24,
                             rng.next_double() * 24, 2 + rng.next_double() * 8,
                             2 + rng.next_double() * 8));
    for (int d = 0; d < n_det; ++d) {
        if (!gts.empty() && rng.next_double() < 0.6) {
            // jittered copy of a ground truth so matches actually occur
            const auto& g = gts[rng.next_index(gts.size())];
            dets.push_back(det_box(g.image_id, rng.next_double(),
                                   g.bbox.x + (rng.next_double() - 0.5) * 6,
                                   g.bbox.y + (rng.next_double() - 0.5) * 6,
                                   g.bbox.w * (0.7 + rng.next_double() * 0.6),
                                   g.bbox.h * (0.7 + rng.next_double() * 0.6)));
        } else {
            dets.push_back(det_box(int(rng.next_index(images)), rng.next_double(),
                                   rng.next_double() * 24, rng.next_double() * 24,
                                   2 + rng.next_double() * 8, 2 + rng.next_double() * 8));
        }
    }
    return {gts, dets};
}

}  // namespace

TEST_CASE("iou_box fixtures") {
    CHECK(iou_box({3, 4, 5, 6}, {3, 4, 5, 6}) == doctest::Approx(1.0));
    CHECK(iou_box({0, 0, 2, 2}, {5, 5, 2, 2}) == doctest::Approx(0.0));
    CHECK(iou_box({0, 0, 2, 2}, {1, 0, 2, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(iou_box({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);  // empty union defined as 0
    CHECK_THROWS_AS(iou_box({0, 0, -1, 2}, {0, 0, 1, 1}), InvalidArgument);
}

TEST_CASE("match_greedy fixtures") {
    auto iou = [](const InstanceAnnotation& g, const Detection& d) {
        return iou_box(g.bbox, d.bbox);
    };
    SUBCASE("single pair above threshold") {
        const auto gts = std::vector{gt_box(0, 0, 0, 10, 10)};
        const auto dets = std::vector{det_box(0, 0.9, 2, 0, 10, 10)};
        const auto asg = match_greedy(gts, dets, 0.5, iou);
        CHECK(asg.matched_gts == 1);
        CHECK(asg.is_tp[0]);
    }
    SUBCASE("two detections on one gt: higher score wins") {
        const auto gts = std::vector{gt_box(0, 0, 0, 10, 10)};
        const auto dets =
            std::vector{det_box(0, 0.3, 1, 0, 10, 10), det_box(0, 0.8, 0, 1, 10, 10)};
        const auto asg = match_greedy(gts, dets, 0.5, iou);
        CHECK(asg.is_tp[1]);
        CHECK_FALSE(asg.is_tp[0]);
    }
    SUBCASE("one detection over two gts picks the larger IoU") {
        const auto gts = std::vector{gt_box(0, 0, 0, 10, 10), gt_box(0, 2, 0, 10, 10)};
        const auto dets = std::vector{det_box(0, 0.9, 3, 0, 10, 10)};
        const auto asg = match_greedy(gts, dets, 0.3, iou);
        CHECK(asg.matched_gts == 1);
        // enumerating both assignments: IoU with gt at x=2 is higher
        const double iou_a = iou_box({0, 0, 10, 10}, {3, 0, 10, 10});
        const double iou_b = iou_box({2, 0, 10, 10}, {3, 0, 10, 10});
        CHECK(iou_b > iou_a);
    }
}

TEST_CASE("pinned AP fixture: ranked [TP, FP, TP] over 2 gts") {
    const auto gts = std::vector{gt_box(0, 0, 0, 10, 10), gt_box(0, 100, 100, 10, 10)};
    const auto dets = std::vector{
        det_box(0, 0.9, 0, 0, 10, 10),      // TP
        det_box(0, 0.8, 50, 50, 10, 10),    // FP
        det_box(0, 0.7, 100, 100, 10, 10),  // TP
    };
    auto iou = [](const InstanceAnnotation& g, const Detection& d) {
        return iou_box(g.bbox, d.bbox);
    };
    const auto asg = match_greedy(gts, dets, 0.5, iou);
    const double ap = average_precision(dets, asg);
    CHECK(ap == doctest::Approx((51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0).epsilon(1e-12));
    CHECK(ap == doctest::Approx(0.8350).epsilon(1e-4));
}

TEST_CASE("perfect predictions score 1.0 on every metric") {
    std::vector<InstanceAnnotation> gts;
    std::vector<Detection> dets;
    Rng rng(2);
    for (int i = 0; i < 6; ++i) {
        gts.push_back(gt_box(i % 2, i * 20, i * 10, 8 + i, 6 + i));
        dets.push_back(det_box(i % 2, 1.0, i * 20, i * 10, 8 + i, 6 + i));
    }
    const auto r = evaluate(gts, dets, EvalMode::Box);
    CHECK(r.ap_50 == doctest::Approx(1.0));
    CHECK(r.ap_75 == doctest::Approx(1.0));
    CHECK(r.ap_50_95 == doctest::Approx(1.0));
    CHECK(r.recall_50_95 == doctest::Approx(1.0));
}

TEST_CASE("no detections score 0.0; no ground truths is undefined") {
    const auto gts = std::vector{gt_box(0, 0, 0, 10, 10)};
    const auto r = evaluate(gts, {}, EvalMode::Box);
    CHECK(r.ap_50 == 0.0);
    CHECK(r.recall_50_95 == 0.0);
    CHECK_THROWS_AS(evaluate({}, {}, EvalMode::Box), InvalidArgument);
}

TEST_CASE("oracle equivalence on 200 randomized micro-cases") {
    Rng rng(42);
    auto iou = [](const InstanceAnnotation& g, const Detection& d) {
        return iou_box(g.bbox, d.bbox);
    };
    for (int t = 0; t < 200; ++t) {
        const auto [gts, dets] = random_case(rng);
        const auto got = evaluate(gts, dets, EvalMode::Box);
        const auto want = testing::oracle_evaluate(gts, dets, iou);
        REQUIRE(got.ap_50 == doctest::Approx(want.ap_50).epsilon(1e-9));
        REQUIRE(got.ap_75 == doctest::Approx(want.ap_75).epsilon(1e-9));
        REQUIRE(got.ap_50_95 == doctest::Approx(want.ap_50_95).epsilon(1e-9));
        REQUIRE(got.recall_50_95 == doctest::Approx(want.recall_50_95).epsilon(1e-9));
    }
}

TEST_CASE("score rescaling and input order do not change the report") {
    Rng rng(43);
    for (int t = 0; t < 100; ++t) {
        auto [gts, dets] = random_case(rng);
        const auto base = evaluate(gts, dets, EvalMode::Box);

        auto rescaled = dets;
        for (auto& d : rescaled) d.score = 1.0 - std::exp(-3.0 * d.score - 0.1);
        const auto r2 = evaluate(gts, rescaled, EvalMode::Box);
        REQUIRE(r2.ap_50_95 == doctest::Approx(base.ap_50_95).epsilon(1e-12));
        REQUIRE(r2.recall_50_95 == doctest::Approx(base.recall_50_95).epsilon(1e-12));

        // thresholds: ap and recall non-increasing in the IoU threshold
        double prev_ap = 2, prev_rec = 2;
        for (double thr : iou_thresholds()) {
            const auto& res = base.per_threshold.at(thr);
            REQUIRE(res.ap <= prev_ap + 1e-12);
            REQUIRE(res.max_recall <= prev_rec + 1e-12);
            prev_ap = res.ap;
            prev_rec = res.max_recall;
        }

        // ap_50_95 is exactly the mean of the ten per-threshold APs
        double mean = 0;
        for (double thr : iou_thresholds()) mean += base.per_threshold.at(thr).ap;
        REQUIRE(base.ap_50_95 == doctest::Approx(mean / 10.0).epsilon(1e-15));
    }
}

TEST_CASE("mask mode matches box mode on rasterized boxes and needs masks") {
    std::vector<InstanceAnnotation> gts;
    std::vector<Detection> dets;
    const int W = 32, H = 32;
    auto raster = [&](const Rect& r) {
        std::vector<std::uint8_t> bits(W * H, 0);
        for (int y = int(r.y); y < int(r.y + r.h); ++y)
            for (int x = int(r.x); x < int(r.x + r.w); ++x)
                if (x >= 0 && x < W && y >= 0 && y < H) bits[y * W + x] = 1;
        return rle_encode(bits, W, H);
    };
    auto g = gt_box(0, 2, 2, 10, 10);
    g.segmentation = raster(g.bbox);
    gts.push_back(g);
    auto d = det_box(0, 0.9, 4, 2, 10, 10);
    d.segmentation = raster(d.bbox);
    dets.push_back(d);

    const auto box_r = evaluate(gts, dets, EvalMode::Box);
    const auto mask_r = evaluate(gts, dets, EvalMode::Mask);
    CHECK(mask_r.ap_50 == doctest::Approx(box_r.ap_50));

    dets[0].segmentation.reset();
    CHECK_THROWS_AS(evaluate(gts, dets, EvalMode::Mask), InvalidArgument);
}

TEST_CASE("report table is in the canonical column order") {
    const auto gts = std::vector{gt_box(0, 0, 0, 10, 10)};
    const auto dets = std::vector{det_box(0, 1.0, 0, 0, 10, 10)};
    const auto r = evaluate(gts, dets, EvalMode::Box);
    const std::string table = report_to_table(r);
    CHECK(table.find("Recall@[.5:.95]") < table.find("AP50"));
    CHECK(table.find("AP50") < table.find("AP75"));
    CHECK(table.find("AP75") < table.find("AP@[.5:.95]"));
}
