#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "podforge/augment.hpp"
#include "podforge/error.hpp"

namespace podforge {

// Declarative two-step fine-tuning schedule: pretrained source -> synthetic
// in-vitro dataset, then that checkpoint -> real on-branch dataset.
struct TransferStep {
    std::string name;
    std::string init_weights;  // source tag; step 2 references step 1's output tag
    std::string dataset;       // manifest path
    std::vector<AugmentSpec> augmentations;
    std::array<double, 3> pixel_mean = {0, 0, 0};
};

struct TransferPlan {
    std::array<TransferStep, 2> steps;
    std::string created_at;

    void validate() const {
        if (steps[1].init_weights != steps[0].name + ":output")
            throw InvalidArgument("step 2 must initialize from step 1's output tag");
    }
};

inline std::vector<AugmentSpec> default_augmentations() {
    return {AugmentSpec::flip_ud(),      AugmentSpec::rotate(90),
            AugmentSpec::rotate(180),    AugmentSpec::rotate(270),
            AugmentSpec::brightness_of(1.2), AugmentSpec::gaussian_blur(1.0)};
}

inline nlohmann::json augment_spec_to_json(const AugmentSpec& s) {
    nlohmann::json j = {{"op", augment_op_name(s.op)}};
    switch (s.op) {
        case AugmentOp::Rotate: j["angle_deg"] = s.rotation_deg; break;
        case AugmentOp::Brightness: j["factor"] = s.brightness; break;
        case AugmentOp::GaussianBlur: j["sigma"] = s.blur_sigma; break;
        case AugmentOp::Resize: j["target_long_side"] = s.target_long_side; break;
        case AugmentOp::FlipUd: break;
    }
    return j;
}

inline TransferPlan make_transfer_plan(const std::string& synthetic_manifest,
                                       const std::string& real_manifest,
                                       const std::array<double, 3>& synthetic_pixel_mean,
                                       const std::string& created_at) {
    TransferPlan plan;
    plan.created_at = created_at;
    plan.steps[0] = {"finetune-synthetic-invitro", "coco-pretrained", synthetic_manifest,
                     default_augmentations(), synthetic_pixel_mean};
    plan.steps[1] = {"finetune-real-onbranch", plan.steps[0].name + ":output", real_manifest,
                     default_augmentations(), synthetic_pixel_mean};
    plan.validate();
    return plan;
}

inline nlohmann::json transfer_plan_to_json(const TransferPlan& plan) {
    nlohmann::json steps = nlohmann::json::array();
    for (const TransferStep& s : plan.steps) {
        nlohmann::json augs = nlohmann::json::array();
        for (const AugmentSpec& a : s.augmentations) augs.push_back(augment_spec_to_json(a));
        steps.push_back({{"name", s.name},
                         {"init_weights", s.init_weights},
                         {"dataset", s.dataset},
                         {"augmentations", augs},
                         {"pixel_mean", {s.pixel_mean[0], s.pixel_mean[1], s.pixel_mean[2]}}});
    }
    return {{"steps", steps}, {"created_at", plan.created_at}};
}

}  // namespace podforge
