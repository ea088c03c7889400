#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace datt {

struct BBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x_min + x_max); }
    double cy() const { return 0.5 * (y_min + y_max); }
};

using Keypoints = std::array<double, 20>;  // x1,y1,...,x10,y10 (pixels)

enum class AnchorLabel : int8_t { Negative = 0, Positive = 1, Ignore = 2 };

// Square anchors tiled over the P1/P2/P3 pyramid (strides 8/16/32, sizes
// {16,32} / {64,128} / {256}), centered on (i+0.5)*stride cell centers.
struct AnchorGrid {
    std::vector<BBox> anchors;
    std::vector<int> level_index;  // 0..2 per anchor
    int input_size = 0;

    size_t size() const { return anchors.size(); }
};

struct MatchResult {
    std::vector<AnchorLabel> label;
    std::vector<int> matched_gt_index;  // -1 if none
};

struct EncodedTargets {
    // Per anchor; defined only where label == Positive.
    std::vector<std::array<float, 4>> box_targets;
    std::vector<std::array<float, 20>> keypoint_targets;
    std::vector<float> class_targets;  // f_gt in {0,1}
    std::vector<uint8_t> ignore_mask;  // 1 = excluded from classification
};

struct Detection {
    BBox box;
    double score = 0;
    Keypoints keypoints{};
};

AnchorGrid build_anchor_grid(int input_size);

double iou(const BBox& a, const BBox& b);

// Max-IoU rule (>=0.6 positive, <0.4 negative, else ignore) plus force-match:
// each gt claims its best remaining anchor (IoU > 0) as positive.
MatchResult match_anchors(const AnchorGrid& grid, const std::vector<BBox>& gt);

EncodedTargets encode_targets(const AnchorGrid& grid, const std::vector<BBox>& gt_boxes,
                              const std::vector<Keypoints>& gt_keypoints, const MatchResult& match);

// Inverse of encode_targets applied to every anchor. Boxes are clamped to
// [0, clamp_size] when clamp_size > 0; keypoints are never clamped.
void decode_prediction(const BBox& anchor, const float* box_offsets, const float* kp_offsets,
                       BBox& box_out, Keypoints& kp_out, int clamp_size);

std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold);

}  // namespace datt
