#include "datt/anchors.hpp"

#include <algorithm>
#include <cmath>

#include "datt/common.hpp"

namespace datt {

namespace {

struct LevelSpec {
    int stride;
    std::vector<int> sizes;
};

const std::vector<LevelSpec>& level_specs() {
    static const std::vector<LevelSpec> specs = {{8, {16, 32}}, {16, {64, 128}}, {32, {256}}};
    return specs;
}

}  // namespace

AnchorGrid build_anchor_grid(int input_size) {
    if (input_size <= 0 || input_size % 32 != 0)
        fail("InvalidInputSize", "input size must be a positive multiple of 32, got " +
                                     std::to_string(input_size));
    AnchorGrid grid;
    grid.input_size = input_size;
    const auto& specs = level_specs();
    for (size_t level = 0; level < specs.size(); ++level) {
        const auto& spec = specs[level];
        const int cells = input_size / spec.stride;
        for (int y = 0; y < cells; ++y) {
            for (int x = 0; x < cells; ++x) {
                const double cx = (x + 0.5) * spec.stride;
                const double cy = (y + 0.5) * spec.stride;
                for (int size : spec.sizes) {
                    const double half = 0.5 * size;
                    grid.anchors.push_back({cx - half, cy - half, cx + half, cy + half});
                    grid.level_index.push_back(static_cast<int>(level));
                }
            }
        }
    }
    return grid;
}

double iou(const BBox& a, const BBox& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0 || iy <= 0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni <= 0 ? 0.0 : inter / uni;
}

MatchResult match_anchors(const AnchorGrid& grid, const std::vector<BBox>& gt) {
    const size_t n = grid.size();
    MatchResult result;
    result.label.assign(n, AnchorLabel::Negative);
    result.matched_gt_index.assign(n, -1);

    if (gt.empty()) return result;

    // Per-anchor max IoU over gt; ties broken by lowest gt index.
    std::vector<double> best_iou(n, 0.0);
    for (size_t a = 0; a < n; ++a) {
        double best = 0.0;
        int best_g = -1;
        for (size_t g = 0; g < gt.size(); ++g) {
            double v = iou(grid.anchors[a], gt[g]);
            if (v > best) {
                best = v;
                best_g = static_cast<int>(g);
            }
        }
        best_iou[a] = best;
        if (best >= 0.6) {
            result.label[a] = AnchorLabel::Positive;
            result.matched_gt_index[a] = best_g;
        } else if (best >= 0.4) {
            result.label[a] = AnchorLabel::Ignore;
        }
    }

    // Force-match: each gt (in index order) claims its highest-IoU anchor
    // among anchors not already claimed here; ties by lowest anchor index.
    std::vector<uint8_t> claimed(n, 0);
    for (size_t g = 0; g < gt.size(); ++g) {
        double best = 0.0;
        int best_a = -1;
        for (size_t a = 0; a < n; ++a) {
            if (claimed[a]) continue;
            double v = iou(grid.anchors[a], gt[g]);
            if (v > best) {
                best = v;
                best_a = static_cast<int>(a);
            }
        }
        if (best_a >= 0 && best > 0.0) {
            claimed[best_a] = 1;
            result.label[best_a] = AnchorLabel::Positive;
            result.matched_gt_index[best_a] = static_cast<int>(g);
        }
    }
    return result;
}

EncodedTargets encode_targets(const AnchorGrid& grid, const std::vector<BBox>& gt_boxes,
                              const std::vector<Keypoints>& gt_keypoints,
                              const MatchResult& match) {
    const size_t n = grid.size();
    EncodedTargets t;
    t.box_targets.assign(n, {});
    t.keypoint_targets.assign(n, {});
    t.class_targets.assign(n, 0.0f);
    t.ignore_mask.assign(n, 0);

    for (size_t a = 0; a < n; ++a) {
        if (match.label[a] == AnchorLabel::Ignore) {
            t.ignore_mask[a] = 1;
            continue;
        }
        if (match.label[a] != AnchorLabel::Positive) continue;
        t.class_targets[a] = 1.0f;
        const int g = match.matched_gt_index[a];
        const BBox& anchor = grid.anchors[a];
        const BBox& box = gt_boxes[g];
        const double s = anchor.width();  // anchors are square
        t.box_targets[a] = {static_cast<float>((box.cx() - anchor.cx()) / s),
                            static_cast<float>((box.cy() - anchor.cy()) / s),
                            static_cast<float>(std::log(box.width() / s)),
                            static_cast<float>(std::log(box.height() / s))};
        const Keypoints& kp = gt_keypoints[g];
        for (int i = 0; i < 10; ++i) {
            t.keypoint_targets[a][2 * i] = static_cast<float>((kp[2 * i] - anchor.cx()) / s);
            t.keypoint_targets[a][2 * i + 1] = static_cast<float>((kp[2 * i + 1] - anchor.cy()) / s);
        }
    }
    return t;
}

void decode_prediction(const BBox& anchor, const float* box_offsets, const float* kp_offsets,
                       BBox& box_out, Keypoints& kp_out, int clamp_size) {
    const double s = anchor.width();
    const double cx = anchor.cx() + box_offsets[0] * s;
    const double cy = anchor.cy() + box_offsets[1] * s;
    const double w = std::exp(static_cast<double>(box_offsets[2])) * s;
    const double h = std::exp(static_cast<double>(box_offsets[3])) * s;
    box_out = {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    if (clamp_size > 0) {
        box_out.x_min = std::clamp(box_out.x_min, 0.0, static_cast<double>(clamp_size));
        box_out.y_min = std::clamp(box_out.y_min, 0.0, static_cast<double>(clamp_size));
        box_out.x_max = std::clamp(box_out.x_max, 0.0, static_cast<double>(clamp_size));
        box_out.y_max = std::clamp(box_out.y_max, 0.0, static_cast<double>(clamp_size));
    }
    for (int i = 0; i < 10; ++i) {
        kp_out[2 * i] = anchor.cx() + kp_offsets[2 * i] * s;
        kp_out[2 * i + 1] = anchor.cy() + kp_offsets[2 * i + 1] * s;
    }
}

std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold) {
    std::stable_sort(detections.begin(), detections.end(),
                     [](const Detection& a, const Detection& b) { return a.score > b.score; });
    std::vector<Detection> kept;
    for (const auto& det : detections) {
        bool suppressed = false;
        for (const auto& k : kept) {
            if (iou(det.box, k.box) > iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(det);
    }
    return kept;
}

}  // namespace datt
