#pragma once

#include <cstdint>
#include <vector>

#include "datt/anchors.hpp"

namespace datt {

struct LossWeights {
    double alpha = 0.2;   // bbox regression
    double beta = 0.15;   // keypoint regression
    double gamma = 0.1;   // geometric symmetry
};

struct LossBreakdown {
    double l_fc = 0, l_fb = 0, l_kp = 0, l_gm = 0, total = 0;
};

double smooth_l1(double x);
double smooth_l1_grad(double x);

// Binary cross-entropy over non-ignored anchors with hard-negative mining at
// `mining_ratio` negatives per positive (all positives always contribute;
// with zero positives the `mining_ratio` hardest negatives are used). Mean
// over the selected anchors. Throws NoValidAnchors if everything is ignored.
double face_classification_loss(const std::vector<double>& pred_probs,
                                const std::vector<float>& class_targets,
                                const std::vector<uint8_t>& ignore_mask, int mining_ratio = 3);

// Same objective computed from per-anchor 2-way softmax logits [n][2]
// (background, face); optionally accumulates d(loss)/d(logits) * weight.
double face_classification_loss_logits(const float* logits, size_t n, const float* class_targets,
                                       const uint8_t* ignore_mask, int mining_ratio,
                                       float* dlogits = nullptr, double weight = 1.0);

// smooth-L1 on `dims` values per anchor, averaged over the values and then
// over positive anchors; 0 if there are no positives. Optionally accumulates
// d(loss)/d(pred) * weight into dpred.
double masked_regression_loss(const float* pred, const float* target, const uint8_t* positive,
                              size_t n_anchors, int dims, float* dpred = nullptr,
                              double weight = 1.0);

double bbox_loss(const std::vector<std::array<float, 4>>& pred,
                 const std::vector<std::array<float, 4>>& target,
                 const std::vector<uint8_t>& positive);
double keypoint_loss(const std::vector<std::array<float, 20>>& pred,
                     const std::vector<std::array<float, 20>>& target,
                     const std::vector<uint8_t>& positive);

// L_gm on one 10-point configuration (x1,y1,...,x10,y10). Works in any
// coordinate frame (the value scales linearly with the frame). Optionally
// accumulates d(loss)/d(points) * weight into grad.
double geometric_loss(const double* points, double* grad = nullptr, double weight = 1.0);
double geometric_loss(const Keypoints& points);

// Full multi-loss objective on one image's per-anchor predictions. The
// regression and geometric terms aggregate over positive anchors only; L_gm
// is evaluated on predicted keypoints in anchor-normalized units (decoded
// points divided by the anchor size, which equals the raw offsets). When the
// d* pointers are non-null, gradients (already weighted) are ACCUMULATED.
LossBreakdown total_loss(const float* cls_logits, const float* box_pred, const float* kp_pred,
                         const EncodedTargets& targets, const LossWeights& weights,
                         int mining_ratio = 3, float* dcls = nullptr, float* dbox = nullptr,
                         float* dkp = nullptr);

}  // namespace datt
