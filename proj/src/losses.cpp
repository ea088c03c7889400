#include "datt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "datt/common.hpp"

namespace datt {

double smooth_l1(double x) {
    const double ax = std::fabs(x);
    return ax <= 1.0 ? 0.5 * x * x : ax - 0.5;
}

double smooth_l1_grad(double x) {
    if (x > 1.0) return 1.0;
    if (x < -1.0) return -1.0;
    return x;
}

namespace {

// Selects the classification anchors: all positives plus the `ratio`*n_pos
// hardest negatives (ties by index). neg_loss must be ordered like the
// per-anchor cross-entropy of negatives.
std::vector<size_t> select_mined(const std::vector<size_t>& positives,
                                 const std::vector<std::pair<double, size_t>>& neg_losses,
                                 int ratio) {
    size_t want = positives.empty() ? static_cast<size_t>(std::max(ratio, 1))
                                    : positives.size() * static_cast<size_t>(ratio);
    want = std::min(want, neg_losses.size());
    std::vector<std::pair<double, size_t>> negs = neg_losses;
    std::stable_sort(negs.begin(), negs.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<size_t> selected = positives;
    for (size_t i = 0; i < want; ++i) selected.push_back(negs[i].second);
    return selected;
}

}  // namespace

double face_classification_loss(const std::vector<double>& pred_probs,
                                const std::vector<float>& class_targets,
                                const std::vector<uint8_t>& ignore_mask, int mining_ratio) {
    const size_t n = pred_probs.size();
    std::vector<size_t> positives;
    std::vector<std::pair<double, size_t>> neg_losses;
    for (size_t i = 0; i < n; ++i) {
        if (ignore_mask[i]) continue;
        if (class_targets[i] > 0.5f)
            positives.push_back(i);
        else
            neg_losses.emplace_back(-std::log(std::max(1.0 - pred_probs[i], 1e-300)), i);
    }
    if (positives.empty() && neg_losses.empty())
        fail("NoValidAnchors", "every anchor is ignored");

    const auto selected = select_mined(positives, neg_losses, mining_ratio);
    double sum = 0.0;
    for (size_t i : selected) {
        const double p = pred_probs[i];
        sum += class_targets[i] > 0.5f ? -std::log(std::max(p, 1e-300))
                                       : -std::log(std::max(1.0 - p, 1e-300));
    }
    return sum / static_cast<double>(selected.size());
}

double face_classification_loss_logits(const float* logits, size_t n, const float* class_targets,
                                       const uint8_t* ignore_mask, int mining_ratio,
                                       float* dlogits, double weight) {
    // Per-anchor CE from 2-way softmax: lse(z0,z1) - z_target.
    std::vector<size_t> positives;
    std::vector<std::pair<double, size_t>> neg_losses;
    std::vector<double> lse(n);
    for (size_t i = 0; i < n; ++i) {
        const double z0 = logits[2 * i], z1 = logits[2 * i + 1];
        const double m = std::max(z0, z1);
        lse[i] = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
        if (ignore_mask && ignore_mask[i]) continue;
        if (class_targets[i] > 0.5f)
            positives.push_back(i);
        else
            neg_losses.emplace_back(lse[i] - z0, i);
    }
    if (positives.empty() && neg_losses.empty())
        fail("NoValidAnchors", "every anchor is ignored");

    const auto selected = select_mined(positives, neg_losses, mining_ratio);
    const double inv = 1.0 / static_cast<double>(selected.size());
    double sum = 0.0;
    for (size_t i : selected) {
        const double z0 = logits[2 * i], z1 = logits[2 * i + 1];
        const bool face = class_targets[i] > 0.5f;
        sum += lse[i] - (face ? z1 : z0);
        if (dlogits) {
            const double p0 = std::exp(z0 - lse[i]);
            const double p1 = std::exp(z1 - lse[i]);
            dlogits[2 * i] += static_cast<float>(weight * inv * (p0 - (face ? 0.0 : 1.0)));
            dlogits[2 * i + 1] += static_cast<float>(weight * inv * (p1 - (face ? 1.0 : 0.0)));
        }
    }
    return sum * inv;
}

double masked_regression_loss(const float* pred, const float* target, const uint8_t* positive,
                              size_t n_anchors, int dims, float* dpred, double weight) {
    size_t n_pos = 0;
    for (size_t a = 0; a < n_anchors; ++a)
        if (positive[a]) ++n_pos;
    if (n_pos == 0) return 0.0;
    const double scale = 1.0 / (static_cast<double>(n_pos) * dims);
    double sum = 0.0;
    for (size_t a = 0; a < n_anchors; ++a) {
        if (!positive[a]) continue;
        for (int d = 0; d < dims; ++d) {
            const size_t idx = a * dims + d;
            const double diff = static_cast<double>(pred[idx]) - target[idx];
            sum += smooth_l1(diff);
            if (dpred) dpred[idx] += static_cast<float>(weight * scale * smooth_l1_grad(diff));
        }
    }
    return sum * scale;
}

double bbox_loss(const std::vector<std::array<float, 4>>& pred,
                 const std::vector<std::array<float, 4>>& target,
                 const std::vector<uint8_t>& positive) {
    return masked_regression_loss(pred.empty() ? nullptr : pred[0].data(),
                                  target.empty() ? nullptr : target[0].data(), positive.data(),
                                  pred.size(), 4);
}

double keypoint_loss(const std::vector<std::array<float, 20>>& pred,
                     const std::vector<std::array<float, 20>>& target,
                     const std::vector<uint8_t>& positive) {
    return masked_regression_loss(pred.empty() ? nullptr : pred[0].data(),
                                  target.empty() ? nullptr : target[0].data(), positive.data(),
                                  pred.size(), 20);
}

namespace {

// ||p_a - p_b|| with an epsilon inside the sqrt so the gradient stays finite
// when two keypoints coincide.
inline double guarded_dist(const double* pts, int a, int b, double* dx = nullptr,
                           double* dy = nullptr) {
    const double ddx = pts[2 * a] - pts[2 * b];
    const double ddy = pts[2 * a + 1] - pts[2 * b + 1];
    const double d = std::sqrt(ddx * ddx + ddy * ddy + 1e-12);
    if (dx) *dx = ddx / d;
    if (dy) *dy = ddy / d;
    return d;
}

}  // namespace

double geometric_loss(const double* points, double* grad, double weight) {
    // Outer mirror pairs (1,3), (4,5), (6,8) vs. middle keypoints {2, 7},
    // 1-based; zero-based below.
    static const int kPairs[3][2] = {{0, 2}, {3, 4}, {5, 7}};
    static const int kMids[2] = {1, 6};

    double loss = 0.0;
    for (int mid : kMids) {
        for (const auto& pair : kPairs) {
            const int a = pair[0], b = pair[1];
            double ax, ay, bx, by;
            const double da = guarded_dist(points, a, mid, &ax, &ay);
            const double db = guarded_dist(points, b, mid, &bx, &by);
            const double diff = da - db;
            loss += std::fabs(diff);
            if (grad) {
                const double s = weight * (diff >= 0 ? 1.0 : -1.0);
                grad[2 * a] += s * ax;
                grad[2 * a + 1] += s * ay;
                grad[2 * b] -= s * bx;
                grad[2 * b + 1] -= s * by;
                grad[2 * mid] += s * (bx - ax);
                grad[2 * mid + 1] += s * (by - ay);
            }
        }
    }
    return loss;
}

double geometric_loss(const Keypoints& points) { return geometric_loss(points.data()); }

LossBreakdown total_loss(const float* cls_logits, const float* box_pred, const float* kp_pred,
                         const EncodedTargets& targets, const LossWeights& weights,
                         int mining_ratio, float* dcls, float* dbox, float* dkp) {
    const size_t n = targets.class_targets.size();
    LossBreakdown out;
    out.l_fc = face_classification_loss_logits(cls_logits, n, targets.class_targets.data(),
                                               targets.ignore_mask.data(), mining_ratio, dcls);

    std::vector<uint8_t> positive(n, 0);
    size_t n_pos = 0;
    for (size_t a = 0; a < n; ++a) {
        positive[a] = targets.class_targets[a] > 0.5f ? 1 : 0;
        n_pos += positive[a];
    }

    out.l_fb = masked_regression_loss(box_pred, targets.box_targets.empty() ? nullptr
                                                : targets.box_targets[0].data(),
                                      positive.data(), n, 4, dbox, weights.alpha);
    out.l_kp = masked_regression_loss(kp_pred, targets.keypoint_targets.empty() ? nullptr
                                              : targets.keypoint_targets[0].data(),
                                      positive.data(), n, 20, dkp, weights.beta);

    if (n_pos > 0) {
        const double scale = 1.0 / static_cast<double>(n_pos);
        double sum = 0.0;
        double pts[20], g[20];
        for (size_t a = 0; a < n; ++a) {
            if (!positive[a]) continue;
            for (int i = 0; i < 20; ++i) pts[i] = kp_pred[a * 20 + i];
            if (dkp) {
                std::fill(std::begin(g), std::end(g), 0.0);
                sum += geometric_loss(pts, g, 1.0);
                for (int i = 0; i < 20; ++i)
                    dkp[a * 20 + i] += static_cast<float>(weights.gamma * scale * g[i]);
            } else {
                sum += geometric_loss(pts);
            }
        }
        out.l_gm = sum * scale;
    }

    out.total = out.l_fc + weights.alpha * out.l_fb + weights.beta * out.l_kp +
                weights.gamma * out.l_gm;
    return out;
}

}  // namespace datt
