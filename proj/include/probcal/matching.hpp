#pragma once

// Greedy IoU matcher for pre-evaluation detection workflows: detections are
// visited in descending score order and claim the best still-unmatched
// ground-truth box of the same class in the same frame when the overlap
// reaches the threshold. Experimental plumbing; calibration metrics only
// consume the resulting true/false-positive flags.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "probcal/errors.hpp"

namespace probcal {

struct Box {
    std::string sample_id;
    std::string frame;
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
    int class_index = 0;
    double score = 0.0;
};

inline double iou(const Box& a, const Box& b) {
    const double ix1 = std::max(a.x1, b.x1);
    const double iy1 = std::max(a.y1, b.y1);
    const double ix2 = std::min(a.x2, b.x2);
    const double iy2 = std::min(a.y2, b.y2);
    const double iw = std::max(0.0, ix2 - ix1);
    const double ih = std::max(0.0, iy2 - iy1);
    const double inter = iw * ih;
    const double area_a = std::max(0.0, a.x2 - a.x1) * std::max(0.0, a.y2 - a.y1);
    const double area_b = std::max(0.0, b.x2 - b.x1) * std::max(0.0, b.y2 - b.y1);
    const double uni = area_a + area_b - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

struct MatchResult {
    std::vector<bool> is_tp;                 // parallel to the detections input
    std::map<int, std::int64_t> gt_counts;   // ground-truth positives per class
};

inline MatchResult greedy_match(const std::vector<Box>& detections, const std::vector<Box>& truth,
                                double iou_threshold = 0.5) {
    require(iou_threshold > 0.0 && iou_threshold <= 1.0, errc::invalid_config,
            "match: IoU threshold must be in (0, 1]");
    MatchResult result;
    result.is_tp.assign(detections.size(), false);
    for (const Box& g : truth) result.gt_counts[g.class_index] += 1;

    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].score > detections[b].score;
    });

    std::vector<bool> taken(truth.size(), false);
    for (std::size_t idx : order) {
        const Box& det = detections[idx];
        double best = 0.0;
        std::size_t best_g = truth.size();
        for (std::size_t g = 0; g < truth.size(); ++g) {
            if (taken[g] || truth[g].class_index != det.class_index ||
                truth[g].frame != det.frame)
                continue;
            const double overlap = iou(det, truth[g]);
            if (overlap > best) {
                best = overlap;
                best_g = g;
            }
        }
        if (best_g < truth.size() && best >= iou_threshold) {
            taken[best_g] = true;
            result.is_tp[idx] = true;
        }
    }
    return result;
}

} // namespace probcal
