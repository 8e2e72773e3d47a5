#pragma once

// Calibration and recognition metrics: reliability diagrams with ECE/MCE,
// macro F-score and macro FPR over one-vs-rest confusion counts, score
// statistics for out-of-distribution sets, and precision-recall curves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "probcal/errors.hpp"
#include "probcal/types.hpp"

namespace probcal {

struct LabeledScore {
    ScoreVector score;
    int true_label = 0;
};

struct ReliabilityBin {
    double range_low = 0.0;
    double range_high = 0.0;
    std::int64_t count = 0;
    double accuracy = 0.0;
    double avg_confidence = 0.0;
    double gap = 0.0; // accuracy - avg_confidence; empty bins report 0
};

struct ReliabilityReport {
    int bin_count = 0;
    std::int64_t sample_count = 0;
    std::vector<ReliabilityBin> bins;
    double ece = 0.0;
    double mce = 0.0;
};

// Bins partition (0, 1] as ((m-1)/M, m/M]; a confidence sitting exactly on a
// boundary belongs to the lower-indexed bin, and confidence 0 joins bin 1.
inline int reliability_bin_index(double confidence, int bin_count) {
    const int m = static_cast<int>(std::ceil(confidence * bin_count));
    return std::clamp(m, 1, bin_count) - 1;
}

inline ReliabilityReport reliability(std::span<const LabeledScore> scored, int bin_count) {
    require(bin_count >= 1, errc::invalid_config, "reliability: need at least one bin");
    require(!scored.empty(), errc::empty_input, "reliability: no scored samples");

    ReliabilityReport rep;
    rep.bin_count = bin_count;
    rep.sample_count = static_cast<std::int64_t>(scored.size());
    rep.bins.resize(bin_count);
    std::vector<std::int64_t> correct(bin_count, 0);
    std::vector<double> conf_sum(bin_count, 0.0);
    for (int m = 0; m < bin_count; ++m) {
        rep.bins[m].range_low = static_cast<double>(m) / bin_count;
        rep.bins[m].range_high = static_cast<double>(m + 1) / bin_count;
    }

    for (const LabeledScore& s : scored) {
        const int m = reliability_bin_index(s.score.confidence, bin_count);
        rep.bins[m].count += 1;
        conf_sum[m] += s.score.confidence;
        if (s.score.predicted_class == s.true_label) correct[m] += 1;
    }

    const double n = static_cast<double>(scored.size());
    for (int m = 0; m < bin_count; ++m) {
        ReliabilityBin& bin = rep.bins[m];
        if (bin.count == 0) continue;
        bin.accuracy = static_cast<double>(correct[m]) / static_cast<double>(bin.count);
        bin.avg_confidence = conf_sum[m] / static_cast<double>(bin.count);
        bin.gap = bin.accuracy - bin.avg_confidence;
        rep.ece += (static_cast<double>(bin.count) / n) * std::abs(bin.gap);
        rep.mce = std::max(rep.mce, std::abs(bin.gap));
    }
    return rep;
}

namespace detail {

struct ConfusionCounts {
    std::vector<std::int64_t> tp, fp, fn, tn;
};

inline ConfusionCounts one_vs_rest_counts(std::span<const LabeledScore> scored) {
    require(!scored.empty(), errc::empty_input, "metrics: no scored samples");
    const int nc = static_cast<int>(scored[0].score.scores.size());
    ConfusionCounts c{std::vector<std::int64_t>(nc, 0), std::vector<std::int64_t>(nc, 0),
                      std::vector<std::int64_t>(nc, 0), std::vector<std::int64_t>(nc, 0)};
    for (const LabeledScore& s : scored) {
        require(static_cast<int>(s.score.scores.size()) == nc, errc::model_arity_mismatch,
                "metrics: inconsistent score vector lengths");
        require(s.true_label >= 0 && s.true_label < nc, errc::label_out_of_range,
                "metrics: label outside the class range");
        for (int i = 0; i < nc; ++i) {
            const bool predicted = s.score.predicted_class == i;
            const bool actual = s.true_label == i;
            if (predicted && actual) c.tp[i] += 1;
            else if (predicted && !actual) c.fp[i] += 1;
            else if (!predicted && actual) c.fn[i] += 1;
            else c.tn[i] += 1;
        }
    }
    return c;
}

inline double safe_ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

// Unweighted mean of per-class F1; classes with a zero denominator count as 0.
inline double macro_fscore(std::span<const LabeledScore> scored) {
    const auto c = detail::one_vs_rest_counts(scored);
    const int nc = static_cast<int>(c.tp.size());
    double total = 0.0;
    for (int i = 0; i < nc; ++i) {
        const double p = detail::safe_ratio(c.tp[i], c.tp[i] + c.fp[i]);
        const double r = detail::safe_ratio(c.tp[i], c.tp[i] + c.fn[i]);
        total += (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    return total / nc;
}

inline double macro_fpr(std::span<const LabeledScore> scored) {
    const auto c = detail::one_vs_rest_counts(scored);
    const int nc = static_cast<int>(c.tp.size());
    double total = 0.0;
    for (int i = 0; i < nc; ++i) total += detail::safe_ratio(c.fp[i], c.fp[i] + c.tn[i]);
    return total / nc;
}

struct ScoreStats {
    double mean = 0.0;
    double variance = 0.0; // n-1 divisor; 0 for a single sample
};

inline ScoreStats unseen_stats(std::span<const ScoreVector> scored) {
    require(!scored.empty(), errc::empty_input, "unseen_stats: no scored samples");
    const double n = static_cast<double>(scored.size());
    ScoreStats st;
    for (const ScoreVector& s : scored) st.mean += s.confidence;
    st.mean /= n;
    if (scored.size() > 1) {
        double ss = 0.0;
        for (const ScoreVector& s : scored)
            ss += (s.confidence - st.mean) * (s.confidence - st.mean);
        st.variance = ss / (n - 1.0);
    }
    return st;
}

struct PRPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PRCurve {
    int class_index = 0;
    std::vector<PRPoint> points;
    double auc = 0.0;
};

namespace detail {

// Threshold sweep over scalar scores. The curve is anchored at (0, 1) so the
// trapezoidal integral over the stored points is the AUC.
inline PRCurve pr_sweep(std::vector<std::pair<double, bool>> scored, std::int64_t total_positives) {
    require(total_positives > 0, errc::no_positives,
            "pr_curve: no ground-truth positives for this class");
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    PRCurve curve;
    curve.points.push_back({0.0, 1.0});
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (std::size_t k = 0; k < scored.size(); ++k) {
        if (scored[k].second) tp += 1;
        else fp += 1;
        // Emit one point per distinct score, after consuming its whole group.
        if (k + 1 < scored.size() && scored[k + 1].first == scored[k].first) continue;
        curve.points.push_back({static_cast<double>(tp) / static_cast<double>(total_positives),
                                static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
    for (std::size_t k = 0; k + 1 < curve.points.size(); ++k) {
        const PRPoint& a = curve.points[k];
        const PRPoint& b = curve.points[k + 1];
        curve.auc += (b.recall - a.recall) * 0.5 * (a.precision + b.precision);
    }
    return curve;
}

} // namespace detail

struct Detection {
    ScoreVector score;
    bool is_true_positive = false;
};

inline PRCurve pr_curve(std::span<const Detection> detections, int class_index,
                        std::int64_t total_positives) {
    std::vector<std::pair<double, bool>> scored;
    scored.reserve(detections.size());
    for (const Detection& det : detections) {
        require(class_index >= 0 && class_index < static_cast<int>(det.score.scores.size()),
                errc::label_out_of_range, "pr_curve: class index outside the score vector");
        scored.emplace_back(det.score.scores[class_index], det.is_true_positive);
    }
    PRCurve curve = detail::pr_sweep(std::move(scored), total_positives);
    curve.class_index = class_index;
    return curve;
}

// Same sweep for pre-extracted scalar scores (e.g. detector confidences).
inline PRCurve pr_curve_scalar(std::span<const std::pair<double, bool>> scored, int class_index,
                               std::int64_t total_positives) {
    PRCurve curve = detail::pr_sweep({scored.begin(), scored.end()}, total_positives);
    curve.class_index = class_index;
    return curve;
}

} // namespace probcal
