#pragma once

// Prediction scoring. SoftMax and Sigmoid reproduce the usual network output
// layers; the ML and MAP scorers replace them with smoothed histogram
// likelihoods (ML) optionally weighted by the per-class Gaussian evaluated at
// the test logit (MAP), normalized across classes. In detection mode the
// normalized vector is rescaled by the box objectness when one is present.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "probcal/errors.hpp"
#include "probcal/model.hpp"
#include "probcal/types.hpp"

namespace probcal {

// Ties break toward the lowest class index.
inline int argmax_with_tiebreak(std::span<const double> scores) {
    require(!scores.empty(), errc::empty_input, "argmax of empty vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(scores.size()); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

namespace detail {

inline ScoreVector finalize_scores(std::vector<double> scores, Method method) {
    ScoreVector sv;
    sv.scores = std::move(scores);
    sv.method = method;
    sv.predicted_class = argmax_with_tiebreak(sv.scores);
    sv.confidence = sv.scores[sv.predicted_class];
    return sv;
}

// Scales the whole vector by the box objectness: argmax and score ratios are
// unchanged, the vector total becomes the objectness.
inline void apply_objectness(ScoreVector& sv, const CalibrationModel& model,
                             const LogitRecord& record) {
    if (model.mode != Mode::detection || !record.objectness) return;
    for (double& s : sv.scores) s *= *record.objectness;
    sv.confidence = sv.scores[sv.predicted_class];
}

inline void check_arity(const CalibrationModel& model, const LogitRecord& record) {
    require(static_cast<int>(record.logits.size()) == model.num_classes(),
            errc::model_arity_mismatch,
            "record '" + record.sample_id + "' has " + std::to_string(record.logits.size()) +
                " logits but the model expects " + std::to_string(model.num_classes()));
}

} // namespace detail

inline ScoreVector softmax(std::span<const double> logits) {
    require(!logits.empty(), errc::empty_input, "softmax of empty vector");
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> s(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        s[i] = std::exp(logits[i] - m);
        total += s[i];
    }
    for (double& v : s) v /= total;
    return detail::finalize_scores(std::move(s), Method::softmax);
}

// Per-class independent sigmoids; deliberately not normalized across classes.
inline ScoreVector sigmoid_scores(std::span<const double> logits) {
    require(!logits.empty(), errc::empty_input, "sigmoid of empty vector");
    std::vector<double> s(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double x = logits[i];
        s[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    }
    return detail::finalize_scores(std::move(s), Method::sigmoid);
}

namespace detail {

inline ScoreVector normalized_score(const CalibrationModel& model, const LogitRecord& record,
                                    std::vector<double> raw, Method method) {
    double total = 0.0;
    for (double v : raw) total += v;
    require(total > 0.0, errc::all_zero_mass,
            "record '" + record.sample_id +
                "': every class scored zero and lambda = 0 leaves nothing to normalize");
    for (double& v : raw) v /= total;
    ScoreVector sv = finalize_scores(std::move(raw), method);
    apply_objectness(sv, model, record);
    return sv;
}

} // namespace detail

inline ScoreVector ml_score(const CalibrationModel& model, const LogitRecord& record) {
    detail::check_arity(model, record);
    const int nc = model.num_classes();
    std::vector<double> raw(nc);
    for (int i = 0; i < nc; ++i)
        raw[i] = lookup_likelihood(model.densities[i], record.logits[i]) + model.lambda;
    return detail::normalized_score(model, record, std::move(raw), Method::ml);
}

inline ScoreVector map_score(const CalibrationModel& model, const LogitRecord& record) {
    detail::check_arity(model, record);
    const int nc = model.num_classes();
    std::vector<double> raw(nc);
    for (int i = 0; i < nc; ++i) {
        const ClassDensity& d = model.densities[i];
        const double likelihood = lookup_likelihood(d, record.logits[i]);
        const double prior = gaussian_pdf(d.mean, d.variance, record.logits[i]);
        raw[i] = likelihood * prior + model.lambda;
    }
    return detail::normalized_score(model, record, std::move(raw), Method::map);
}

inline ScoreVector score_record(const CalibrationModel& model, const LogitRecord& record,
                                Method method) {
    switch (method) {
    case Method::ml:
        return ml_score(model, record);
    case Method::map:
        return map_score(model, record);
    case Method::softmax: {
        detail::check_arity(model, record);
        ScoreVector sv = softmax(record.logits);
        detail::apply_objectness(sv, model, record);
        return sv;
    }
    case Method::sigmoid:
        detail::check_arity(model, record);
        return sigmoid_scores(record.logits);
    case Method::ts: {
        detail::check_arity(model, record);
        require(model.temperature.has_value(), errc::invalid_config,
                "method 'ts' needs a fitted temperature in the model");
        const double ts = *model.temperature;
        std::vector<double> scaled(record.logits.size());
        for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = record.logits[i] / ts;
        ScoreVector sv = softmax(scaled);
        sv.method = Method::ts;
        detail::apply_objectness(sv, model, record);
        return sv;
    }
    }
    raise(errc::invalid_config, "unknown scoring method");
}

// Order-preserving map of the per-record scorer; failures carry the sample id.
inline std::vector<ScoreVector> score_batch(const CalibrationModel& model,
                                            std::span<const LogitRecord> records, Method method) {
    std::vector<ScoreVector> out;
    out.reserve(records.size());
    for (const LogitRecord& rec : records) {
        try {
            out.push_back(score_record(model, rec, method));
        } catch (const error& e) {
            if (std::string(e.what()).find(rec.sample_id) != std::string::npos) throw;
            throw error(e.code(), "sample '" + rec.sample_id + "': " + e.what());
        }
    }
    return out;
}

} // namespace probcal
