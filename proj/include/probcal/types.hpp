#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probcal/errors.hpp"

namespace probcal {

enum class Split { train, validation, test, unseen };

enum class Mode { classification, detection };

enum class Method { softmax, sigmoid, ml, map, ts };

// One sample as it comes out of a trained network: the raw logit vector plus
// whatever side information the source had for it.
struct LogitRecord {
    std::string sample_id;
    std::vector<double> logits;
    std::optional<int> true_label;
    std::optional<double> objectness; // detector box confidence in [0, 1]
    Split split = Split::test;
};

// Per-class prediction scores for one sample, already normalized according to
// the producing method. Sigmoid vectors are per-class independent and are the
// one method exempt from the sum-to-one contract.
struct ScoreVector {
    std::vector<double> scores;
    int predicted_class = 0;
    double confidence = 0.0;
    Method method = Method::softmax;
};

inline const char* to_string(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    case Split::unseen: return "unseen";
    }
    return "?";
}

inline const char* to_string(Mode m) {
    return m == Mode::classification ? "classification" : "detection";
}

inline const char* to_string(Method m) {
    switch (m) {
    case Method::softmax: return "softmax";
    case Method::sigmoid: return "sigmoid";
    case Method::ml: return "ml";
    case Method::map: return "map";
    case Method::ts: return "ts";
    }
    return "?";
}

inline Method parse_method(std::string_view text) {
    if (text == "softmax") return Method::softmax;
    if (text == "sigmoid") return Method::sigmoid;
    if (text == "ml") return Method::ml;
    if (text == "map") return Method::map;
    if (text == "ts") return Method::ts;
    raise(errc::invalid_config, "unknown method '" + std::string(text) +
                                    "' (expected softmax|sigmoid|ml|map|ts)");
}

inline Mode parse_mode(std::string_view text) {
    if (text == "classification") return Mode::classification;
    if (text == "detection") return Mode::detection;
    raise(errc::invalid_config,
          "unknown mode '" + std::string(text) + "' (expected classification|detection)");
}

inline Split parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "validation") return Split::validation;
    if (text == "test") return Split::test;
    if (text == "unseen") return Split::unseen;
    raise(errc::invalid_config, "unknown split '" + std::string(text) + "'");
}

} // namespace probcal
