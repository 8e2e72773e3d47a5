#pragma once

// Density models fitted to a trained network's logit-layer outputs. Each
// class gets a normalized histogram of its own logit component (positives
// only) plus a Gaussian summarizing the same values. The fitted model is
// immutable after construction and safe to share across scoring threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "probcal/errors.hpp"
#include "probcal/types.hpp"

namespace probcal {

struct Histogram {
    std::vector<double> edges; // B+1 strictly increasing, spanning the data min/max
    std::vector<double> mass;  // B entries, non-negative, summing to 1
};

struct GaussianParams {
    double mean = 0.0;
    double variance = 1.0;
};

struct ClassDensity {
    int class_index = 0;
    std::vector<double> bin_edges;
    std::vector<double> bin_mass;
    double mean = 0.0;
    double variance = 1.0;
    std::int64_t sample_count = 0;
};

struct CalibrationModel {
    std::vector<std::string> class_names;
    std::vector<ClassDensity> densities;
    double lambda = 0.0;
    int bin_count = 0;
    Mode mode = Mode::classification;
    std::optional<double> temperature; // filled in when the TS baseline is fitted

    int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Bin k covers [edges[k], edges[k+1]): a value sitting exactly on an interior
// edge belongs to the bin on its right. The maximum edge folds into the last
// bin so the partition is total. Returns -1 outside [min, max] (and for NaN).
inline int bin_index(std::span<const double> edges, double x) {
    if (!(x >= edges.front() && x <= edges.back())) return -1;
    if (x == edges.back()) return static_cast<int>(edges.size()) - 2;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    return static_cast<int>(it - edges.begin()) - 1;
}

inline void check_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        require(std::isfinite(v), errc::non_finite_input,
                std::string(what) + ": non-finite value in input");
}

inline Histogram fit_histogram(std::span<const double> values, int bin_count) {
    require(!values.empty(), errc::empty_input, "fit_histogram: empty input");
    require(bin_count >= 2, errc::invalid_config, "fit_histogram: bin_count must be >= 2");
    check_finite(values, "fit_histogram");

    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    require(hi > lo, errc::degenerate_range, "fit_histogram: all values equal (zero-width range)");

    Histogram h;
    h.edges.resize(bin_count + 1);
    const double width = (hi - lo) / bin_count;
    for (int k = 0; k <= bin_count; ++k) h.edges[k] = lo + width * k;
    h.edges[bin_count] = hi;
    for (int k = 0; k < bin_count; ++k)
        require(h.edges[k] < h.edges[k + 1], errc::degenerate_range,
                "fit_histogram: value range too narrow for the requested bin count");

    h.mass.assign(bin_count, 0.0);
    for (double v : values) h.mass[bin_index(h.edges, v)] += 1.0;
    const double n = static_cast<double>(values.size());
    for (double& m : h.mass) m /= n;
    return h;
}

// Keeps a class's Gaussian proper when it has a single sample or zero spread.
inline double variance_floor(double mean) { return 1e-6 * std::max(1.0, mean * mean); }

inline GaussianParams fit_gaussian(std::span<const double> values) {
    require(!values.empty(), errc::empty_input, "fit_gaussian: empty input");
    check_finite(values, "fit_gaussian");

    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    GaussianParams g;
    g.mean = sum / n;

    if (values.size() == 1) {
        g.variance = variance_floor(g.mean);
        return g;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - g.mean) * (v - g.mean);
    g.variance = ss / (n - 1.0);
    if (g.variance < 1e-12) g.variance = variance_floor(g.mean);
    return g;
}

inline double gaussian_pdf(double mean, double variance, double x) {
    require(variance > 0.0, errc::non_positive_variance,
            "gaussian_pdf: variance must be positive");
    const double d = x - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// Histogram likelihood of x under one class density. Out-of-range values get
// zero mass here; additive smoothing downstream keeps them scoreable.
inline double lookup_likelihood(const ClassDensity& density, double x) {
    const int k = bin_index(density.bin_edges, x);
    return k < 0 ? 0.0 : density.bin_mass[k];
}

inline CalibrationModel fit_model(std::span<const LogitRecord> train, int bin_count, double lambda,
                                  std::vector<std::string> class_names,
                                  Mode mode = Mode::classification) {
    const int nc = static_cast<int>(class_names.size());
    require(nc >= 2, errc::invalid_config, "fit_model: need at least two classes");
    require(bin_count >= 2, errc::invalid_config, "fit_model: bin_count must be >= 2");
    require(lambda >= 0.0 && std::isfinite(lambda), errc::invalid_config,
            "fit_model: lambda must be finite and >= 0");

    std::vector<std::vector<double>> per_class(nc);
    for (const LogitRecord& rec : train) {
        require(rec.true_label.has_value(), errc::missing_label,
                "fit_model: unlabeled record '" + rec.sample_id + "'");
        const int label = *rec.true_label;
        require(label >= 0 && label < nc, errc::label_out_of_range,
                "fit_model: record '" + rec.sample_id + "' has label " + std::to_string(label) +
                    " outside [0, " + std::to_string(nc) + ")");
        require(static_cast<int>(rec.logits.size()) == nc, errc::model_arity_mismatch,
                "fit_model: record '" + rec.sample_id + "' has " +
                    std::to_string(rec.logits.size()) + " logits, expected " + std::to_string(nc));
        per_class[label].push_back(rec.logits[label]);
    }

    CalibrationModel model;
    model.class_names = std::move(class_names);
    model.lambda = lambda;
    model.bin_count = bin_count;
    model.mode = mode;
    model.densities.reserve(nc);
    for (int i = 0; i < nc; ++i) {
        require(per_class[i].size() >= 2, errc::class_underpopulated,
                "fit_model: class '" + model.class_names[i] + "' has " +
                    std::to_string(per_class[i].size()) + " training samples (need at least 2)");
        Histogram h = fit_histogram(per_class[i], bin_count);
        GaussianParams g = fit_gaussian(per_class[i]);
        model.densities.push_back({i, std::move(h.edges), std::move(h.mass), g.mean, g.variance,
                                   static_cast<std::int64_t>(per_class[i].size())});
    }
    return model;
}

// Validates structural invariants (throws on violation) and returns soft
// warnings the caller may want to surface.
inline std::vector<std::string> check_model(const CalibrationModel& model) {
    const int nc = model.num_classes();
    require(nc >= 2, errc::invalid_config, "model: need at least two classes");
    require(static_cast<int>(model.densities.size()) == nc, errc::invalid_config,
            "model: density count does not match class count");
    require(model.bin_count >= 2, errc::invalid_config, "model: bin_count must be >= 2");
    require(model.lambda >= 0.0 && std::isfinite(model.lambda), errc::invalid_config,
            "model: lambda must be finite and >= 0");
    for (const ClassDensity& d : model.densities) {
        require(static_cast<int>(d.bin_mass.size()) == model.bin_count, errc::invalid_config,
                "model: class " + std::to_string(d.class_index) + " has a different bin count");
        require(d.bin_edges.size() == d.bin_mass.size() + 1, errc::invalid_config,
                "model: class " + std::to_string(d.class_index) + " has malformed bin edges");
        double total = 0.0;
        for (double m : d.bin_mass) {
            require(m >= 0.0, errc::invalid_config, "model: negative bin mass");
            total += m;
        }
        require(std::abs(total - 1.0) <= 1e-9, errc::invalid_config,
                "model: class " + std::to_string(d.class_index) + " bin masses sum to " +
                    std::to_string(total));
        for (std::size_t k = 0; k + 1 < d.bin_edges.size(); ++k)
            require(d.bin_edges[k] < d.bin_edges[k + 1], errc::invalid_config,
                    "model: bin edges not strictly increasing");
        check_finite(d.bin_edges, "model edges");
        require(d.variance > 0.0, errc::non_positive_variance,
                "model: class " + std::to_string(d.class_index) + " has non-positive variance");
    }
    if (model.temperature)
        require(std::isfinite(*model.temperature) && *model.temperature > 0.0,
                errc::non_positive_temperature, "model: temperature must be positive");

    std::vector<std::string> warnings;
    if (model.lambda == 0.0)
        warnings.push_back("lambda = 0: out-of-range logits will score exactly zero; "
                           "additive smoothing is disabled");
    return warnings;
}

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::ordered_json model_to_json(const CalibrationModel& model) {
    nlohmann::ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["mode"] = to_string(model.mode);
    j["class_names"] = model.class_names;
    j["bin_count"] = model.bin_count;
    j["lambda"] = model.lambda;
    if (model.temperature) j["temperature"] = *model.temperature;
    auto& densities = j["densities"] = nlohmann::ordered_json::array();
    for (const ClassDensity& d : model.densities) {
        nlohmann::ordered_json jd;
        jd["class_index"] = d.class_index;
        jd["sample_count"] = d.sample_count;
        jd["mean"] = d.mean;
        jd["variance"] = d.variance;
        jd["bin_edges"] = d.bin_edges;
        jd["bin_mass"] = d.bin_mass;
        densities.push_back(std::move(jd));
    }
    return j;
}

inline std::string serialize_model(const CalibrationModel& model) {
    return model_to_json(model).dump(2) + "\n";
}

inline CalibrationModel parse_model(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        require(j.at("format_version").get<int>() == kModelFormatVersion, errc::parse_error,
                "unsupported model format_version");
        CalibrationModel model;
        model.mode = parse_mode(j.at("mode").get<std::string>());
        model.class_names = j.at("class_names").get<std::vector<std::string>>();
        model.bin_count = j.at("bin_count").get<int>();
        model.lambda = j.at("lambda").get<double>();
        if (j.contains("temperature")) model.temperature = j.at("temperature").get<double>();
        for (const auto& jd : j.at("densities")) {
            ClassDensity d;
            d.class_index = jd.at("class_index").get<int>();
            d.sample_count = jd.at("sample_count").get<std::int64_t>();
            d.mean = jd.at("mean").get<double>();
            d.variance = jd.at("variance").get<double>();
            d.bin_edges = jd.at("bin_edges").get<std::vector<double>>();
            d.bin_mass = jd.at("bin_mass").get<std::vector<double>>();
            model.densities.push_back(std::move(d));
        }
        check_model(model);
        return model;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("model file is missing fields: ") + e.what());
    }
}

} // namespace probcal
