#pragma once

// Evaluation reports: one structured JSON report per scoring method with a
// fixed field order, plus a flat per-bin table for external plotting.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "probcal/errors.hpp"
#include "probcal/format.hpp"
#include "probcal/io.hpp"
#include "probcal/metrics.hpp"
#include "probcal/types.hpp"

namespace probcal {

inline constexpr int kUnseenHistogramBins = 20;

struct EvaluationReport {
    std::string method;
    std::int64_t sample_count = 0;
    double macro_fscore = 0.0;
    double macro_fpr = 0.0;
    ReliabilityReport reliability;
    std::optional<double> temperature;
    std::optional<ScoreStats> unseen;
    std::int64_t unseen_count = 0;
    std::vector<std::int64_t> unseen_confidence_histogram; // kUnseenHistogramBins over (0,1]
    std::vector<PRCurve> pr_curves;
};

inline std::vector<std::int64_t> confidence_histogram(const std::vector<ScoreVector>& scores) {
    std::vector<std::int64_t> h(kUnseenHistogramBins, 0);
    for (const ScoreVector& s : scores) {
        int k = static_cast<int>(s.confidence * kUnseenHistogramBins);
        if (k >= kUnseenHistogramBins) k = kUnseenHistogramBins - 1;
        if (k < 0) k = 0;
        h[k] += 1;
    }
    return h;
}

inline nlohmann::ordered_json report_to_json(const EvaluationReport& rep) {
    nlohmann::ordered_json j;
    j["method"] = rep.method;
    j["sample_count"] = rep.sample_count;
    j["macro_fscore"] = rep.macro_fscore;
    j["macro_fpr"] = rep.macro_fpr;
    if (rep.temperature) j["temperature"] = *rep.temperature;
    auto& jr = j["reliability"];
    jr["bin_count"] = rep.reliability.bin_count;
    jr["ece"] = rep.reliability.ece;
    jr["mce"] = rep.reliability.mce;
    auto& bins = jr["bins"] = nlohmann::ordered_json::array();
    for (const ReliabilityBin& b : rep.reliability.bins) {
        nlohmann::ordered_json jb;
        jb["low"] = b.range_low;
        jb["high"] = b.range_high;
        jb["count"] = b.count;
        jb["accuracy"] = b.accuracy;
        jb["avg_confidence"] = b.avg_confidence;
        jb["gap"] = b.gap;
        bins.push_back(std::move(jb));
    }
    if (rep.unseen) {
        auto& ju = j["unseen"];
        ju["count"] = rep.unseen_count;
        ju["mean_confidence"] = rep.unseen->mean;
        ju["variance_confidence"] = rep.unseen->variance;
        ju["confidence_histogram"] = rep.unseen_confidence_histogram;
    }
    if (!rep.pr_curves.empty()) {
        auto& jp = j["pr_curves"] = nlohmann::ordered_json::array();
        for (const PRCurve& c : rep.pr_curves) {
            nlohmann::ordered_json jc;
            jc["class_index"] = c.class_index;
            jc["auc"] = c.auc;
            auto& pts = jc["points"] = nlohmann::ordered_json::array();
            for (const PRPoint& p : c.points)
                pts.push_back(nlohmann::ordered_json{{"recall", p.recall},
                                                     {"precision", p.precision}});
            jp.push_back(std::move(jc));
        }
    }
    return j;
}

inline void write_report(const std::string& path, const EvaluationReport& rep) {
    write_text_file(path, report_to_json(rep).dump(2) + "\n");
}

inline EvaluationReport parse_report(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        EvaluationReport rep;
        rep.method = j.at("method").get<std::string>();
        rep.sample_count = j.at("sample_count").get<std::int64_t>();
        rep.macro_fscore = j.at("macro_fscore").get<double>();
        rep.macro_fpr = j.at("macro_fpr").get<double>();
        if (j.contains("temperature")) rep.temperature = j.at("temperature").get<double>();
        const auto& jr = j.at("reliability");
        rep.reliability.bin_count = jr.at("bin_count").get<int>();
        rep.reliability.ece = jr.at("ece").get<double>();
        rep.reliability.mce = jr.at("mce").get<double>();
        for (const auto& jb : jr.at("bins")) {
            ReliabilityBin b;
            b.range_low = jb.at("low").get<double>();
            b.range_high = jb.at("high").get<double>();
            b.count = jb.at("count").get<std::int64_t>();
            b.accuracy = jb.at("accuracy").get<double>();
            b.avg_confidence = jb.at("avg_confidence").get<double>();
            b.gap = jb.at("gap").get<double>();
            rep.reliability.bins.push_back(b);
            rep.reliability.sample_count += b.count;
        }
        if (j.contains("unseen")) {
            const auto& ju = j.at("unseen");
            rep.unseen = ScoreStats{ju.at("mean_confidence").get<double>(),
                                    ju.at("variance_confidence").get<double>()};
            rep.unseen_count = ju.at("count").get<std::int64_t>();
            rep.unseen_confidence_histogram =
                ju.at("confidence_histogram").get<std::vector<std::int64_t>>();
        }
        if (j.contains("pr_curves")) {
            for (const auto& jc : j.at("pr_curves")) {
                PRCurve c;
                c.class_index = jc.at("class_index").get<int>();
                c.auc = jc.at("auc").get<double>();
                for (const auto& jp : jc.at("points"))
                    c.points.push_back(
                        {jp.at("recall").get<double>(), jp.at("precision").get<double>()});
                rep.pr_curves.push_back(std::move(c));
            }
        }
        return rep;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("report is missing fields: ") + e.what());
    }
}

// One row per reliability bin: bin,low,high,count,accuracy,avg_confidence,gap
inline void write_reliability_table(const std::string& path, const ReliabilityReport& rel) {
    std::string text = "bin,low,high,count,accuracy,avg_confidence,gap\n";
    for (std::size_t m = 0; m < rel.bins.size(); ++m) {
        const ReliabilityBin& b = rel.bins[m];
        text += std::to_string(m + 1) + ',' + format_double(b.range_low) + ',' +
                format_double(b.range_high) + ',' + std::to_string(b.count) + ',' +
                format_double(b.accuracy) + ',' + format_double(b.avg_confidence) + ',' +
                format_double(b.gap) + '\n';
    }
    write_text_file(path, text);
}

} // namespace probcal
