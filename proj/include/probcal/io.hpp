#pragma once

// File formats. Logit files are delimiter-separated text with the header
//   sample_id,label,objectness,logit_0..logit_{nc-1}[,is_tp]
// where an empty field means "absent". Scores files carry one row per scored
// sample. All numbers are written in round-trip-exact decimal form and all
// files end lines with LF, so regenerating a file reproduces its bytes.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "probcal/errors.hpp"
#include "probcal/format.hpp"
#include "probcal/types.hpp"

namespace probcal {

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::io_error, "cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    require(out.good(), errc::io_error, "cannot open '" + path + "' for writing");
    return out;
}

} // namespace detail

struct LogitDataset {
    std::vector<LogitRecord> records;
    int num_logits = 0;
    bool has_is_tp = false;
    std::vector<bool> is_tp; // parallel to records when has_is_tp
};

inline LogitDataset read_logit_file(const std::string& path, Split split) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), errc::parse_error,
            path + ": empty file (missing header)");

    const auto header = detail::split_fields(line);
    require(header.size() >= 4 && header[0] == "sample_id" && header[1] == "label" &&
                header[2] == "objectness" && header[3].rfind("logit_", 0) == 0,
            errc::parse_error,
            path + ": bad header (expected sample_id,label,objectness,logit_0,...)");
    LogitDataset ds;
    std::size_t nc = header.size() - 3;
    if (header.back() == "is_tp") {
        ds.has_is_tp = true;
        nc -= 1;
    }
    require(nc >= 1, errc::parse_error, path + ": header has no logit columns");
    ds.num_logits = static_cast<int>(nc);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line);
        require(fields.size() == nc + 3 + (ds.has_is_tp ? 1 : 0), errc::parse_error,
                path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(nc + 3 + (ds.has_is_tp ? 1 : 0)) + " fields, found " +
                    std::to_string(fields.size()));
        LogitRecord rec;
        rec.split = split;
        rec.sample_id = fields[0];
        require(!rec.sample_id.empty(), errc::parse_error,
                path + ":" + std::to_string(line_no) + ": empty sample_id");
        try {
            if (!fields[1].empty()) rec.true_label = static_cast<int>(parse_int(fields[1]));
            if (!fields[2].empty()) rec.objectness = parse_double(fields[2]);
            rec.logits.reserve(nc);
            for (std::size_t k = 0; k < nc; ++k) rec.logits.push_back(parse_double(fields[3 + k]));
        } catch (const error& e) {
            raise(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        for (double v : rec.logits)
            require(std::isfinite(v), errc::parse_error,
                    path + ":" + std::to_string(line_no) + ": non-finite logit");
        if (rec.true_label)
            require(*rec.true_label >= 0, errc::parse_error,
                    path + ":" + std::to_string(line_no) + ": negative label");
        if (rec.objectness)
            require(*rec.objectness >= 0.0 && *rec.objectness <= 1.0, errc::parse_error,
                    path + ":" + std::to_string(line_no) + ": objectness outside [0, 1]");
        if (ds.has_is_tp) {
            const std::string& f = fields.back();
            require(f == "0" || f == "1", errc::parse_error,
                    path + ":" + std::to_string(line_no) + ": is_tp must be 0 or 1");
            ds.is_tp.push_back(f == "1");
        }
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

inline void write_logit_file(const std::string& path, const std::vector<LogitRecord>& records,
                             int nc, const std::vector<bool>* is_tp = nullptr) {
    std::ofstream out = detail::open_output(path);
    out << "sample_id,label,objectness";
    for (int k = 0; k < nc; ++k) out << ",logit_" << k;
    if (is_tp) out << ",is_tp";
    out << '\n';
    for (std::size_t r = 0; r < records.size(); ++r) {
        const LogitRecord& rec = records[r];
        require(static_cast<int>(rec.logits.size()) == nc, errc::model_arity_mismatch,
                "write_logit_file: record '" + rec.sample_id + "' has the wrong arity");
        out << rec.sample_id << ',';
        if (rec.true_label) out << *rec.true_label;
        out << ',';
        if (rec.objectness) out << format_double(*rec.objectness);
        for (double v : rec.logits) out << ',' << format_double(v);
        if (is_tp) out << ',' << ((*is_tp)[r] ? '1' : '0');
        out << '\n';
    }
    require(out.good(), errc::io_error, "write failed for '" + path + "'");
}

struct ScoresFile {
    Method method = Method::softmax;
    std::vector<std::string> sample_ids;
    std::vector<ScoreVector> scores;
};

inline void write_scores_file(const std::string& path, const std::vector<std::string>& sample_ids,
                              const std::vector<ScoreVector>& scores) {
    require(sample_ids.size() == scores.size(), errc::invalid_config,
            "write_scores_file: id/score count mismatch");
    std::ofstream out = detail::open_output(path);
    const int nc = scores.empty() ? 0 : static_cast<int>(scores[0].scores.size());
    out << "sample_id,method";
    for (int k = 0; k < nc; ++k) out << ",score_" << k;
    out << ",predicted_class,confidence\n";
    for (std::size_t r = 0; r < scores.size(); ++r) {
        out << sample_ids[r] << ',' << to_string(scores[r].method);
        for (double v : scores[r].scores) out << ',' << format_double(v);
        out << ',' << scores[r].predicted_class << ',' << format_double(scores[r].confidence)
            << '\n';
    }
    require(out.good(), errc::io_error, "write failed for '" + path + "'");
}

inline ScoresFile read_scores_file(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), errc::parse_error,
            path + ": empty file (missing header)");
    const auto header = detail::split_fields(line);
    require(header.size() >= 5 && header[0] == "sample_id" && header[1] == "method" &&
                header[header.size() - 2] == "predicted_class" && header.back() == "confidence",
            errc::parse_error, path + ": bad scores header");
    const std::size_t nc = header.size() - 4;

    ScoresFile sf;
    bool first = true;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line);
        require(fields.size() == nc + 4, errc::parse_error,
                path + ":" + std::to_string(line_no) + ": wrong field count");
        try {
            const Method method = parse_method(fields[1]);
            if (first) {
                sf.method = method;
                first = false;
            } else {
                require(method == sf.method, errc::parse_error,
                        path + ":" + std::to_string(line_no) + ": mixed methods in one file");
            }
            ScoreVector sv;
            sv.method = method;
            sv.scores.reserve(nc);
            for (std::size_t k = 0; k < nc; ++k) sv.scores.push_back(parse_double(fields[2 + k]));
            sv.predicted_class = static_cast<int>(parse_int(fields[nc + 2]));
            sv.confidence = parse_double(fields[nc + 3]);
            require(sv.predicted_class >= 0 && sv.predicted_class < static_cast<int>(nc),
                    errc::parse_error,
                    path + ":" + std::to_string(line_no) + ": predicted_class out of range");
            sf.sample_ids.push_back(fields[0]);
            sf.scores.push_back(std::move(sv));
        } catch (const error& e) {
            if (std::string(e.what()).rfind(path, 0) == 0) throw;
            raise(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return sf;
}

// Ground-truth positives per class for detection PR curves: class_index,count
inline std::map<int, std::int64_t> read_gt_counts(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), errc::parse_error,
            path + ": empty file (missing header)");
    require(detail::split_fields(line) == std::vector<std::string>({"class_index", "count"}),
            errc::parse_error, path + ": bad header (expected class_index,count)");
    std::map<int, std::int64_t> counts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line);
        require(fields.size() == 2, errc::parse_error,
                path + ":" + std::to_string(line_no) + ": expected 2 fields");
        counts[static_cast<int>(parse_int(fields[0]))] = parse_int(fields[1]);
    }
    return counts;
}

inline void write_gt_counts(const std::string& path, const std::map<int, std::int64_t>& counts) {
    std::ofstream out = detail::open_output(path);
    out << "class_index,count\n";
    for (const auto& [cls, count] : counts) out << cls << ',' << count << '\n';
    require(out.good(), errc::io_error, "write failed for '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out = detail::open_output(path);
    out << text;
    require(out.good(), errc::io_error, "write failed for '" + path + "'");
}

} // namespace probcal
