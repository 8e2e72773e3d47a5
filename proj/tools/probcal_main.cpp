// probcal command-line tool: generate / fit / predict / temp / evaluate /
// report-plots / match. Every subcommand is deterministic given its inputs
// and seed. Exit codes: 0 ok, 2 configuration error, 3 data error, 4 numeric
// failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <probcal/probcal.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> class_names;
    int bins = 25;
    double lambda = -1.0; // unset; resolved per mode (classification 1e-4, detection 0.01)
    std::string mode = "classification";
    int reliability_bins = 15;
    std::vector<double> ts_bounds = {0.05, 20.0};
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    std::string train_path;
    std::string validation_path;
    std::string test_path;
    std::string unseen_path;
    std::string gt_counts_path;

    std::string spec_path;
    std::string scenario;
    std::string model_path;
    std::string input_path;
    std::string method = "ml";
    std::vector<std::string> scores_paths;
    std::vector<std::string> unseen_scores_paths;
    std::vector<std::string> report_paths;
    std::string detections_path;
    std::string truth_path;
    std::string logits_path;
    double iou_threshold = 0.5;
};

using OptionMap = std::map<std::string, CLI::Option*>;

bool flag_given(const OptionMap& opts, const std::string& name) {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
}

// Precedence: built-in defaults < config file < command-line flags.
void apply_config(Options& o, const OptionMap& opts) {
    if (o.config_path.empty()) return;
    json cfg;
    try {
        cfg = json::parse(probcal::read_text_file(o.config_path));
    } catch (const json::exception& e) {
        probcal::raise(probcal::errc::invalid_config,
                       o.config_path + ": not valid JSON: " + e.what());
    }
    try {
        auto take = [&](const char* key, auto& target) {
            if (cfg.contains(key) && !flag_given(opts, key)) target = cfg.at(key).get<std::decay_t<decltype(target)>>();
        };
        take("class_names", o.class_names);
        take("bins", o.bins);
        take("lambda", o.lambda);
        take("mode", o.mode);
        take("reliability_bins", o.reliability_bins);
        take("ts_bounds", o.ts_bounds);
        take("seed", o.seed);
        take("out", o.out_dir);
        take("gt_counts", o.gt_counts_path);
        take("method", o.method);
        if (cfg.contains("inputs")) {
            const auto& in = cfg.at("inputs");
            auto take_input = [&](const char* key, std::string& target) {
                if (in.contains(key) && !flag_given(opts, key)) target = in.at(key).get<std::string>();
            };
            take_input("train", o.train_path);
            take_input("validation", o.validation_path);
            take_input("test", o.test_path);
            take_input("unseen", o.unseen_path);
        }
    } catch (const json::exception& e) {
        probcal::raise(probcal::errc::invalid_config,
                       o.config_path + ": bad field type: " + e.what());
    }
}

void validate_shared(const Options& o) {
    probcal::require(o.bins >= 2, probcal::errc::invalid_config, "--bins must be >= 2");
    probcal::require(o.reliability_bins >= 1, probcal::errc::invalid_config,
                     "--reliability-bins must be >= 1");
    probcal::require(o.ts_bounds.size() == 2 && o.ts_bounds[0] > 0.0 &&
                         o.ts_bounds[1] > o.ts_bounds[0],
                     probcal::errc::invalid_config, "ts_bounds must be [lo, hi] with 0 < lo < hi");
    if (o.lambda >= 0.0)
        probcal::require(std::isfinite(o.lambda), probcal::errc::invalid_config,
                         "--lambda must be finite");
}

double resolved_lambda(const Options& o, probcal::Mode mode) {
    if (o.lambda >= 0.0) return o.lambda;
    return mode == probcal::Mode::detection ? 0.01 : 1e-4;
}

std::string out_file(const Options& o, const std::string& name) {
    return (fs::path(o.out_dir) / name).string();
}

void warn_ignored_objectness(const probcal::CalibrationModel& model,
                             const std::vector<probcal::LogitRecord>& records) {
    if (model.mode != probcal::Mode::classification) return;
    for (const auto& rec : records) {
        if (rec.objectness) {
            std::cerr << "warning: objectness values present but the model is in classification"
                         " mode; they are ignored\n";
            return;
        }
    }
}

probcal::GeneratorSpec parse_generator_spec(const std::string& path) {
    json j;
    try {
        j = json::parse(probcal::read_text_file(path));
    } catch (const json::exception& e) {
        probcal::raise(probcal::errc::invalid_spec, path + ": not valid JSON: " + e.what());
    }
    try {
        probcal::GeneratorSpec spec;
        spec.num_classes = j.at("num_classes").get<int>();
        spec.seed = j.value("seed", std::uint64_t{0});
        auto parse_cluster = [](const json& jc) {
            probcal::ClassCluster c;
            c.mean = jc.at("mean").get<std::vector<double>>();
            c.stddev = jc.at("stddev").get<std::vector<double>>();
            c.count = jc.at("count").get<std::int64_t>();
            return c;
        };
        for (const auto& jc : j.at("per_class")) spec.per_class.push_back(parse_cluster(jc));
        if (j.contains("unseen")) spec.unseen = parse_cluster(j.at("unseen"));
        return spec;
    } catch (const json::exception& e) {
        probcal::raise(probcal::errc::invalid_spec, path + ": bad spec: " + e.what());
    }
}

// ---------------------------------------------------------------------------

int cmd_generate(Options& o, const OptionMap& opts) {
    std::vector<probcal::LogitRecord> records;
    int nc = 0;
    if (!o.scenario.empty()) {
        probcal::require(o.scenario == "overconfident", probcal::errc::invalid_config,
                         "unknown scenario '" + o.scenario + "' (available: overconfident)");
        records = probcal::make_overconfident_scenario(o.seed);
        nc = 3;
    } else {
        probcal::require(!o.spec_path.empty(), probcal::errc::invalid_config,
                         "generate needs --spec <file> or --scenario overconfident");
        probcal::GeneratorSpec spec = parse_generator_spec(o.spec_path);
        if (flag_given(opts, "seed")) spec.seed = o.seed;
        records = probcal::generate(spec);
        nc = spec.num_classes;
    }

    std::map<probcal::Split, std::vector<probcal::LogitRecord>> by_split;
    for (auto& rec : records) by_split[rec.split].push_back(std::move(rec));
    for (probcal::Split s : {probcal::Split::train, probcal::Split::validation,
                             probcal::Split::test, probcal::Split::unseen}) {
        const auto& recs = by_split[s];
        const std::string path = out_file(o, std::string(probcal::to_string(s)) + ".csv");
        probcal::write_logit_file(path, recs, nc);
        std::cout << path << ": " << recs.size() << " records\n";
    }
    return 0;
}

int cmd_fit(Options& o) {
    probcal::require(!o.train_path.empty(), probcal::errc::invalid_config,
                     "fit needs --train <file>");
    const probcal::Mode mode = probcal::parse_mode(o.mode);
    probcal::LogitDataset ds = probcal::read_logit_file(o.train_path, probcal::Split::train);
    probcal::require(!ds.records.empty(), probcal::errc::empty_input,
                     o.train_path + ": no records");

    std::vector<std::string> names = o.class_names;
    if (names.empty()) {
        for (std::size_t i = 0; i < ds.records[0].logits.size(); ++i)
            names.push_back("class_" + std::to_string(i));
    }
    const double lambda = resolved_lambda(o, mode);
    probcal::CalibrationModel model =
        probcal::fit_model(ds.records, o.bins, lambda, names, mode);
    for (const std::string& w : probcal::check_model(model))
        std::cerr << "warning: " << w << "\n";

    const std::string path = out_file(o, "model.json");
    probcal::write_text_file(path, probcal::serialize_model(model));
    std::cout << "model: " << path << "  (mode " << probcal::to_string(mode) << ", bins "
              << o.bins << ", lambda " << probcal::format_double(lambda) << ")\n";
    for (const auto& d : model.densities) {
        std::cout << "  " << model.class_names[d.class_index] << ": " << d.sample_count
                  << " samples, range [" << probcal::format_double(d.bin_edges.front()) << ", "
                  << probcal::format_double(d.bin_edges.back()) << "], mean "
                  << probcal::format_double(d.mean) << ", variance "
                  << probcal::format_double(d.variance) << "\n";
    }
    return 0;
}

int cmd_predict(Options& o) {
    probcal::require(!o.model_path.empty(), probcal::errc::invalid_config,
                     "predict needs --model <file>");
    probcal::require(!o.input_path.empty(), probcal::errc::invalid_config,
                     "predict needs --input <file>");
    probcal::CalibrationModel model =
        probcal::parse_model(probcal::read_text_file(o.model_path));
    for (const std::string& w : probcal::check_model(model))
        std::cerr << "warning: " << w << "\n";
    const probcal::Method method = probcal::parse_method(o.method);

    probcal::LogitDataset ds = probcal::read_logit_file(o.input_path, probcal::Split::test);
    warn_ignored_objectness(model, ds.records);
    std::vector<probcal::ScoreVector> scores =
        probcal::score_batch(model, ds.records, method);

    std::vector<std::string> ids;
    ids.reserve(ds.records.size());
    for (const auto& rec : ds.records) ids.push_back(rec.sample_id);
    const std::string path = out_file(o, "scores_" + std::string(probcal::to_string(method)) + ".csv");
    probcal::write_scores_file(path, ids, scores);
    std::cout << path << ": " << scores.size() << " rows\n";
    return 0;
}

int cmd_temp(Options& o) {
    probcal::require(!o.validation_path.empty(), probcal::errc::invalid_config,
                     "temp needs --validation <file>");
    probcal::LogitDataset val =
        probcal::read_logit_file(o.validation_path, probcal::Split::validation);
    probcal::TemperatureSearch search{o.ts_bounds[0], o.ts_bounds[1], 1e-4};
    probcal::TemperatureModel tm = probcal::fit_temperature(val.records, search);
    const double nll_fit = probcal::temperature_nll(val.records, tm.ts);
    const double nll_one = probcal::temperature_nll(val.records, 1.0);
    std::cout << "ts = " << probcal::format_double(tm.ts) << "  (validation NLL "
              << probcal::format_double(nll_fit) << ", NLL at ts=1 "
              << probcal::format_double(nll_one) << ")\n";

    if (!o.model_path.empty()) {
        probcal::CalibrationModel model =
            probcal::parse_model(probcal::read_text_file(o.model_path));
        model.temperature = tm.ts;
        probcal::write_text_file(o.model_path, probcal::serialize_model(model));
        std::cout << "updated " << o.model_path << " with the fitted temperature\n";
    }
    if (!o.test_path.empty()) {
        probcal::LogitDataset test = probcal::read_logit_file(o.test_path, probcal::Split::test);
        std::vector<std::string> ids;
        std::vector<probcal::ScoreVector> scores;
        ids.reserve(test.records.size());
        scores.reserve(test.records.size());
        for (const auto& rec : test.records) {
            ids.push_back(rec.sample_id);
            scores.push_back(probcal::apply_temperature(rec.logits, tm.ts));
        }
        const std::string path = out_file(o, "scores_ts.csv");
        probcal::write_scores_file(path, ids, scores);
        std::cout << path << ": " << scores.size() << " rows\n";
    }
    return 0;
}

int cmd_evaluate(Options& o) {
    probcal::require(!o.test_path.empty(), probcal::errc::invalid_config,
                     "evaluate needs --labels <file>");
    probcal::require(!o.scores_paths.empty(), probcal::errc::invalid_config,
                     "evaluate needs at least one --scores <file>");
    const probcal::Mode mode = probcal::parse_mode(o.mode);
    probcal::LogitDataset labels = probcal::read_logit_file(o.test_path, probcal::Split::test);

    std::unordered_map<std::string, std::size_t> index;
    index.reserve(labels.records.size());
    for (std::size_t i = 0; i < labels.records.size(); ++i) {
        auto [it, fresh] = index.emplace(labels.records[i].sample_id, i);
        probcal::require(fresh, probcal::errc::parse_error,
                         o.test_path + ": duplicate sample_id '" + labels.records[i].sample_id +
                             "'");
    }

    std::map<int, std::int64_t> gt_counts;
    if (mode == probcal::Mode::detection) {
        probcal::require(labels.has_is_tp, probcal::errc::parse_error,
                         "detection mode needs an is_tp column in the labels file");
        probcal::require(!o.gt_counts_path.empty(), probcal::errc::invalid_config,
                         "detection mode needs --gt-counts <file>");
        gt_counts = probcal::read_gt_counts(o.gt_counts_path);
    }

    std::optional<double> fitted_ts;
    if (!o.model_path.empty()) {
        const probcal::CalibrationModel model =
            probcal::parse_model(probcal::read_text_file(o.model_path));
        fitted_ts = model.temperature;
    }

    // Unseen-split score files, keyed by their method.
    std::map<std::string, probcal::ScoresFile> unseen_by_method;
    for (const std::string& path : o.unseen_scores_paths) {
        probcal::ScoresFile sf = probcal::read_scores_file(path);
        unseen_by_method[probcal::to_string(sf.method)] = std::move(sf);
    }

    for (const std::string& path : o.scores_paths) {
        probcal::ScoresFile sf = probcal::read_scores_file(path);
        const std::string method = probcal::to_string(sf.method);

        std::vector<bool> used(labels.records.size(), false);
        std::vector<probcal::LabeledScore> joined;
        std::vector<std::pair<std::size_t, std::size_t>> row_of; // (scores row, labels row)
        std::vector<std::string> orphans;
        joined.reserve(sf.scores.size());
        for (std::size_t r = 0; r < sf.scores.size(); ++r) {
            auto it = index.find(sf.sample_ids[r]);
            if (it == index.end()) {
                orphans.push_back(sf.sample_ids[r]);
                continue;
            }
            used[it->second] = true;
            const auto& rec = labels.records[it->second];
            probcal::require(rec.true_label.has_value(), probcal::errc::missing_label,
                             o.test_path + ": record '" + rec.sample_id + "' has no label");
            joined.push_back({sf.scores[r], *rec.true_label});
            row_of.emplace_back(r, it->second);
        }
        for (std::size_t i = 0; i < labels.records.size(); ++i)
            if (!used[i]) orphans.push_back(labels.records[i].sample_id);
        if (!orphans.empty()) {
            std::string msg = path + ": scores and labels do not join; orphan ids:";
            for (std::size_t k = 0; k < orphans.size() && k < 8; ++k) msg += " " + orphans[k];
            if (orphans.size() > 8) msg += " ... (" + std::to_string(orphans.size()) + " total)";
            probcal::raise(probcal::errc::join_mismatch, msg);
        }

        probcal::EvaluationReport rep;
        rep.method = method;
        rep.sample_count = static_cast<std::int64_t>(joined.size());
        rep.macro_fscore = probcal::macro_fscore(joined);
        rep.macro_fpr = probcal::macro_fpr(joined);
        rep.reliability = probcal::reliability(joined, o.reliability_bins);
        if (sf.method == probcal::Method::ts && fitted_ts) rep.temperature = fitted_ts;

        if (auto it = unseen_by_method.find(method); it != unseen_by_method.end()) {
            rep.unseen = probcal::unseen_stats(it->second.scores);
            rep.unseen_count = static_cast<std::int64_t>(it->second.scores.size());
            rep.unseen_confidence_histogram = probcal::confidence_histogram(it->second.scores);
        }

        if (mode == probcal::Mode::detection) {
            for (const auto& [cls, total] : gt_counts) {
                if (total <= 0) {
                    std::cerr << "warning: class " << cls
                              << " has no ground-truth positives; skipping its PR curve\n";
                    continue;
                }
                std::vector<std::pair<double, bool>> dets;
                for (const auto& [r, li] : row_of) {
                    if (sf.scores[r].predicted_class != cls) continue;
                    dets.emplace_back(sf.scores[r].confidence, labels.is_tp[li]);
                }
                rep.pr_curves.push_back(probcal::pr_curve_scalar(dets, cls, total));
            }
        }

        const std::string report_path = out_file(o, "report_" + method + ".json");
        probcal::write_report(report_path, rep);
        probcal::write_reliability_table(out_file(o, "reliability_" + method + ".csv"),
                                         rep.reliability);
        std::cout << method << ": fscore " << probcal::format_double(rep.macro_fscore)
                  << ", fpr " << probcal::format_double(rep.macro_fpr) << ", ece "
                  << probcal::format_double(rep.reliability.ece) << ", mce "
                  << probcal::format_double(rep.reliability.mce);
        if (rep.unseen)
            std::cout << ", unseen mean " << probcal::format_double(rep.unseen->mean)
                      << " var " << probcal::format_double(rep.unseen->variance);
        for (const auto& c : rep.pr_curves)
            std::cout << ", auc[" << c.class_index << "] " << probcal::format_double(c.auc);
        std::cout << "  -> " << report_path << "\n";
    }
    return 0;
}

int cmd_report_plots(Options& o) {
    probcal::require(!o.report_paths.empty(), probcal::errc::invalid_config,
                     "report-plots needs at least one --report <file>");
    for (const std::string& path : o.report_paths) {
        probcal::EvaluationReport rep = probcal::parse_report(probcal::read_text_file(path));
        const std::string rel_path = out_file(o, "reliability_" + rep.method + ".svg");
        probcal::write_text_file(
            rel_path, probcal::render_reliability_svg(rep.reliability, rep.method));
        probcal::write_reliability_table(out_file(o, "reliability_" + rep.method + "_table.csv"),
                                         rep.reliability);
        std::cout << rel_path << "\n";
        if (rep.unseen) {
            const std::string hist_path = out_file(o, "unseen_" + rep.method + ".svg");
            probcal::write_text_file(
                hist_path, probcal::render_histogram_svg(rep.unseen_confidence_histogram,
                                                         rep.method + " unseen confidence"));
            std::cout << hist_path << "\n";
        }
    }
    return 0;
}

std::vector<probcal::Box> read_boxes_file(const std::string& path) {
    const std::string text = probcal::read_text_file(path);
    std::vector<probcal::Box> boxes;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            probcal::require(line == "sample_id,frame,x1,y1,x2,y2,class,score",
                             probcal::errc::parse_error,
                             path + ": bad header (expected sample_id,frame,x1,y1,x2,y2,class,score)");
            header_seen = true;
            continue;
        }
        const auto fields = probcal::detail::split_fields(line);
        probcal::require(fields.size() == 8, probcal::errc::parse_error,
                         path + ":" + std::to_string(line_no) + ": expected 8 fields");
        probcal::Box b;
        b.sample_id = fields[0];
        b.frame = fields[1];
        try {
            b.x1 = probcal::parse_double(fields[2]);
            b.y1 = probcal::parse_double(fields[3]);
            b.x2 = probcal::parse_double(fields[4]);
            b.y2 = probcal::parse_double(fields[5]);
            b.class_index = static_cast<int>(probcal::parse_int(fields[6]));
            b.score = probcal::parse_double(fields[7]);
        } catch (const probcal::error& e) {
            probcal::raise(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        boxes.push_back(std::move(b));
    }
    probcal::require(header_seen, probcal::errc::parse_error, path + ": empty file");
    return boxes;
}

int cmd_match(Options& o) {
    probcal::require(!o.detections_path.empty() && !o.truth_path.empty(),
                     probcal::errc::invalid_config,
                     "match needs --detections <file> and --truth <file>");
    const std::vector<probcal::Box> dets = read_boxes_file(o.detections_path);
    const std::vector<probcal::Box> truth = read_boxes_file(o.truth_path);
    const probcal::MatchResult res = probcal::greedy_match(dets, truth, o.iou_threshold);

    std::string matched = "sample_id,class,score,is_tp\n";
    for (std::size_t i = 0; i < dets.size(); ++i)
        matched += dets[i].sample_id + ',' + std::to_string(dets[i].class_index) + ',' +
                   probcal::format_double(dets[i].score) + ',' + (res.is_tp[i] ? '1' : '0') +
                   '\n';
    probcal::write_text_file(out_file(o, "matched.csv"), matched);
    probcal::write_gt_counts(out_file(o, "gt_counts.csv"), res.gt_counts);
    std::cout << out_file(o, "matched.csv") << ": " << dets.size() << " detections, "
              << std::count(res.is_tp.begin(), res.is_tp.end(), true) << " matched\n";

    if (!o.logits_path.empty()) {
        probcal::LogitDataset ds = probcal::read_logit_file(o.logits_path, probcal::Split::test);
        std::unordered_map<std::string, bool> tp_of;
        for (std::size_t i = 0; i < dets.size(); ++i) tp_of[dets[i].sample_id] = res.is_tp[i];
        std::vector<bool> flags;
        flags.reserve(ds.records.size());
        for (const auto& rec : ds.records) {
            auto it = tp_of.find(rec.sample_id);
            probcal::require(it != tp_of.end(), probcal::errc::join_mismatch,
                             o.logits_path + ": no detection matches sample_id '" +
                                 rec.sample_id + "'");
            flags.push_back(it->second);
        }
        const std::string path = out_file(
            o, fs::path(o.logits_path).stem().string() + "_matched.csv");
        probcal::write_logit_file(path, ds.records, ds.num_logits, &flags);
        std::cout << path << ": logits with is_tp flags\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Post-hoc probabilistic calibration toolkit: fits per-class densities to "
                 "logit-layer outputs and scores predictions with ML/MAP in place of "
                 "softmax/sigmoid, with a full calibration evaluation harness."};
    app.require_subcommand(1);
    std::map<std::string, OptionMap> opt_maps;

    auto add_shared = [&](CLI::App* sub) {
        OptionMap& m = opt_maps[sub->get_name()];
        m["config"] = sub->add_option("--config", o.config_path,
                                      "JSON config file (flags override config values)");
        m["seed"] = sub->add_option("--seed", o.seed, "random seed");
        m["out"] = sub->add_option("--out", o.out_dir, "output directory (default: out)");
        return &m;
    };

    CLI::App* gen = app.add_subcommand("generate", "write synthetic logit files per split");
    {
        OptionMap& m = *add_shared(gen);
        m["spec"] = gen->add_option("--spec", o.spec_path, "generator spec (JSON)");
        m["scenario"] =
            gen->add_option("--scenario", o.scenario, "built-in scenario: overconfident");
    }

    CLI::App* fit = app.add_subcommand("fit", "fit per-class densities on a labeled train split");
    {
        OptionMap& m = *add_shared(fit);
        m["train"] = fit->add_option("--train", o.train_path, "labeled training logit file");
        m["bins"] = fit->add_option("--bins", o.bins, "histogram bin count (default 25)");
        m["lambda"] = fit->add_option("--lambda", o.lambda,
                                      "additive smoothing (default 1e-4; 0.01 in detection mode)");
        m["mode"] = fit->add_option("--mode", o.mode, "classification|detection");
        m["class_names"] = fit->add_option("--class-names", o.class_names,
                                           "comma-separated class names")
                               ->delimiter(',');
    }

    CLI::App* pred = app.add_subcommand("predict", "score a logit file with a fitted model");
    {
        OptionMap& m = *add_shared(pred);
        m["model"] = pred->add_option("--model", o.model_path, "fitted model file");
        m["input"] = pred->add_option("--input", o.input_path, "logit file to score");
        m["method"] =
            pred->add_option("--method", o.method, "softmax|sigmoid|ml|map|ts (default ml)");
    }

    CLI::App* temp = app.add_subcommand(
        "temp", "fit the temperature-scaling baseline on a validation split");
    {
        OptionMap& m = *add_shared(temp);
        m["validation"] =
            temp->add_option("--validation", o.validation_path, "labeled validation logit file");
        m["test"] = temp->add_option("--test", o.test_path, "test logit file to score with ts");
        m["model"] = temp->add_option("--model", o.model_path,
                                      "model file to annotate with the fitted temperature");
        m["ts_bounds"] = temp->add_option("--ts-bounds", o.ts_bounds, "search bounds lo hi")
                             ->expected(2);
    }

    CLI::App* eval = app.add_subcommand("evaluate", "compute calibration/recognition reports");
    {
        OptionMap& m = *add_shared(eval);
        m["test"] = eval->add_option("--labels", o.test_path, "labeled test logit file");
        m["scores"] = eval->add_option("--scores", o.scores_paths,
                                       "scores file (repeat per method)");
        m["unseen_scores"] = eval->add_option("--unseen-scores", o.unseen_scores_paths,
                                              "scores file for the unseen split");
        m["reliability_bins"] = eval->add_option("--reliability-bins", o.reliability_bins,
                                                 "reliability diagram bins (default 15)");
        m["mode"] = eval->add_option("--mode", o.mode, "classification|detection");
        m["gt_counts"] = eval->add_option("--gt-counts", o.gt_counts_path,
                                          "ground-truth positives per class (detection)");
        m["model"] = eval->add_option("--model", o.model_path,
                                      "model file; its fitted temperature is copied into the "
                                      "ts report");
    }

    CLI::App* plots = app.add_subcommand("report-plots", "render SVG plots from report files");
    {
        OptionMap& m = *add_shared(plots);
        m["report"] = plots->add_option("--report", o.report_paths,
                                        "evaluation report (repeatable)");
    }

    CLI::App* match = app.add_subcommand(
        "match", "greedy IoU matching of detection boxes to ground truth (experimental)");
    {
        OptionMap& m = *add_shared(match);
        m["detections"] = match->add_option("--detections", o.detections_path,
                                            "detection boxes file");
        m["truth"] = match->add_option("--truth", o.truth_path, "ground-truth boxes file");
        m["iou"] = match->add_option("--iou", o.iou_threshold, "IoU threshold (default 0.5)");
        m["logits"] = match->add_option("--logits", o.logits_path,
                                        "logit file to re-emit with is_tp flags");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        apply_config(o, opt_maps[active->get_name()]);
        validate_shared(o);
        if (active == gen) return cmd_generate(o, opt_maps["generate"]);
        if (active == fit) return cmd_fit(o);
        if (active == pred) return cmd_predict(o);
        if (active == temp) return cmd_temp(o);
        if (active == eval) return cmd_evaluate(o);
        if (active == plots) return cmd_report_plots(o);
        if (active == match) return cmd_match(o);
        return 2;
    } catch (const probcal::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
