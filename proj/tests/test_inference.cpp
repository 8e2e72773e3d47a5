#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <probcal/inference.hpp>
#include <probcal/model.hpp>

#include "oracles.hpp"

using namespace probcal;

namespace {

// Model whose class-i histogram returns `mass_at_half[i]` for a logit of 0.5
// and zero outside [0, 2]; Gaussians are standard normal unless overridden.
CalibrationModel stub_model(const std::vector<double>& mass_at_half, double lambda,
                            Mode mode = Mode::classification) {
    CalibrationModel m;
    m.lambda = lambda;
    m.bin_count = 2;
    m.mode = mode;
    for (std::size_t i = 0; i < mass_at_half.size(); ++i) {
        m.class_names.push_back("cls" + std::to_string(i));
        ClassDensity d;
        d.class_index = static_cast<int>(i);
        d.bin_edges = {0.0, 1.0, 2.0};
        d.bin_mass = {mass_at_half[i], 1.0 - mass_at_half[i]};
        d.mean = 0.0;
        d.variance = 1.0;
        d.sample_count = 10;
        m.densities.push_back(std::move(d));
    }
    return m;
}

LogitRecord record(std::vector<double> logits) {
    LogitRecord r;
    r.sample_id = "r";
    r.logits = std::move(logits);
    return r;
}

} // namespace

TEST_CASE("softmax basics") {
    const ScoreVector even = softmax(std::vector<double>{0.0, 0.0, 0.0});
    for (double s : even.scores) CHECK(s == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(even.predicted_class == 0);

    const ScoreVector huge = softmax(std::vector<double>{1000.0, 0.0, 0.0});
    CHECK(std::isfinite(huge.scores[0]));
    CHECK(huge.scores[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(huge.predicted_class == 0);

    const ScoreVector abc = softmax(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(abc.scores[0] == doctest::Approx(0.09003057317038046).epsilon(1e-12));
    CHECK(abc.scores[1] == doctest::Approx(0.24472847105479767).epsilon(1e-12));
    CHECK(abc.scores[2] == doctest::Approx(0.6652409557748219).epsilon(1e-12));
    double total = 0.0;
    for (double s : abc.scores) total += s;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("softmax argmax is shift invariant") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> v(3 + rng() % 5);
        for (double& x : v) x = oracle::uniform(rng, -30.0, 30.0);
        const double shift = oracle::uniform(rng, -100.0, 100.0);
        std::vector<double> w = v;
        for (double& x : w) x += shift;
        CHECK(softmax(v).predicted_class == softmax(w).predicted_class);
    }
}

TEST_CASE("sigmoid scores are per-class and unnormalized") {
    const ScoreVector zero = sigmoid_scores(std::vector<double>{0.0, 0.0, 0.0});
    for (double s : zero.scores) CHECK(s == 0.5);

    const ScoreVector deep = sigmoid_scores(std::vector<double>{-745.0});
    CHECK(deep.scores[0] >= 0.0);
    CHECK(deep.scores[0] < 1e-300);

    const ScoreVector ln3 = sigmoid_scores(std::vector<double>{std::log(3.0)});
    CHECK(ln3.scores[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("argmax tie rule takes the lowest index") {
    CHECK(argmax_with_tiebreak(std::vector<double>{0.2, 0.5, 0.3}) == 1);
    CHECK(argmax_with_tiebreak(std::vector<double>{0.4, 0.4, 0.2}) == 0);
    CHECK(argmax_with_tiebreak(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}) == 0);
    CHECK_THROWS_AS(argmax_with_tiebreak(std::vector<double>{}), error);
}

TEST_CASE("ml_score falls back to uniform when smoothing dominates") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    const ScoreVector sv = ml_score(m, record({9.0, 9.0, 9.0})); // all out of range
    for (double s : sv.scores) CHECK(s == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(sv.predicted_class == 0);
}

TEST_CASE("ml_score normalizes smoothed lookups") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    // lookups 0.6 and 0.2 at 0.5; the third logit misses the histogram.
    const ScoreVector sv = ml_score(m, record({0.5, 0.5, 9.0}));
    CHECK(sv.scores[0] == doctest::Approx(0.7349397590361446).epsilon(1e-12));
    CHECK(sv.scores[1] == doctest::Approx(0.25301204819277107).epsilon(1e-12));
    CHECK(sv.scores[2] == doctest::Approx(0.012048192771084338).epsilon(1e-12));
    CHECK(sv.predicted_class == 0);
    CHECK(sv.confidence == sv.scores[0]);
    CHECK(sv.method == Method::ml);
}

TEST_CASE("detection mode rescales by objectness") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01, Mode::detection);
    LogitRecord rec = record({0.5, 0.5, 9.0});
    rec.objectness = 0.5;
    const ScoreVector sv = ml_score(m, rec);
    CHECK(sv.scores[0] == doctest::Approx(0.7349397590361446 * 0.5).epsilon(1e-12));
    CHECK(sv.scores[1] == doctest::Approx(0.25301204819277107 * 0.5).epsilon(1e-12));
    CHECK(sv.scores[2] == doctest::Approx(0.012048192771084338 * 0.5).epsilon(1e-12));
    double total = 0.0;
    for (double s : sv.scores) total += s;
    CHECK(total == doctest::Approx(0.5).epsilon(1e-9));

    // Same record without objectness: argmax and ratios are unchanged.
    const ScoreVector plain = ml_score(m, record({0.5, 0.5, 9.0}));
    CHECK(plain.predicted_class == sv.predicted_class);
    CHECK(sv.scores[1] / sv.scores[0] ==
          doctest::Approx(plain.scores[1] / plain.scores[0]).epsilon(1e-12));
}

TEST_CASE("classification mode ignores objectness") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    LogitRecord rec = record({0.5, 0.5, 9.0});
    rec.objectness = 0.5;
    const ScoreVector sv = ml_score(m, rec);
    double total = 0.0;
    for (double s : sv.scores) total += s;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("map_score weighs lookups by the class prior at the test logit") {
    // Equal lookups 0.5; Gaussian peaks tuned so the priors at x=0.5 are
    // (0.4, 0.1, 0.1); with lambda 0 the posterior is (2/3, 1/6, 1/6).
    CalibrationModel m = stub_model({0.5, 0.5, 0.5}, 0.0);
    const double pi2 = 2.0 * 3.14159265358979323846;
    m.densities[0].mean = 0.5;
    m.densities[0].variance = 1.0 / (pi2 * 0.4 * 0.4);
    m.densities[1].mean = 0.5;
    m.densities[1].variance = 1.0 / (pi2 * 0.1 * 0.1);
    m.densities[2].mean = 0.5;
    m.densities[2].variance = 1.0 / (pi2 * 0.1 * 0.1);

    const ScoreVector sv = map_score(m, record({0.5, 0.5, 0.5}));
    CHECK(sv.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(sv.scores[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(sv.scores[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(sv.method == Method::map);
}

TEST_CASE("map_score reduces to smoothing when likelihoods vanish") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    const ScoreVector sv = map_score(m, record({9.0, 9.0, 9.0}));
    for (double s : sv.scores) CHECK(s == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("map equals ml when the prior is constant across classes") {
    std::mt19937_64 rng(23);
    CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.0);
    for (auto& d : m.densities) {
        d.mean = 1.3;
        d.variance = 4.0;
    }
    for (int i = 0; i < 200; ++i) {
        const double x = oracle::uniform(rng, 0.01, 1.99);
        const ScoreVector ml = ml_score(m, record({x, x, x}));
        const ScoreVector map = map_score(m, record({x, x, x}));
        for (int c = 0; c < 3; ++c) CHECK(std::abs(ml.scores[c] - map.scores[c]) <= 1e-12);
    }
}

TEST_CASE("positive smoothing keeps scores strictly inside (0, 1)") {
    std::mt19937_64 rng(41);
    const CalibrationModel m = stub_model({0.9, 0.05, 0.5}, 1e-9);
    for (int i = 0; i < 2000; ++i) {
        const LogitRecord rec =
            record({oracle::uniform(rng, -5.0, 7.0), oracle::uniform(rng, -5.0, 7.0),
                    oracle::uniform(rng, -5.0, 7.0)});
        for (const ScoreVector& sv : {ml_score(m, rec), map_score(m, rec)}) {
            for (double s : sv.scores) {
                CHECK(s > 0.0);
                CHECK(s < 1.0);
            }
        }
    }
}

TEST_CASE("raising a class's likelihood never lowers its ml score") {
    CalibrationModel lo = stub_model({0.3, 0.5, 0.2}, 0.01);
    CalibrationModel hi = stub_model({0.3, 0.5, 0.2}, 0.01);
    hi.densities[0].bin_mass = {0.45, 0.55}; // more mass in the looked-up bin
    const LogitRecord rec = record({0.5, 0.5, 0.5});
    CHECK(ml_score(hi, rec).scores[0] >= ml_score(lo, rec).scores[0]);
}

TEST_CASE("zero smoothing with no mass anywhere is an error") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.0);
    try {
        ml_score(m, record({9.0, 9.0, 9.0}));
        FAIL("expected all_zero_mass");
    } catch (const error& e) {
        CHECK(e.code() == errc::all_zero_mass);
    }
}

TEST_CASE("arity mismatches carry the sample id") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    LogitRecord rec = record({0.5, 0.5});
    rec.sample_id = "bad-sample";
    try {
        ml_score(m, rec);
        FAIL("expected model_arity_mismatch");
    } catch (const error& e) {
        CHECK(e.code() == errc::model_arity_mismatch);
        CHECK(std::string(e.what()).find("bad-sample") != std::string::npos);
    }
}

TEST_CASE("score_batch matches per-record calls and preserves order") {
    const CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    CHECK(score_batch(m, std::vector<LogitRecord>{}, Method::ml).empty());

    std::vector<LogitRecord> recs = {record({0.5, 9.0, 9.0}), record({9.0, 0.5, 9.0})};
    recs[0].sample_id = "a";
    recs[1].sample_id = "b";
    const auto batch = score_batch(m, recs, Method::ml);
    REQUIRE(batch.size() == 2);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const ScoreVector one = ml_score(m, recs[i]);
        CHECK(batch[i].scores == one.scores);
        CHECK(batch[i].predicted_class == one.predicted_class);
    }
}

TEST_CASE("detection batches scale every normalized method by objectness") {
    CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01, Mode::detection);
    m.temperature = 1.5;
    LogitRecord rec = record({0.5, 0.5, 9.0});
    rec.objectness = 0.7;
    const std::vector<LogitRecord> recs = {rec};
    for (Method method : {Method::softmax, Method::ml, Method::map, Method::ts}) {
        const auto batch = score_batch(m, recs, method);
        double total = 0.0;
        for (double s : batch[0].scores) total += s;
        CHECK(total == doctest::Approx(0.7).epsilon(1e-9));
    }
    // Per-class sigmoids stay independent and unscaled.
    const auto sig = score_batch(m, recs, Method::sigmoid);
    CHECK(sig[0].scores[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-12));
}

TEST_CASE("score_batch with ts needs a fitted temperature") {
    CalibrationModel m = stub_model({0.6, 0.2, 0.4}, 0.01);
    const std::vector<LogitRecord> recs = {record({0.5, 0.5, 0.5})};
    CHECK_THROWS_AS(score_batch(m, recs, Method::ts), error);
    m.temperature = 2.0;
    const auto batch = score_batch(m, recs, Method::ts);
    CHECK(batch[0].method == Method::ts);
}
