#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include <probcal/datagen.hpp>
#include <probcal/model.hpp>

#include "oracles.hpp"

using namespace probcal;

namespace {

std::vector<LogitRecord> tiny_train_set() {
    // Three classes, three samples each, logit i high for class i.
    std::vector<LogitRecord> recs;
    const double highs[3] = {4.0, 5.0, 6.0};
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < 3; ++k) {
            LogitRecord r;
            r.sample_id = "t" + std::to_string(c * 3 + k);
            r.logits = {-1.0 + 0.1 * k, -1.5 + 0.1 * k, -2.0 + 0.1 * k};
            r.logits[c] = highs[c] + 0.3 * k;
            r.true_label = c;
            r.split = Split::train;
            recs.push_back(std::move(r));
        }
    }
    return recs;
}

} // namespace

TEST_CASE("fit_histogram splits an even range") {
    const std::vector<double> values = {0.0, 1.0, 2.0, 3.0};
    const Histogram h = fit_histogram(values, 2);
    REQUIRE(h.edges.size() == 3);
    CHECK(h.edges[0] == 0.0);
    CHECK(h.edges[1] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(h.edges[2] == 3.0);
    CHECK(h.mass[0] == 0.5);
    CHECK(h.mass[1] == 0.5);
}

TEST_CASE("fit_histogram counts by hand-enumerated bins") {
    const std::vector<double> values = {1.0, 1.0, 1.0, 5.0};
    const Histogram h = fit_histogram(values, 2);
    CHECK(h.edges == std::vector<double>{1.0, 3.0, 5.0});
    CHECK(h.mass[0] == 0.75);
    CHECK(h.mass[1] == 0.25);
}

TEST_CASE("fit_histogram rejects degenerate and empty input") {
    CHECK_THROWS_WITH_AS(fit_histogram(std::vector<double>{7.0}, 4),
                         doctest::Contains("zero-width"), error);
    try {
        fit_histogram(std::vector<double>{7.0, 7.0}, 2);
        FAIL("expected degenerate range error");
    } catch (const error& e) {
        CHECK(e.code() == errc::degenerate_range);
    }
    try {
        fit_histogram(std::vector<double>{}, 2);
        FAIL("expected empty input error");
    } catch (const error& e) {
        CHECK(e.code() == errc::empty_input);
    }
    CHECK_THROWS_AS(fit_histogram(std::vector<double>{1.0, 2.0}, 1), error);
}

TEST_CASE("fit_histogram is permutation invariant and normalized") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> values;
        const int n = 3 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) values.push_back(oracle::uniform(rng, -4.0, 9.0));
        const Histogram a = fit_histogram(values, 13);

        std::shuffle(values.begin(), values.end(), rng);
        const Histogram b = fit_histogram(values, 13);
        CHECK(a.edges == b.edges);
        CHECK(a.mass == b.mass);

        double total = 0.0;
        for (double m : a.mass) {
            CHECK(m >= 0.0);
            total += m;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("lookup_likelihood bin assignment") {
    ClassDensity d;
    d.bin_edges = {0.0, 1.0, 2.0};
    d.bin_mass = {0.6, 0.4};
    CHECK(lookup_likelihood(d, 0.5) == 0.6);
    CHECK(lookup_likelihood(d, 1.0) == 0.4); // interior edge goes right
    CHECK(lookup_likelihood(d, 9.0) == 0.0);
    CHECK(lookup_likelihood(d, 0.0) == 0.6);  // min edge opens the first bin
    CHECK(lookup_likelihood(d, 2.0) == 0.4);  // max edge folds into the last bin
    CHECK(lookup_likelihood(d, -0.1) == 0.0);
}

TEST_CASE("lookup returns each bin's own mass at a representative point") {
    std::mt19937_64 rng(77);
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) values.push_back(oracle::uniform(rng, 2.0, 11.0));
    const Histogram h = fit_histogram(values, 25);
    ClassDensity d;
    d.bin_edges = h.edges;
    d.bin_mass = h.mass;
    for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
        const double mid = 0.5 * (h.edges[k] + h.edges[k + 1]);
        CHECK(lookup_likelihood(d, mid) == h.mass[k]);
    }
}

TEST_CASE("fit_gaussian mean/variance and the variance floor") {
    const GaussianParams flat = fit_gaussian(std::vector<double>{2.0, 2.0, 2.0, 2.0});
    CHECK(flat.mean == 2.0);
    CHECK(flat.variance == doctest::Approx(4e-6).epsilon(1e-12));

    const GaussianParams two = fit_gaussian(std::vector<double>{0.0, 2.0});
    CHECK(two.mean == 1.0);
    CHECK(two.variance == 2.0);

    const GaussianParams single = fit_gaussian(std::vector<double>{-3.0});
    CHECK(single.mean == -3.0);
    CHECK(single.variance == doctest::Approx(9e-6).epsilon(1e-12));

    CHECK_THROWS_AS(fit_gaussian(std::vector<double>{}), error);
}

TEST_CASE("gaussian_pdf closed-form values") {
    CHECK(gaussian_pdf(0.0, 1.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(gaussian_pdf(0.0, 1.0, 1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-12));
    CHECK(gaussian_pdf(5.0, 4.0, 5.0) == doctest::Approx(0.19947114020071635).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_pdf(0.0, 0.0, 1.0), error);
    CHECK_THROWS_AS(gaussian_pdf(0.0, -1.0, 1.0), error);
}

TEST_CASE("gaussian_pdf is symmetric about the mean") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const double mean = oracle::uniform(rng, -10.0, 10.0);
        const double var = oracle::uniform(rng, 0.01, 25.0);
        const double d = oracle::uniform(rng, 0.0, 8.0);
        const double left = gaussian_pdf(mean, var, mean - d);
        const double right = gaussian_pdf(mean, var, mean + d);
        CHECK(std::abs(left - right) <= 1e-12);
    }
}

TEST_CASE("fit_model produces one normalized density per class") {
    const auto train = tiny_train_set();
    const CalibrationModel model = fit_model(train, 2, 0.01, {"a", "b", "c"});
    REQUIRE(model.densities.size() == 3);
    for (const auto& d : model.densities) {
        CHECK(d.sample_count == 3);
        double total = 0.0;
        for (double m : d.bin_mass) total += m;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("fit_model flags missing classes and labels") {
    auto train = tiny_train_set();
    std::erase_if(train, [](const LogitRecord& r) { return *r.true_label == 1; });
    try {
        fit_model(train, 2, 0.01, {"a", "b", "c"});
        FAIL("expected class_underpopulated");
    } catch (const error& e) {
        CHECK(e.code() == errc::class_underpopulated);
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }

    train = tiny_train_set();
    train[4].true_label.reset();
    try {
        fit_model(train, 2, 0.01, {"a", "b", "c"});
        FAIL("expected missing_label");
    } catch (const error& e) {
        CHECK(e.code() == errc::missing_label);
    }

    train = tiny_train_set();
    train[2].logits.push_back(0.0);
    CHECK_THROWS_AS(fit_model(train, 2, 0.01, {"a", "b", "c"}), error);
}

TEST_CASE("fitted histogram tracks the generating density") {
    // Gaussian logits per class; every fitted bin mass must sit within a
    // 3-sigma binomial band of the generating density's integral over it.
    std::mt19937_64 rng(2024);
    const int n = 20000;
    std::vector<LogitRecord> train;
    const double means[3] = {4.0, -1.0, 7.5};
    const double sds[3] = {1.0, 2.0, 0.5};
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < n; ++k) {
            LogitRecord r;
            r.sample_id = "m" + std::to_string(c) + "-" + std::to_string(k);
            r.logits = {0.0, 0.0, 0.0};
            for (int j = 0; j < 3; ++j)
                r.logits[j] = (j == c) ? means[c] + sds[c] * oracle::normal(rng)
                                       : -5.0 + oracle::normal(rng);
            r.true_label = c;
            r.split = Split::train;
            train.push_back(std::move(r));
        }
    }
    const CalibrationModel model = fit_model(train, 25, 1e-4, {"x", "y", "z"});
    for (int c = 0; c < 3; ++c) {
        const ClassDensity& d = model.densities[c];
        double coverage = oracle::normal_cdf(d.bin_edges.back(), means[c], sds[c]) -
                          oracle::normal_cdf(d.bin_edges.front(), means[c], sds[c]);
        for (int k = 0; k < 25; ++k) {
            const double p = (oracle::normal_cdf(d.bin_edges[k + 1], means[c], sds[c]) -
                              oracle::normal_cdf(d.bin_edges[k], means[c], sds[c])) /
                             coverage;
            const double tol = 3.0 * std::sqrt(p * (1.0 - p) / n) + 1e-12;
            CHECK(std::abs(d.bin_mass[k] - p) <= tol);
        }
    }
}

TEST_CASE("model serialization round-trips byte for byte") {
    const CalibrationModel model = fit_model(tiny_train_set(), 3, 2.5e-4, {"a", "b", "c"});
    const std::string once = serialize_model(model);
    const CalibrationModel back = parse_model(once);
    CHECK(serialize_model(back) == once);
    for (int c = 0; c < 3; ++c) {
        CHECK(back.densities[c].mean == model.densities[c].mean);
        CHECK(back.densities[c].variance == model.densities[c].variance);
        CHECK(back.densities[c].bin_edges == model.densities[c].bin_edges);
        CHECK(back.densities[c].bin_mass == model.densities[c].bin_mass);
    }
    CHECK(back.lambda == model.lambda);

    // Same input, same bytes.
    CHECK(serialize_model(fit_model(tiny_train_set(), 3, 2.5e-4, {"a", "b", "c"})) == once);
}

TEST_CASE("model with a fitted temperature keeps it through serialization") {
    CalibrationModel model = fit_model(tiny_train_set(), 2, 1e-4, {"a", "b", "c"});
    model.temperature = 1.31;
    const CalibrationModel back = parse_model(serialize_model(model));
    REQUIRE(back.temperature.has_value());
    CHECK(*back.temperature == 1.31);
}

TEST_CASE("check_model flags lambda zero but accepts it") {
    const CalibrationModel model = fit_model(tiny_train_set(), 2, 0.0, {"a", "b", "c"});
    const auto warnings = check_model(model);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("lambda = 0") != std::string::npos);
    CHECK(check_model(fit_model(tiny_train_set(), 2, 1e-7, {"a", "b", "c"})).empty());
}

TEST_CASE("parse_model rejects malformed input") {
    CHECK_THROWS_AS(parse_model("not json"), error);
    CHECK_THROWS_AS(parse_model("{\"format_version\": 1}"), error);
    CHECK_THROWS_AS(parse_model("{\"format_version\": 99}"), error);
}
