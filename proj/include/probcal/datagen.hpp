#pragma once

// Seeded synthetic logit generator. Produces diagonal-Gaussian logit clusters
// per class with train/validation/test splits interleaved at 60/15/25, plus
// an optional unlabeled out-of-distribution cluster. Draws go through an
// explicit Box-Muller transform over mt19937_64 words so the byte stream is
// identical on every platform.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "probcal/errors.hpp"
#include "probcal/types.hpp"

namespace probcal {

struct ClassCluster {
    std::vector<double> mean;   // length nc
    std::vector<double> stddev; // length nc, all > 0
    std::int64_t count = 0;
};

struct GeneratorSpec {
    int num_classes = 0;
    std::vector<ClassCluster> per_class; // one cluster per class
    std::optional<ClassCluster> unseen;
    std::uint64_t seed = 0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
}

inline double standard_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng); // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Smooth weighted round-robin over train/validation/test; every prefix stays
// within one sample of the 60/15/25 targets.
class SplitSchedule {
public:
    Split next() {
        static constexpr double targets[3] = {0.60, 0.15, 0.25};
        static constexpr Split splits[3] = {Split::train, Split::validation, Split::test};
        ++total_;
        int pick = 0;
        double best = -1.0;
        for (int s = 0; s < 3; ++s) {
            const double deficit = targets[s] * total_ - assigned_[s];
            if (deficit > best) {
                best = deficit;
                pick = s;
            }
        }
        assigned_[pick] += 1;
        return splits[pick];
    }

private:
    std::int64_t total_ = 0;
    std::int64_t assigned_[3] = {0, 0, 0};
};

inline void check_cluster(const ClassCluster& c, int nc, const std::string& what) {
    require(c.count >= 0, errc::invalid_spec, what + ": negative count");
    require(static_cast<int>(c.mean.size()) == nc && static_cast<int>(c.stddev.size()) == nc,
            errc::invalid_spec, what + ": mean/stddev length must equal the class count");
    for (double m : c.mean)
        require(std::isfinite(m), errc::invalid_spec, what + ": non-finite mean");
    for (double s : c.stddev)
        require(std::isfinite(s) && s > 0.0, errc::invalid_spec, what + ": stddev must be > 0");
}

} // namespace detail

inline std::vector<LogitRecord> generate(const GeneratorSpec& spec) {
    require(spec.num_classes >= 1, errc::invalid_spec, "generator: need at least one class");
    require(static_cast<int>(spec.per_class.size()) == spec.num_classes, errc::invalid_spec,
            "generator: per_class must have one cluster per class");
    for (int i = 0; i < spec.num_classes; ++i)
        detail::check_cluster(spec.per_class[i], spec.num_classes,
                              "generator class " + std::to_string(i));
    if (spec.unseen) detail::check_cluster(*spec.unseen, spec.num_classes, "generator unseen");

    std::mt19937_64 rng(spec.seed);
    std::vector<LogitRecord> records;

    auto draw = [&](const ClassCluster& c) {
        std::vector<double> logits(spec.num_classes);
        for (int j = 0; j < spec.num_classes; ++j)
            logits[j] = c.mean[j] + c.stddev[j] * detail::standard_normal(rng);
        return logits;
    };

    for (int i = 0; i < spec.num_classes; ++i) {
        const ClassCluster& c = spec.per_class[i];
        detail::SplitSchedule schedule;
        for (std::int64_t k = 0; k < c.count; ++k) {
            LogitRecord rec;
            rec.sample_id = "c" + std::to_string(i) + "-" + std::to_string(k);
            rec.logits = draw(c);
            rec.true_label = i;
            rec.split = schedule.next();
            records.push_back(std::move(rec));
        }
    }
    if (spec.unseen) {
        for (std::int64_t k = 0; k < spec.unseen->count; ++k) {
            LogitRecord rec;
            rec.sample_id = "u-" + std::to_string(k);
            rec.logits = draw(*spec.unseen);
            rec.split = Split::unseen;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

// Desk-scale reproduction of the failure mode this toolkit targets: a
// classifier whose softmax is near-certain almost everywhere. Per class the
// bulk of the samples keeps its own logit near +10 (spread 2) with rivals
// resting 8 own-stddevs lower. A block of hard samples has rival logits
// drifting upward with a wide spread, so the true class is genuinely
// uncertain there while softmax gaps stay large in absolute terms. A few
// outliers per class stretch the own-logit tails far beyond the Gaussian
// summary of the class. The unlabeled cluster sits at the corner point
// equidistant from every class mean, so no trained class dominates it.
inline std::vector<LogitRecord> make_overconfident_scenario(std::uint64_t seed) {
    constexpr int nc = 3;
    constexpr std::int64_t main_count = 5140;
    constexpr std::int64_t hard_count = 1300;
    constexpr std::int64_t outlier_count = 60;
    constexpr std::int64_t unseen_count = 2500;
    constexpr double high = 10.0;
    constexpr double low = -6.0;

    auto one_hot = [](int hot, double hot_value, double rest) {
        std::vector<double> m(nc, rest);
        m[hot] = hot_value;
        return m;
    };

    GeneratorSpec main_spec;
    main_spec.num_classes = nc;
    main_spec.seed = seed;
    for (int i = 0; i < nc; ++i)
        main_spec.per_class.push_back({one_hot(i, high, low), one_hot(i, 2.0, 1.0), main_count});
    main_spec.unseen = ClassCluster{std::vector<double>(nc, low),
                                    std::vector<double>(nc, 8.0), unseen_count};

    // Hard samples: rivals drift up toward the decision boundary.
    GeneratorSpec hard_spec;
    hard_spec.num_classes = nc;
    hard_spec.seed = seed + 1;
    for (int i = 0; i < nc; ++i)
        hard_spec.per_class.push_back(
            {one_hot(i, high, -1.0), one_hot(i, 2.0, 7.0), hard_count});

    // Rare own-logit excursions; they widen the histogram support without
    // moving the class mean.
    GeneratorSpec outlier_spec;
    outlier_spec.num_classes = nc;
    outlier_spec.seed = seed + 2;
    for (int i = 0; i < nc; ++i)
        outlier_spec.per_class.push_back(
            {one_hot(i, high, low), one_hot(i, 7.0, 1.0), outlier_count});

    std::vector<LogitRecord> records = generate(main_spec);
    for (LogitRecord rec : generate(hard_spec)) {
        rec.sample_id = "h-" + rec.sample_id;
        records.push_back(std::move(rec));
    }
    for (LogitRecord rec : generate(outlier_spec)) {
        rec.sample_id = "x-" + rec.sample_id;
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace probcal
