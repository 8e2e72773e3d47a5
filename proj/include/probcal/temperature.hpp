#pragma once

// Temperature-scaling baseline: divide every logit by a single scalar before
// the softmax, with the scalar chosen to minimize negative log-likelihood on
// a labeled validation split.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "probcal/errors.hpp"
#include "probcal/inference.hpp"
#include "probcal/types.hpp"

namespace probcal {

struct TemperatureModel {
    double ts = 1.0;
};

struct TemperatureSearch {
    double lo = 0.05;
    double hi = 20.0;
    double tol = 1e-4;
};

inline ScoreVector apply_temperature(std::span<const double> logits, double ts) {
    require(std::isfinite(ts) && ts > 0.0, errc::non_positive_temperature,
            "temperature must be finite and positive");
    std::vector<double> scaled(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) scaled[i] = logits[i] / ts;
    ScoreVector sv = softmax(scaled);
    sv.method = Method::ts;
    return sv;
}

inline double temperature_nll(std::span<const LogitRecord> records, double ts) {
    require(std::isfinite(ts) && ts > 0.0, errc::non_positive_temperature,
            "temperature must be finite and positive");
    double nll = 0.0;
    std::vector<double> w;
    for (const LogitRecord& rec : records) {
        require(rec.true_label.has_value(), errc::missing_label,
                "temperature fit: unlabeled record '" + rec.sample_id + "'");
        const int label = *rec.true_label;
        require(label >= 0 && label < static_cast<int>(rec.logits.size()),
                errc::label_out_of_range,
                "temperature fit: record '" + rec.sample_id + "' has an out-of-range label");
        w.resize(rec.logits.size());
        double m = rec.logits[0] / ts;
        for (std::size_t i = 0; i < rec.logits.size(); ++i) {
            w[i] = rec.logits[i] / ts;
            m = std::max(m, w[i]);
        }
        double lse = 0.0;
        for (double v : w) lse += std::exp(v - m);
        nll += std::log(lse) - (w[label] - m);
    }
    return nll;
}

namespace detail {

inline double golden_section_min(const std::function<double(double)>& f, double a, double b,
                                 double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

// Golden-section search over [lo, hi]. The NLL is unimodal in the temperature
// for realistic inputs; if the endpoint slopes indicate an interior maximum
// instead, a 400-point grid scan picks the bracket first. The result competes
// against both bounds and ts = 1, with ties going to those fixed points, so a
// monotone objective reports the bound exactly and the fit never loses to the
// identity temperature.
inline TemperatureModel fit_temperature(std::span<const LogitRecord> validation,
                                        TemperatureSearch search = {}) {
    require(!validation.empty(), errc::empty_input, "temperature fit: empty validation set");
    require(search.lo > 0.0 && search.hi > search.lo, errc::invalid_config,
            "temperature fit: bad search bounds");

    auto nll = [&](double ts) { return temperature_nll(validation, ts); };

    const double h = search.tol;
    const bool rising_at_lo = nll(search.lo + h) > nll(search.lo);
    const bool falling_at_hi = nll(search.hi) < nll(search.hi - h);
    double cand;
    if (rising_at_lo && falling_at_hi) {
        // Endpoints disagree with a bracketed minimum; scan, then refine.
        const int points = 400;
        double best_x = search.lo;
        double best_f = nll(search.lo);
        for (int k = 1; k < points; ++k) {
            const double x = search.lo + (search.hi - search.lo) * k / (points - 1);
            const double fx = nll(x);
            if (fx < best_f) {
                best_f = fx;
                best_x = x;
            }
        }
        const double step = (search.hi - search.lo) / (points - 1);
        cand = detail::golden_section_min(nll, std::max(search.lo, best_x - step),
                                          std::min(search.hi, best_x + step), search.tol);
    } else {
        cand = detail::golden_section_min(nll, search.lo, search.hi, search.tol);
    }

    double best = search.lo;
    double best_f = nll(search.lo);
    auto consider = [&](double x) {
        if (x < search.lo || x > search.hi) return;
        const double fx = nll(x);
        if (fx < best_f) {
            best_f = fx;
            best = x;
        }
    };
    consider(search.hi);
    consider(1.0);
    consider(cand);
    return TemperatureModel{best};
}

} // namespace probcal
