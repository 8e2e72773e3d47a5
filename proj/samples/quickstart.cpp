// Minimal end-to-end use of the library: generate an overconfident synthetic
// set, fit the density model, and compare softmax against ML/MAP on the
// trained-class test split and on out-of-distribution samples.

#include <iostream>
#include <vector>

#include <probcal/probcal.hpp>

using namespace probcal;

int main() {
    const auto records = make_overconfident_scenario(7);

    std::vector<LogitRecord> train, test, unseen;
    for (const auto& rec : records) {
        if (rec.split == Split::train) train.push_back(rec);
        else if (rec.split == Split::test) test.push_back(rec);
        else if (rec.split == Split::unseen) unseen.push_back(rec);
    }

    const CalibrationModel model =
        fit_model(train, 25, 3e-6, {"car", "pedestrian", "cyclist"});

    for (Method method : {Method::softmax, Method::ml, Method::map}) {
        const auto test_scores = score_batch(model, test, method);
        const auto unseen_scores = score_batch(model, unseen, method);

        std::vector<LabeledScore> labeled;
        labeled.reserve(test_scores.size());
        for (std::size_t i = 0; i < test_scores.size(); ++i)
            labeled.push_back({test_scores[i], *test[i].true_label});

        const ReliabilityReport rel = reliability(labeled, 15);
        const ScoreStats ood = unseen_stats(unseen_scores);
        std::cout << to_string(method) << ": fscore " << macro_fscore(labeled) << ", ece "
                  << rel.ece << ", mce " << rel.mce << ", unseen mean confidence " << ood.mean
                  << "\n";
    }
    return 0;
}
