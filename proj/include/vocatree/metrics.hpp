#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vocatree/common.hpp"
#include "vocatree/cv.hpp"

namespace vocatree {

// Screening convention: depressed is the positive class. Sensitivity is the
// fraction of depressed subjects flagged; specificity the fraction of healthy
// subjects cleared.
struct ConfusionCounts {
    std::size_t tp = 0;  // depressed predicted depressed
    std::size_t tn = 0;  // healthy predicted healthy
    std::size_t fp = 0;  // healthy predicted depressed
    std::size_t fn = 0;  // depressed predicted healthy

    void add(Label truth, Label predicted) {
        if (truth == Label::depressed) {
            (predicted == Label::depressed ? tp : fn) += 1;
        } else {
            (predicted == Label::healthy ? tn : fp) += 1;
        }
    }
    void merge(const ConfusionCounts& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
    }
    std::size_t total() const { return tp + tn + fp + fn; }
    double accuracy() const {
        const std::size_t n = total();
        return n > 0 ? static_cast<double>(tp + tn) / static_cast<double>(n) : 0.0;
    }
    double sensitivity() const {
        const std::size_t n = tp + fn;
        return n > 0 ? static_cast<double>(tp) / static_cast<double>(n) : 0.0;
    }
    double specificity() const {
        const std::size_t n = tn + fp;
        return n > 0 ? static_cast<double>(tn) / static_cast<double>(n) : 0.0;
    }
};

struct SegmentMetrics {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    ConfusionCounts confusion;
    bool loo_used = false;
    bool constant_fold_seen = false;
};

// Cross-validated metric estimate for one training table. `fit` maps
// (X, y) to a model, `predict` maps (model, row) to a Label. Folds are
// stratified by label; when the smaller class has fewer members than
// n_folds, leave-one-out is used instead. A fold whose training half is
// single-class degenerates to a constant classifier that repeats the class
// it saw (flagged).
template <typename Fit, typename Predict>
SegmentMetrics cross_validated_metrics(const std::vector<std::vector<double>>& x,
                                       const std::vector<Label>& y, int n_folds,
                                       std::uint64_t seed, Fit&& fit, Predict&& predict) {
    if (x.empty()) throw EmptyInputError("metrics: empty dataset");
    if (x.size() != y.size()) throw ShapeError("metrics: feature/label size mismatch");
    const std::size_t n = x.size();
    const auto [n_healthy, n_depressed] = class_counts(y);
    if (n_healthy == 0 || n_depressed == 0) {
        throw SingleClassError("metrics: one class absent");
    }

    SegmentMetrics out;
    std::vector<int> fold_of(n);
    int folds_used = n_folds;
    if (std::min(n_healthy, n_depressed) < static_cast<std::size_t>(n_folds)) {
        out.loo_used = true;
        folds_used = static_cast<int>(n);
        for (std::size_t i = 0; i < n; ++i) fold_of[i] = static_cast<int>(i);
    } else {
        Rng rng(seed);
        fold_of = stratified_folds(y, n_folds, rng);
    }

    for (int fold = 0; fold < folds_used; ++fold) {
        std::vector<std::vector<double>> x_train;
        std::vector<Label> y_train;
        std::vector<std::size_t> test_rows;
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] == fold) {
                test_rows.push_back(i);
            } else {
                x_train.push_back(x[i]);
                y_train.push_back(y[i]);
            }
        }
        if (test_rows.empty()) continue;
        const auto [tr_healthy, tr_depressed] = class_counts(y_train);
        if (tr_healthy == 0 || tr_depressed == 0) {
            out.constant_fold_seen = true;
            const Label constant =
                tr_healthy > 0 ? Label::healthy : Label::depressed;
            for (std::size_t i : test_rows) out.confusion.add(y[i], constant);
            continue;
        }
        auto model = fit(x_train, y_train);
        for (std::size_t i : test_rows) out.confusion.add(y[i], predict(model, x[i]));
    }
    out.accuracy = out.confusion.accuracy();
    out.sensitivity = out.confusion.sensitivity();
    out.specificity = out.confusion.specificity();
    return out;
}

}  // namespace vocatree
