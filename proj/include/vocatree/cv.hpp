#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "vocatree/common.hpp"

namespace vocatree {

// Assigns a fold id to every item. Items sharing a label are dealt round-robin
// across folds, walking that label's strata (e.g. genders) in fixed order with
// members shuffled inside each stratum; the round-robin counter continues
// across strata, so per-fold label counts differ by at most one while strata
// stay spread out.
inline std::vector<int> stratified_folds(const std::vector<Label>& labels,
                                         const std::vector<int>& strata, int n_folds,
                                         Rng& rng) {
    if (n_folds < 2) throw ValidationError("folds: n_folds must be >= 2");
    if (labels.size() != strata.size()) throw ShapeError("folds: labels/strata mismatch");
    const std::size_t n = labels.size();
    std::vector<int> fold_of(n, -1);

    for (Label cls : {Label::healthy, Label::depressed}) {
        std::map<int, std::vector<std::size_t>> by_stratum;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == cls) by_stratum[strata[i]].push_back(i);
        }
        std::size_t counter = 0;
        for (auto& [stratum, members] : by_stratum) {
            rng.shuffle(members);
            for (std::size_t idx : members) {
                fold_of[idx] = static_cast<int>(counter % static_cast<std::size_t>(n_folds));
                ++counter;
            }
        }
    }
    return fold_of;
}

inline std::vector<int> stratified_folds(const std::vector<Label>& labels, int n_folds,
                                         Rng& rng) {
    return stratified_folds(labels, std::vector<int>(labels.size(), 0), n_folds, rng);
}

inline std::pair<std::size_t, std::size_t> class_counts(const std::vector<Label>& labels) {
    std::size_t healthy = 0, depressed = 0;
    for (Label l : labels) {
        (l == Label::healthy ? healthy : depressed) += 1;
    }
    return {healthy, depressed};
}

}  // namespace vocatree
