#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vocatree/common.hpp"

namespace vocatree {

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 16;
    int min_leaf = 1;
    int mtry = 0;  // 0 selects floor(sqrt(n_features))
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label leaf = Label::depressed;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    Label predict(const std::vector<double>& x) const {
        int at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const auto& nd = nodes[static_cast<std::size_t>(at)];
            at = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(at)].leaf;
    }
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    double oob_accuracy = 0.0;
    std::size_t oob_counted = 0;

    // Majority over trees; an exact tie stays on the depressed side.
    Label predict(const std::vector<double>& x) const {
        int score = 0;
        for (const auto& t : trees) score += label_sign(t.predict(x));
        return score > 0 ? Label::healthy : Label::depressed;
    }
};

namespace detail {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
    bool valid = false;
};

inline double gini_pair(double n_pos, double n_neg) {
    const double n = n_pos + n_neg;
    if (n <= 0.0) return 0.0;
    const double p = n_pos / n;
    const double q = n_neg / n;
    return 1.0 - p * p - q * q;
}

// Weighted child impurity of the best threshold on one feature, or invalid if
// the feature is constant over the node or no split respects min_leaf.
inline SplitChoice best_split_on_feature(const std::vector<std::vector<double>>& x,
                                         const std::vector<Label>& y,
                                         const std::vector<std::size_t>& rows, int feature,
                                         int min_leaf) {
    std::vector<std::pair<double, int>> vals;  // (value, label sign)
    vals.reserve(rows.size());
    for (std::size_t r : rows) {
        vals.emplace_back(x[r][static_cast<std::size_t>(feature)], label_sign(y[r]));
    }
    std::sort(vals.begin(), vals.end());
    SplitChoice choice;
    choice.feature = feature;
    double left_pos = 0.0, left_neg = 0.0;
    double total_pos = 0.0, total_neg = 0.0;
    for (const auto& v : vals) {
        (v.second > 0 ? total_pos : total_neg) += 1.0;
    }
    const double n = static_cast<double>(vals.size());
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        (vals[i].second > 0 ? left_pos : left_neg) += 1.0;
        if (vals[i].first == vals[i + 1].first) continue;
        const double left_n = static_cast<double>(i + 1);
        const double right_n = n - left_n;
        if (left_n < min_leaf || right_n < min_leaf) continue;
        const double impurity =
            (left_n / n) * gini_pair(left_pos, left_neg) +
            (right_n / n) * gini_pair(total_pos - left_pos, total_neg - left_neg);
        if (!choice.valid || impurity < choice.impurity) {
            choice.valid = true;
            choice.impurity = impurity;
            choice.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
    }
    return choice;
}

inline Label majority_label(const std::vector<Label>& y, const std::vector<std::size_t>& rows) {
    int score = 0;
    for (std::size_t r : rows) score += label_sign(y[r]);
    return score > 0 ? Label::healthy : Label::depressed;
}

inline int grow_tree(DecisionTree& tree, const std::vector<std::vector<double>>& x,
                     const std::vector<Label>& y, std::vector<std::size_t> rows, int depth,
                     const ForestConfig& cfg, int mtry, Rng& rng) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    bool pure = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (y[rows[i]] != y[rows[0]]) {
            pure = false;
            break;
        }
    }
    const std::size_t d = x.front().size();
    if (pure || depth >= cfg.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(cfg.min_leaf)) {
        tree.nodes[static_cast<std::size_t>(node_id)].leaf = majority_label(y, rows);
        return node_id;
    }

    // Draw mtry candidate features without replacement; if none of them admits
    // a split, fall back to scanning the remaining features.
    std::vector<int> features(d);
    for (std::size_t f = 0; f < d; ++f) features[f] = static_cast<int>(f);
    for (int i = 0; i < mtry; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + rng.below(d - static_cast<std::size_t>(i));
        std::swap(features[static_cast<std::size_t>(i)], features[j]);
    }
    SplitChoice best;
    for (std::size_t fi = 0; fi < d; ++fi) {
        if (fi == static_cast<std::size_t>(mtry) && best.valid) break;
        const auto cand = best_split_on_feature(x, y, rows, features[fi], cfg.min_leaf);
        if (!cand.valid) continue;
        if (!best.valid || cand.impurity < best.impurity ||
            (cand.impurity == best.impurity && cand.feature < best.feature)) {
            best = cand;
        }
    }
    if (!best.valid) {
        tree.nodes[static_cast<std::size_t>(node_id)].leaf = majority_label(y, rows);
        return node_id;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        if (x[r][static_cast<std::size_t>(best.feature)] <= best.threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    rows.clear();
    rows.shrink_to_fit();
    tree.nodes[static_cast<std::size_t>(node_id)].feature = best.feature;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = best.threshold;
    const int left_id = grow_tree(tree, x, y, std::move(left_rows), depth + 1, cfg, mtry, rng);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
    const int right_id = grow_tree(tree, x, y, std::move(right_rows), depth + 1, cfg, mtry, rng);
    tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;
    return node_id;
}

}  // namespace detail

// Bagged Gini trees over bootstrap resamples. Each tree's randomness derives
// from mix_seed(seed, tree_index), so results do not depend on build order.
inline ForestModel forest_train(const std::vector<std::vector<double>>& x,
                                const std::vector<Label>& y, const ForestConfig& cfg = {}) {
    if (x.empty()) throw EmptyInputError("forest: empty training set");
    if (x.size() != y.size()) throw ShapeError("forest: feature/label size mismatch");
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    for (const auto& row : x) {
        if (row.size() != d) throw ShapeError("forest: ragged feature matrix");
    }
    bool has_pos = false, has_neg = false;
    for (Label l : y) {
        (l == Label::healthy ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw SingleClassError("forest: one class absent");
    if (cfg.n_trees < 1) throw ValidationError("forest: n_trees must be >= 1");
    if (cfg.min_leaf < 1) throw ValidationError("forest: min_leaf must be >= 1");

    int mtry = cfg.mtry;
    if (mtry <= 0) mtry = static_cast<int>(std::sqrt(static_cast<double>(d)));
    mtry = std::clamp(mtry, 1, static_cast<int>(d));

    ForestModel model;
    model.trees.resize(static_cast<std::size_t>(cfg.n_trees));
    std::vector<std::vector<char>> in_bag(static_cast<std::size_t>(cfg.n_trees),
                                          std::vector<char>(n, 0));
    parallel_for_indexed(static_cast<std::size_t>(cfg.n_trees), [&](std::size_t t) {
        Rng rng(mix_seed(cfg.seed, t));
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pick = rng.below(n);
            rows[i] = pick;
            in_bag[t][pick] = 1;
        }
        detail::grow_tree(model.trees[t], x, y, std::move(rows), 0, cfg, mtry, rng);
    });

    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int score = 0;
        bool any = false;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            if (in_bag[t][i]) continue;
            any = true;
            score += label_sign(model.trees[t].predict(x[i]));
        }
        if (!any) continue;
        const Label pred = score > 0 ? Label::healthy : Label::depressed;
        ++model.oob_counted;
        if (pred == y[i]) ++correct;
    }
    model.oob_accuracy = model.oob_counted > 0
                             ? static_cast<double>(correct) /
                                   static_cast<double>(model.oob_counted)
                             : 0.0;
    return model;
}

}  // namespace vocatree
