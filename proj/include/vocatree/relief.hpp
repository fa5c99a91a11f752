#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vocatree/common.hpp"

namespace vocatree {

struct ReliefConfig {
    int k_neighbors = 10;
    // 0 means every instance is used once, in index order (no randomness).
    int sample_count = 0;
    std::uint64_t seed = 0;
};

struct ReliefResult {
    std::vector<double> weights;
    int k_used = 0;
    bool k_clamped = false;
};

namespace detail {

inline std::vector<double> feature_ranges(const std::vector<std::vector<double>>& x) {
    const std::size_t d = x.front().size();
    std::vector<double> lo(d, x[0][0]), hi(d, x[0][0]);
    for (std::size_t f = 0; f < d; ++f) {
        lo[f] = hi[f] = x[0][f];
    }
    for (const auto& row : x) {
        for (std::size_t f = 0; f < d; ++f) {
            lo[f] = std::min(lo[f], row[f]);
            hi[f] = std::max(hi[f], row[f]);
        }
    }
    std::vector<double> range(d);
    for (std::size_t f = 0; f < d; ++f) range[f] = hi[f] - lo[f];
    return range;
}

// Per-feature difference normalized to [0, 1]; constant features contribute 0.
inline double relief_diff(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& range, std::size_t f) {
    if (range[f] <= 0.0) return 0.0;
    return std::abs(a[f] - b[f]) / range[f];
}

}  // namespace detail

// Binary Relief-F: instances reward features that agree with nearest same-class
// neighbors (hits) and differ from nearest other-class neighbors (misses).
// Distances are Manhattan over range-normalized features; neighbor order is
// deterministic (distance, then index).
inline ReliefResult relieff_weights(const std::vector<std::vector<double>>& x,
                                    const std::vector<Label>& y,
                                    const ReliefConfig& cfg = {}) {
    if (x.empty()) throw EmptyInputError("relief: empty dataset");
    if (x.size() != y.size()) throw ShapeError("relief: feature/label size mismatch");
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    for (const auto& row : x) {
        if (row.size() != d) throw ShapeError("relief: ragged feature matrix");
    }
    if (cfg.k_neighbors < 1) throw ValidationError("relief: k_neighbors must be >= 1");

    std::size_t n_pos = 0;
    for (Label l : y) {
        if (l == Label::healthy) ++n_pos;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw SingleClassError("relief: one class absent");

    const std::size_t min_class = std::min(n_pos, n_neg);
    ReliefResult result;
    result.k_used = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(cfg.k_neighbors), min_class - 1));
    result.k_clamped = result.k_used < cfg.k_neighbors;
    result.weights.assign(d, 0.0);

    const auto range = detail::feature_ranges(x);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::size_t m = n;
    if (cfg.sample_count > 0 && static_cast<std::size_t>(cfg.sample_count) < n) {
        Rng rng(cfg.seed);
        rng.shuffle(order);
        m = static_cast<std::size_t>(cfg.sample_count);
        order.resize(m);
        std::sort(order.begin(), order.end());
    }
    if (result.k_used == 0) return result;  // a class has a single member
    const std::size_t k = static_cast<std::size_t>(result.k_used);

    std::vector<std::pair<double, std::size_t>> hits, misses;
    hits.reserve(n);
    misses.reserve(n);
    for (std::size_t idx = 0; idx < m; ++idx) {
        const std::size_t i = order[idx];
        hits.clear();
        misses.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double dist = 0.0;
            for (std::size_t f = 0; f < d; ++f) {
                dist += detail::relief_diff(x[i], x[j], range, f);
            }
            if (y[j] == y[i]) {
                hits.emplace_back(dist, j);
            } else {
                misses.emplace_back(dist, j);
            }
        }
        std::sort(hits.begin(), hits.end());
        std::sort(misses.begin(), misses.end());
        for (std::size_t f = 0; f < d; ++f) {
            double hit_sum = 0.0, miss_sum = 0.0;
            for (std::size_t r = 0; r < k; ++r) {
                hit_sum += detail::relief_diff(x[i], x[hits[r].second], range, f);
                miss_sum += detail::relief_diff(x[i], x[misses[r].second], range, f);
            }
            result.weights[f] -= hit_sum / static_cast<double>(k) / static_cast<double>(m);
            result.weights[f] += miss_sum / static_cast<double>(k) / static_cast<double>(m);
        }
    }
    return result;
}

struct SelectionResult {
    // Feature indices in descending weight order (ties: lower index first).
    std::vector<int> indices;
    bool underfull = false;
};

inline SelectionResult select_features(const std::vector<double>& weights, int top_n,
                                       std::optional<double> min_weight = std::nullopt) {
    if (top_n < 1) throw ValidationError("select_features: top_n must be >= 1");
    std::vector<int> idx;
    idx.reserve(weights.size());
    for (int f = 0; f < static_cast<int>(weights.size()); ++f) {
        if (!min_weight || weights[f] >= *min_weight) idx.push_back(f);
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return weights[a] > weights[b]; });
    SelectionResult out;
    if (idx.size() > static_cast<std::size_t>(top_n)) {
        idx.resize(static_cast<std::size_t>(top_n));
    } else if (idx.size() < static_cast<std::size_t>(top_n)) {
        out.underfull = true;
    }
    out.indices = std::move(idx);
    return out;
}

// Projects rows onto the selected columns, preserving selection order.
inline std::vector<std::vector<double>> project_features(
    const std::vector<std::vector<double>>& x, const std::vector<int>& indices) {
    std::vector<std::vector<double>> out;
    out.reserve(x.size());
    for (const auto& row : x) {
        std::vector<double> r;
        r.reserve(indices.size());
        for (int f : indices) {
            if (f < 0 || static_cast<std::size_t>(f) >= row.size()) {
                throw ShapeError("project_features: index out of range");
            }
            r.push_back(row[static_cast<std::size_t>(f)]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace vocatree
