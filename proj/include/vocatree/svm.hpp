#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "vocatree/common.hpp"

namespace vocatree {

struct SvmConfig {
    double c = 1.0;
    double tol = 1e-3;
    int max_passes = 2000;  // budget of full sweeps that made an update
};

struct SvmModel {
    std::vector<double> feature_mean;
    std::vector<double> feature_std;
    std::vector<double> weights;  // in standardized feature space
    double bias = 0.0;
    std::vector<double> alpha;
    double c = 1.0;
    double tol = 1e-3;
    bool converged = true;

    double decision(const std::vector<double>& x) const {
        if (x.size() != weights.size()) throw ShapeError("svm: feature size mismatch");
        double acc = bias;
        for (std::size_t f = 0; f < x.size(); ++f) {
            acc += weights[f] * (x[f] - feature_mean[f]) / feature_std[f];
        }
        return acc;
    }

    // Zero lands on the depressed side: a borderline case is flagged, not cleared.
    Label predict(const std::vector<double>& x) const {
        return decision(x) > 0.0 ? Label::healthy : Label::depressed;
    }
};

namespace detail {

struct Standardized {
    std::vector<std::vector<double>> x;
    std::vector<double> mean;
    std::vector<double> std_dev;
};

inline Standardized standardize(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    Standardized out;
    out.mean.assign(d, 0.0);
    out.std_dev.assign(d, 0.0);
    for (const auto& row : x) {
        for (std::size_t f = 0; f < d; ++f) out.mean[f] += row[f];
    }
    for (std::size_t f = 0; f < d; ++f) out.mean[f] /= static_cast<double>(n);
    for (const auto& row : x) {
        for (std::size_t f = 0; f < d; ++f) {
            const double c = row[f] - out.mean[f];
            out.std_dev[f] += c * c;
        }
    }
    for (std::size_t f = 0; f < d; ++f) {
        out.std_dev[f] = std::sqrt(out.std_dev[f] / static_cast<double>(n));
        if (out.std_dev[f] <= 0.0) out.std_dev[f] = 1.0;
    }
    out.x.reserve(n);
    for (const auto& row : x) {
        std::vector<double> r(d);
        for (std::size_t f = 0; f < d; ++f) r[f] = (row[f] - out.mean[f]) / out.std_dev[f];
        out.x.push_back(std::move(r));
    }
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail

// Sequential minimal optimization for the soft-margin linear max-margin
// classifier. The weight vector is maintained incrementally so error terms
// stay O(d). The pair partner is the deterministic argmax of |E_i - E_j|.
inline SvmModel svm_train(const std::vector<std::vector<double>>& x,
                          const std::vector<Label>& y, const SvmConfig& cfg = {}) {
    if (x.empty()) throw EmptyInputError("svm: empty training set");
    if (x.size() != y.size()) throw ShapeError("svm: feature/label size mismatch");
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    for (const auto& row : x) {
        if (row.size() != d) throw ShapeError("svm: ragged feature matrix");
    }
    bool has_pos = false, has_neg = false;
    for (Label l : y) {
        (l == Label::healthy ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw SingleClassError("svm: one class absent");
    if (cfg.c <= 0.0) throw ValidationError("svm: c must be positive");

    auto std_data = detail::standardize(x);
    const auto& xs = std_data.x;
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = label_sign(y[i]);

    SvmModel model;
    model.feature_mean = std_data.mean;
    model.feature_std = std_data.std_dev;
    model.alpha.assign(n, 0.0);
    model.c = cfg.c;
    model.tol = cfg.tol;
    std::vector<double> w(d, 0.0);
    double b = 0.0;

    auto error_of = [&](std::size_t i) { return detail::dot(w, xs[i]) + b - ys[i]; };

    auto try_step = [&](std::size_t i, std::size_t j) -> bool {
        if (i == j) return false;
        const double e_i = error_of(i);
        const double e_j = error_of(j);
        const double a_i_old = model.alpha[i];
        const double a_j_old = model.alpha[j];
        double lo, hi;
        if (ys[i] != ys[j]) {
            lo = std::max(0.0, a_j_old - a_i_old);
            hi = std::min(cfg.c, cfg.c + a_j_old - a_i_old);
        } else {
            lo = std::max(0.0, a_i_old + a_j_old - cfg.c);
            hi = std::min(cfg.c, a_i_old + a_j_old);
        }
        if (lo >= hi) return false;
        const double k_ii = detail::dot(xs[i], xs[i]);
        const double k_jj = detail::dot(xs[j], xs[j]);
        const double k_ij = detail::dot(xs[i], xs[j]);
        const double eta = 2.0 * k_ij - k_ii - k_jj;
        if (eta >= 0.0) return false;
        double a_j = a_j_old - ys[j] * (e_i - e_j) / eta;
        a_j = std::clamp(a_j, lo, hi);
        if (std::abs(a_j - a_j_old) < 1e-7) return false;
        const double a_i = a_i_old + ys[i] * ys[j] * (a_j_old - a_j);
        const double b1 = b - e_i - ys[i] * (a_i - a_i_old) * k_ii -
                          ys[j] * (a_j - a_j_old) * k_ij;
        const double b2 = b - e_j - ys[i] * (a_i - a_i_old) * k_ij -
                          ys[j] * (a_j - a_j_old) * k_jj;
        if (a_i > 0.0 && a_i < cfg.c) {
            b = b1;
        } else if (a_j > 0.0 && a_j < cfg.c) {
            b = b2;
        } else {
            b = 0.5 * (b1 + b2);
        }
        for (std::size_t f = 0; f < d; ++f) {
            w[f] += ys[i] * (a_i - a_i_old) * xs[i][f] + ys[j] * (a_j - a_j_old) * xs[j][f];
        }
        model.alpha[i] = a_i;
        model.alpha[j] = a_j;
        return true;
    };

    int passes = 0;
    while (passes < cfg.max_passes) {
        int changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e_i = error_of(i);
            const double r = e_i * ys[i];
            const bool violates = (r < -cfg.tol && model.alpha[i] < cfg.c) ||
                                  (r > cfg.tol && model.alpha[i] > 0.0);
            if (!violates) continue;
            std::size_t best_j = n;
            double best_gap = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double gap = std::abs(e_i - error_of(j));
                if (gap > best_gap) {
                    best_gap = gap;
                    best_j = j;
                }
            }
            if (best_j < n && try_step(i, best_j)) {
                ++changed;
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (try_step(i, j)) {
                    ++changed;
                    break;
                }
            }
        }
        if (changed == 0) break;
        ++passes;
    }
    model.converged = passes < cfg.max_passes;

    // Recompute the bias from free support vectors when any exist; otherwise
    // center it between the innermost points of the two classes.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (model.alpha[i] > 1e-9 && model.alpha[i] < cfg.c - 1e-9) {
            free_sum += ys[i] - detail::dot(w, xs[i]);
            ++free_count;
        }
    }
    if (free_count > 0) {
        b = free_sum / static_cast<double>(free_count);
    } else {
        double max_neg = -std::numeric_limits<double>::infinity();
        double min_pos = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = detail::dot(w, xs[i]);
            if (ys[i] > 0.0) {
                min_pos = std::min(min_pos, s);
            } else {
                max_neg = std::max(max_neg, s);
            }
        }
        b = -0.5 * (min_pos + max_neg);
    }
    model.weights = std::move(w);
    model.bias = b;
    return model;
}

// Maximum violation of the optimality conditions over the training set;
// small values certify the solver actually converged.
inline double svm_kkt_violation(const SvmModel& model,
                                const std::vector<std::vector<double>>& x,
                                const std::vector<Label>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double margin = label_sign(y[i]) * model.decision(x[i]);
        const double a = model.alpha[i];
        double violation = 0.0;
        if (a <= 1e-9) {
            violation = std::max(0.0, 1.0 - margin);
        } else if (a >= model.c - 1e-9) {
            violation = std::max(0.0, margin - 1.0);
        } else {
            violation = std::abs(margin - 1.0);
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

}  // namespace vocatree
