#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vocatree/common.hpp"
#include "vocatree/corpus.hpp"
#include "vocatree/cv.hpp"
#include "vocatree/features/assemble.hpp"
#include "vocatree/forest.hpp"
#include "vocatree/fusion.hpp"
#include "vocatree/metrics.hpp"
#include "vocatree/relief.hpp"
#include "vocatree/svm.hpp"

namespace vocatree {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Seed tags keep each consumer of randomness on its own stream.
inline constexpr std::uint64_t kTagFolds = 0xF01D5;
inline constexpr std::uint64_t kTagRelief = 0x5E1EC;
inline constexpr std::uint64_t kTagInnerCv = 0x1CA8D;
inline constexpr std::uint64_t kTagForest = 0xF08E57;

struct ExperimentConfig {
    std::string group = "all";  // all | male | female
    int n_folds = 4;
    int n_repetitions = 50;
    int top_n_features = 20;
    std::string classifier = "both";  // svm | rf | both (per-segment tables)
    std::vector<std::string> strategies = {"vote", "accuracy_tree", "sens_spec_tree"};
    std::uint64_t rng_seed = 7;
    int relief_k = 10;
    double svm_c = 1.0;
    double svm_tol = 1e-3;
    int forest_trees = 100;
    int forest_max_depth = 16;
    int forest_min_leaf = 1;
    int forest_mtry = 0;  // 0 = floor(sqrt(n_features))

    void validate() const {
        if (group != "all" && group != "male" && group != "female") {
            throw ConfigError("config: group must be all, male or female (got '" +
                              group + "')");
        }
        if (n_folds < 2) throw ConfigError("config: n_folds must be >= 2");
        if (n_repetitions < 1) throw ConfigError("config: n_repetitions must be >= 1");
        if (top_n_features < 1) throw ConfigError("config: top_n_features must be >= 1");
        if (classifier != "svm" && classifier != "rf" && classifier != "both") {
            throw ConfigError("config: classifier must be svm, rf or both (got '" +
                              classifier + "')");
        }
        if (strategies.empty()) throw ConfigError("config: strategies must not be empty");
        for (const auto& s : strategies) {
            try {
                parse_strategy(s);
            } catch (const ValidationError& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
        if (relief_k < 1) throw ConfigError("config: relief_k must be >= 1");
        if (svm_c <= 0.0) throw ConfigError("config: svm_c must be positive");
        if (svm_tol <= 0.0) throw ConfigError("config: svm_tol must be positive");
        if (forest_trees < 1) throw ConfigError("config: forest_trees must be >= 1");
        if (forest_max_depth < 1) throw ConfigError("config: forest_max_depth must be >= 1");
        if (forest_min_leaf < 1) throw ConfigError("config: forest_min_leaf must be >= 1");
    }

    bool wants_svm_table() const { return classifier != "rf"; }
    bool wants_rf_table() const { return classifier != "svm"; }

    nlohmann::json to_json() const {
        return {{"group", group},
                {"n_folds", n_folds},
                {"n_repetitions", n_repetitions},
                {"top_n_features", top_n_features},
                {"classifier", classifier},
                {"strategies", strategies},
                {"rng_seed", rng_seed},
                {"relief_k", relief_k},
                {"svm_c", svm_c},
                {"svm_tol", svm_tol},
                {"forest_trees", forest_trees},
                {"forest_max_depth", forest_max_depth},
                {"forest_min_leaf", forest_min_leaf},
                {"forest_mtry", forest_mtry}};
    }

    static ExperimentConfig from_json(const nlohmann::json& j) {
        static const std::vector<std::string> known = {
            "group",        "n_folds",     "n_repetitions",    "top_n_features",
            "classifier",   "strategies",  "rng_seed",         "relief_k",
            "svm_c",        "svm_tol",     "forest_trees",     "forest_max_depth",
            "forest_min_leaf", "forest_mtry"};
        if (!j.is_object()) throw ConfigError("config: expected a JSON object");
        for (const auto& [key, value] : j.items()) {
            (void)value;
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                throw ConfigError("config: unknown field '" + key + "'");
            }
        }
        ExperimentConfig cfg;
        try {
            cfg.group = j.value("group", cfg.group);
            cfg.n_folds = j.value("n_folds", cfg.n_folds);
            cfg.n_repetitions = j.value("n_repetitions", cfg.n_repetitions);
            cfg.top_n_features = j.value("top_n_features", cfg.top_n_features);
            cfg.classifier = j.value("classifier", cfg.classifier);
            cfg.strategies = j.value("strategies", cfg.strategies);
            cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
            cfg.relief_k = j.value("relief_k", cfg.relief_k);
            cfg.svm_c = j.value("svm_c", cfg.svm_c);
            cfg.svm_tol = j.value("svm_tol", cfg.svm_tol);
            cfg.forest_trees = j.value("forest_trees", cfg.forest_trees);
            cfg.forest_max_depth = j.value("forest_max_depth", cfg.forest_max_depth);
            cfg.forest_min_leaf = j.value("forest_min_leaf", cfg.forest_min_leaf);
            cfg.forest_mtry = j.value("forest_mtry", cfg.forest_mtry);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        cfg.validate();
        return cfg;
    }
};

// ---- feature table ---------------------------------------------------------

struct SubjectFeatures {
    std::string subject_id;
    Gender gender = Gender::male;
    Label label = Label::healthy;
    std::map<int, FeatureVector> segments;
};

using FeatureTable = std::vector<SubjectFeatures>;

// Extracts every (subject, segment) clip into a feature row. Clips are
// processed in parallel into per-job slots; the table is then assembled in
// corpus order, so the result is independent of scheduling.
inline FeatureTable extract_feature_table(const Corpus& corpus, const ClipSource& source,
                                          const PipelineConfig& pipeline = {}) {
    if (corpus.subjects.empty()) throw EmptyInputError("extract: corpus has no subjects");
    struct Job {
        std::size_t subject;
        int segment_id;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < corpus.subjects.size(); ++s) {
        for (const auto& [segment_id, path] : corpus.subjects[s].segments) {
            (void)path;
            jobs.push_back({s, segment_id});
        }
    }
    std::vector<std::optional<FeatureVector>> slots(jobs.size());
    parallel_for_indexed(jobs.size(), [&](std::size_t i) {
        const auto& subject = corpus.subjects[jobs[i].subject];
        const auto clip = source.load(subject, jobs[i].segment_id);
        if (!clip) return;
        slots[i] = assemble_feature_vector(*clip, pipeline);
    });
    FeatureTable table(corpus.subjects.size());
    for (std::size_t s = 0; s < corpus.subjects.size(); ++s) {
        table[s].subject_id = corpus.subjects[s].subject_id;
        table[s].gender = corpus.subjects[s].gender;
        table[s].label = corpus.subjects[s].label;
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (slots[i]) {
            table[jobs[i].subject].segments.emplace(jobs[i].segment_id,
                                                    std::move(*slots[i]));
        }
    }
    return table;
}

inline FeatureTable filter_group(const FeatureTable& table, const std::string& group) {
    if (group == "all") return table;
    const Gender wanted = parse_gender(group);
    FeatureTable out;
    for (const auto& row : table) {
        if (row.gender == wanted) out.push_back(row);
    }
    return out;
}

// ---- one (repetition, fold, segment) work unit -----------------------------

struct SegmentFoldResult {
    int segment_id = 0;
    bool has_model = false;          // a genuine trained model exists
    bool constant_model = false;     // train labels were single-class
    bool no_train_rows = false;
    bool selection_underfull = false;
    bool relief_k_clamped = false;
    bool inner_loo_used = false;
    bool inner_constant_fold = false;
    std::vector<int> selected_features;
    SegmentCard card;                     // inner-CV estimate on training data
    ConfusionCounts card_confusion;       // the integers behind the card
    std::map<std::string, Label> svm_predictions;  // test subject -> label
    std::map<std::string, Label> rf_predictions;
    double forest_oob_accuracy = 0.0;
};

// Everything derived here depends only on training rows plus the seeds
// deterministically derived from (rng_seed, repetition, fold, segment); the
// audit block reproduces it from logged fold membership alone.
inline SegmentFoldResult evaluate_segment_fold(const FeatureTable& table,
                                               const std::vector<std::size_t>& train_rows,
                                               const std::vector<std::size_t>& test_rows,
                                               int segment_id,
                                               const ExperimentConfig& cfg,
                                               std::uint64_t rep_seed, int fold) {
    SegmentFoldResult result;
    result.segment_id = segment_id;

    std::vector<std::vector<double>> x_train;
    std::vector<Label> y_train;
    for (std::size_t r : train_rows) {
        const auto it = table[r].segments.find(segment_id);
        if (it == table[r].segments.end()) continue;
        x_train.push_back(it->second.values);
        y_train.push_back(table[r].label);
    }
    if (x_train.empty()) {
        result.no_train_rows = true;
        return result;
    }
    const auto [n_healthy, n_depressed] = class_counts(y_train);
    if (n_healthy == 0 || n_depressed == 0) {
        // Degenerate training set: a constant classifier repeating the one
        // class present. It is not fused (no honest inner-CV card exists)
        // but still fills the per-segment table.
        result.constant_model = true;
        const Label constant = n_healthy > 0 ? Label::healthy : Label::depressed;
        for (std::size_t r : test_rows) {
            if (table[r].segments.count(segment_id) != 0) {
                result.svm_predictions[table[r].subject_id] = constant;
                result.rf_predictions[table[r].subject_id] = constant;
            }
        }
        return result;
    }

    ReliefConfig relief_cfg;
    relief_cfg.k_neighbors = cfg.relief_k;
    relief_cfg.seed = mix_seed(rep_seed, static_cast<std::uint64_t>(fold),
                               static_cast<std::uint64_t>(segment_id), kTagRelief);
    const auto relief = relieff_weights(x_train, y_train, relief_cfg);
    result.relief_k_clamped = relief.k_clamped;
    auto selection = select_features(relief.weights, cfg.top_n_features);
    result.selection_underfull = selection.underfull;
    result.selected_features = selection.indices;

    const auto xs_train = project_features(x_train, selection.indices);
    SvmConfig svm_cfg;
    svm_cfg.c = cfg.svm_c;
    svm_cfg.tol = cfg.svm_tol;
    const auto svm = svm_train(xs_train, y_train, svm_cfg);

    auto project_row = [&](const std::vector<double>& row) {
        std::vector<double> r;
        r.reserve(selection.indices.size());
        for (int f : selection.indices) r.push_back(row[static_cast<std::size_t>(f)]);
        return r;
    };
    for (std::size_t r : test_rows) {
        const auto it = table[r].segments.find(segment_id);
        if (it == table[r].segments.end()) continue;
        result.svm_predictions[table[r].subject_id] =
            svm.predict(project_row(it->second.values));
    }

    const std::uint64_t inner_seed =
        mix_seed(rep_seed, static_cast<std::uint64_t>(fold),
                 static_cast<std::uint64_t>(segment_id), kTagInnerCv);
    const auto inner = cross_validated_metrics(
        xs_train, y_train, cfg.n_folds, inner_seed,
        [&](const std::vector<std::vector<double>>& x, const std::vector<Label>& y) {
            return svm_train(x, y, svm_cfg);
        },
        [](const SvmModel& m, const std::vector<double>& row) { return m.predict(row); });
    result.inner_loo_used = inner.loo_used;
    result.inner_constant_fold = inner.constant_fold_seen;
    result.card = {segment_id, inner.accuracy, inner.sensitivity, inner.specificity};
    result.card_confusion = inner.confusion;
    result.has_model = true;

    if (cfg.wants_rf_table()) {
        ForestConfig forest_cfg;
        forest_cfg.n_trees = cfg.forest_trees;
        forest_cfg.max_depth = cfg.forest_max_depth;
        forest_cfg.min_leaf = cfg.forest_min_leaf;
        forest_cfg.mtry = cfg.forest_mtry;
        forest_cfg.seed = mix_seed(rep_seed, static_cast<std::uint64_t>(fold),
                                   static_cast<std::uint64_t>(segment_id), kTagForest);
        const auto forest = forest_train(xs_train, y_train, forest_cfg);
        result.forest_oob_accuracy = forest.oob_accuracy;
        for (std::size_t r : test_rows) {
            const auto it = table[r].segments.find(segment_id);
            if (it == table[r].segments.end()) continue;
            result.rf_predictions[table[r].subject_id] =
                forest.predict(project_row(it->second.values));
        }
    }
    return result;
}

// ---- aggregation helpers ---------------------------------------------------

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline nlohmann::json metric_cell(const std::vector<double>& per_rep) {
    return {{"percent_mean", percent_1dp(mean_of(per_rep))},
            {"percent_std", percent_1dp(sample_std(per_rep))}};
}

struct MetricSeries {
    std::vector<double> accuracy, sensitivity, specificity;

    void push(const ConfusionCounts& c) {
        accuracy.push_back(c.accuracy());
        sensitivity.push_back(c.sensitivity());
        specificity.push_back(c.specificity());
    }
    nlohmann::json detail_json() const {
        return {{"accuracy", accuracy},
                {"sensitivity", sensitivity},
                {"specificity", specificity}};
    }
    nlohmann::json table_json() const {
        return {{"accuracy", metric_cell(accuracy)},
                {"sensitivity", metric_cell(sensitivity)},
                {"specificity", metric_cell(specificity)}};
    }
};

}  // namespace detail

// ---- the experiment --------------------------------------------------------

inline nlohmann::json run_experiment(const FeatureTable& full_table,
                                     const ExperimentConfig& cfg) {
    cfg.validate();
    const FeatureTable table = filter_group(full_table, cfg.group);
    if (table.empty()) {
        throw ConfigError("group '" + cfg.group + "' has no subjects");
    }

    std::size_t healthy_male = 0, healthy_female = 0;
    std::size_t depressed_male = 0, depressed_female = 0;
    std::vector<Label> labels;
    std::vector<int> strata;
    std::map<std::string, Label> truth;
    for (const auto& row : table) {
        if (row.label == Label::healthy) {
            (row.gender == Gender::male ? healthy_male : healthy_female) += 1;
        } else {
            (row.gender == Gender::male ? depressed_male : depressed_female) += 1;
        }
        labels.push_back(row.label);
        strata.push_back(cfg.group == "all" ? (row.gender == Gender::male ? 0 : 1) : 0);
        truth[row.subject_id] = row.label;
    }
    const std::size_t n_healthy = healthy_male + healthy_female;
    const std::size_t n_depressed = depressed_male + depressed_female;
    if (std::min(n_healthy, n_depressed) < static_cast<std::size_t>(cfg.n_folds)) {
        throw ConfigError("group '" + cfg.group + "' cannot stratify " +
                          std::to_string(cfg.n_folds) + " folds: " +
                          std::to_string(n_healthy) + " healthy / " +
                          std::to_string(n_depressed) + " depressed subjects");
    }

    std::vector<FusionStrategy> strategies;
    for (const auto& s : cfg.strategies) strategies.push_back(parse_strategy(s));

    // Output tables honor the classifier choice, but the svm series is always
    // accumulated: the fusion-table baselines are defined on the fusion
    // classifier.
    std::vector<std::string> classifiers;
    if (cfg.wants_svm_table()) classifiers.push_back("svm");
    if (cfg.wants_rf_table()) classifiers.push_back("rf");
    std::vector<std::string> accumulated = {"svm"};
    if (cfg.wants_rf_table()) accumulated.push_back("rf");

    // Accumulators: one MetricSeries entry per repetition.
    std::map<std::string, detail::MetricSeries> fusion_series;       // by strategy
    std::map<std::string, std::map<int, detail::MetricSeries>> segment_series;
    for (const auto& c : accumulated) {
        for (const auto& desc : segment_taxonomy()) segment_series[c][desc.segment_id];
    }
    std::map<int, std::size_t> support;
    for (const auto& desc : segment_taxonomy()) {
        std::size_t got = 0;
        for (const auto& row : table) got += row.segments.count(desc.segment_id);
        support[desc.segment_id] = got;
    }

    std::size_t flag_constant_models = 0, flag_loo = 0, flag_underfull = 0;
    std::size_t flag_k_clamped = 0, flag_exhausted = 0, flag_skipped_missing = 0;
    std::size_t flag_vote_ties = 0, flag_inner_constant = 0;

    nlohmann::json audit_reps = nlohmann::json::array();

    for (int rep = 0; rep < cfg.n_repetitions; ++rep) {
        const std::uint64_t rep_seed = mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(rep));
        Rng fold_rng(mix_seed(rep_seed, kTagFolds));
        const auto fold_of = stratified_folds(labels, strata, cfg.n_folds, fold_rng);

        std::map<std::string, ConfusionCounts> rep_fusion;
        std::map<std::string, std::map<int, ConfusionCounts>> rep_segments;

        nlohmann::json audit_folds = nlohmann::json::array();
        for (int fold = 0; fold < cfg.n_folds; ++fold) {
            std::vector<std::size_t> train_rows, test_rows;
            for (std::size_t i = 0; i < table.size(); ++i) {
                (fold_of[i] == fold ? test_rows : train_rows).push_back(i);
            }

            nlohmann::json audit_train = nlohmann::json::array();
            for (std::size_t r : train_rows) audit_train.push_back(table[r].subject_id);
            nlohmann::json audit_test = nlohmann::json::array();
            for (std::size_t r : test_rows) audit_test.push_back(table[r].subject_id);

            std::vector<SegmentCard> cards;
            PredictionTable svm_predictions;
            nlohmann::json audit_segments = nlohmann::json::array();
            for (const auto& desc : segment_taxonomy()) {
                auto res = evaluate_segment_fold(table, train_rows, test_rows,
                                                 desc.segment_id, cfg, rep_seed, fold);
                if (res.constant_model) ++flag_constant_models;
                if (res.inner_loo_used) ++flag_loo;
                if (res.selection_underfull) ++flag_underfull;
                if (res.relief_k_clamped) ++flag_k_clamped;
                if (res.inner_constant_fold) ++flag_inner_constant;

                if (res.has_model) {
                    cards.push_back(res.card);
                    for (const auto& [subject, pred] : res.svm_predictions) {
                        svm_predictions[subject][desc.segment_id] = pred;
                    }
                }
                for (const auto& [subject, pred] : res.svm_predictions) {
                    rep_segments["svm"][desc.segment_id].add(truth.at(subject), pred);
                }
                if (cfg.wants_rf_table()) {
                    for (const auto& [subject, pred] : res.rf_predictions) {
                        rep_segments["rf"][desc.segment_id].add(truth.at(subject), pred);
                    }
                }

                nlohmann::json seg_audit = {
                    {"segment_id", desc.segment_id},
                    {"selected_features", res.selected_features},
                    {"card", nullptr},
                    {"flags", nlohmann::json::array()}};
                if (res.has_model) {
                    seg_audit["card"] = {{"tp", res.card_confusion.tp},
                                         {"tn", res.card_confusion.tn},
                                         {"fp", res.card_confusion.fp},
                                         {"fn", res.card_confusion.fn}};
                }
                auto& seg_flags = seg_audit["flags"];
                if (res.constant_model) seg_flags.push_back("constant_model");
                if (res.no_train_rows) seg_flags.push_back("no_train_rows");
                if (res.inner_loo_used) seg_flags.push_back("inner_loo");
                if (res.selection_underfull) seg_flags.push_back("selection_underfull");
                if (res.relief_k_clamped) seg_flags.push_back("relief_k_clamped");
                if (res.inner_constant_fold) seg_flags.push_back("inner_constant_fold");
                audit_segments.push_back(std::move(seg_audit));
            }

            for (FusionStrategy strategy : strategies) {
                const auto eval = fuse_table(strategy, cards, svm_predictions, &truth);
                rep_fusion[strategy_name(strategy)].merge(eval.confusion);
                for (const auto& [subject, outcome] : eval.outcomes) {
                    (void)subject;
                    if (outcome.exhausted) ++flag_exhausted;
                    if (outcome.skipped_missing) ++flag_skipped_missing;
                    if (outcome.vote_tie) ++flag_vote_ties;
                }
            }

            audit_folds.push_back({{"train_subjects", audit_train},
                                   {"test_subjects", audit_test},
                                   {"segments", audit_segments}});
        }

        for (FusionStrategy strategy : strategies) {
            fusion_series[strategy_name(strategy)].push(rep_fusion[strategy_name(strategy)]);
        }
        for (const auto& c : accumulated) {
            for (const auto& desc : segment_taxonomy()) {
                segment_series[c][desc.segment_id].push(rep_segments[c][desc.segment_id]);
            }
        }
        audit_reps.push_back({{"repetition", rep}, {"folds", audit_folds}});
    }

    // ---- tables ----
    nlohmann::json segment_table = nlohmann::json::array();
    for (const auto& desc : segment_taxonomy()) {
        nlohmann::json row = {{"segment_id", desc.segment_id},
                              {"paradigm", paradigm_name(desc.paradigm)},
                              {"valence", valence_name(desc.valence)},
                              {"support", support[desc.segment_id]},
                              {"classifiers", nlohmann::json::object()}};
        for (const auto& c : classifiers) {
            row["classifiers"][c] = segment_series[c][desc.segment_id].table_json();
        }
        segment_table.push_back(std::move(row));
    }

    nlohmann::json paradigm_table = nlohmann::json::array();
    for (Paradigm p : {Paradigm::interview, Paradigm::passage_reading,
                       Paradigm::vocabulary_reading, Paradigm::picture_description}) {
        nlohmann::json row = {{"paradigm", paradigm_name(p)},
                              {"segments", nlohmann::json::array()},
                              {"classifiers", nlohmann::json::object()}};
        std::vector<int> members;
        for (const auto& desc : segment_taxonomy()) {
            if (desc.paradigm == p) members.push_back(desc.segment_id);
        }
        for (int id : members) row["segments"].push_back(id);
        for (const auto& c : classifiers) {
            std::vector<double> member_means;
            for (int id : members) {
                member_means.push_back(
                    detail::mean_of(segment_series[c][id].accuracy));
            }
            row["classifiers"][c] = {
                {"accuracy_percent", percent_1dp(detail::mean_of(member_means))}};
        }
        paradigm_table.push_back(std::move(row));
    }

    // Fusion table rows mirror the published comparison: three per-segment
    // baselines (on the fusion classifier) plus the three fusion strategies.
    nlohmann::json fusion_table = nlohmann::json::array();
    {
        const auto& svm_series = segment_series["svm"];
        std::vector<double> per_segment_mean;
        for (const auto& desc : segment_taxonomy()) {
            per_segment_mean.push_back(
                detail::mean_of(svm_series.at(desc.segment_id).accuracy));
        }
        double best = per_segment_mean[0];
        int best_id = segment_taxonomy()[0].segment_id;
        for (std::size_t i = 1; i < per_segment_mean.size(); ++i) {
            if (per_segment_mean[i] > best) {
                best = per_segment_mean[i];
                best_id = segment_taxonomy()[i].segment_id;
            }
        }
        const double mean_of_means = detail::mean_of(per_segment_mean);
        const double passage = detail::mean_of(svm_series.at(19).accuracy);
        auto baseline_row = [](const std::string& method, double fraction,
                               nlohmann::json extra) {
            nlohmann::json row = {{"method", method},
                                  {"accuracy_percent", percent_1dp(fraction)},
                                  {"sensitivity_percent", nullptr},
                                  {"specificity_percent", nullptr}};
            if (extra.is_object()) row.update(extra);
            return row;
        };
        fusion_table.push_back(baseline_row("mean_segment", mean_of_means, {}));
        fusion_table.push_back(
            baseline_row("max_segment", best, {{"segment_id", best_id}}));
        fusion_table.push_back(baseline_row("passage_reading", passage, {}));
        for (const char* name : {"vote", "accuracy_tree", "sens_spec_tree"}) {
            if (fusion_series.count(name) == 0) continue;
            const auto& series = fusion_series.at(name);
            fusion_table.push_back(
                {{"method", name},
                 {"accuracy_percent", percent_1dp(detail::mean_of(series.accuracy))},
                 {"accuracy_std_percent", percent_1dp(detail::sample_std(series.accuracy))},
                 {"sensitivity_percent",
                  percent_1dp(detail::mean_of(series.sensitivity))},
                 {"specificity_percent",
                  percent_1dp(detail::mean_of(series.specificity))}});
        }
    }

    nlohmann::json detail_block = {{"per_rep_fusion", nlohmann::json::object()},
                                   {"per_rep_segments", nlohmann::json::object()}};
    for (const auto& [name, series] : fusion_series) {
        detail_block["per_rep_fusion"][name] = series.detail_json();
    }
    for (const auto& c : classifiers) {
        nlohmann::json per_seg = nlohmann::json::object();
        for (const auto& desc : segment_taxonomy()) {
            per_seg[std::to_string(desc.segment_id)] =
                segment_series[c][desc.segment_id].detail_json();
        }
        detail_block["per_rep_segments"][c] = std::move(per_seg);
    }

    nlohmann::json report = {
        {"schema_version", 1},
        {"toolkit_version", kToolkitVersion},
        {"group", cfg.group},
        {"config", cfg.to_json()},
        {"corpus",
         {{"subjects", table.size()},
          {"healthy_male", healthy_male},
          {"healthy_female", healthy_female},
          {"depressed_male", depressed_male},
          {"depressed_female", depressed_female}}},
        {"substitution_notes",
         {"voice activity detection: double-threshold energy/zero-crossing "
          "detector with 100 ms noise-floor calibration (substitute for a "
          "statistical-model detector)",
          "feature set: 113 dimensions (16 pause + 86 acoustic + 8 tremor + 3 "
          "energy)"}},
        {"flags",
         {{"constant_models", flag_constant_models},
          {"inner_loo", flag_loo},
          {"selection_underfull", flag_underfull},
          {"relief_k_clamped", flag_k_clamped},
          {"inner_constant_folds", flag_inner_constant},
          {"fusion_exhausted", flag_exhausted},
          {"fusion_skipped_missing", flag_skipped_missing},
          {"vote_ties", flag_vote_ties}}},
        {"segment_table", std::move(segment_table)},
        {"paradigm_table", std::move(paradigm_table)},
        {"fusion_table", std::move(fusion_table)},
        {"detail", std::move(detail_block)},
        {"audit", {{"repetitions", std::move(audit_reps)}}}};
    return report;
}

}  // namespace vocatree
