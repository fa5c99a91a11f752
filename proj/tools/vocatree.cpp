#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vocatree/experiment.hpp"
#include "vocatree/fusion.hpp"
#include "vocatree/model_io.hpp"
#include "vocatree/report.hpp"
#include "vocatree/synth.hpp"

namespace fs = std::filesystem;
using namespace vocatree;

namespace {

SynthSpec load_synth_spec(const std::string& path) {
    if (path.empty()) return SynthSpec{};
    SynthSpec spec = load_json(path).get<SynthSpec>();
    spec.validate();
    return spec;
}

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return ExperimentConfig{};
    return ExperimentConfig::from_json(load_json(path));
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, bool write_wavs) {
    const SynthSpec spec = load_synth_spec(spec_path);
    fs::create_directories(out_dir);
    save_json(nlohmann::json(spec), (fs::path(out_dir) / "spec.json").string());
    if (write_wavs) {
        const auto corpus = write_synthetic_corpus(spec, out_dir);
        std::cout << "wrote " << corpus.subjects.size() << " subjects with WAVs to "
                  << out_dir << "\n";
    } else {
        const auto corpus = synthetic_corpus_structure(spec);
        write_manifest((fs::path(out_dir) / "manifest.csv").string(), corpus);
        std::cout << "wrote manifest for " << corpus.subjects.size()
                  << " subjects to " << out_dir
                  << " (clip references are synthetic; use --write-wavs for audio)\n";
    }
    return 0;
}

int cmd_extract(const std::string& manifest_path, const std::string& out_path) {
    const Corpus corpus = load_manifest(manifest_path);
    const FileClipSource source(fs::path(manifest_path).parent_path());
    const auto table = extract_feature_table(corpus, source);
    std::vector<FeatureRow> rows;
    for (const auto& subject : table) {
        for (const auto& [segment_id, fv] : subject.segments) {
            rows.push_back({subject.subject_id, segment_id, fv});
        }
    }
    write_feature_csv(out_path, rows);
    const fs::path schema = fs::path(out_path).replace_extension(".schema.json");
    write_feature_schema(schema.string());
    std::cout << "wrote " << rows.size() << " feature rows to " << out_path << "\n";
    return 0;
}

int cmd_run(const std::string& manifest_path, const std::string& synth_spec_path,
            const std::string& config_path, const std::string& out_dir) {
    if (manifest_path.empty() == synth_spec_path.empty()) {
        throw ConfigError("run: give exactly one of --manifest or --synth-spec");
    }
    const ExperimentConfig cfg = load_config(config_path);
    FeatureTable table;
    if (!manifest_path.empty()) {
        const Corpus corpus = load_manifest(manifest_path);
        const FileClipSource source(fs::path(manifest_path).parent_path());
        table = extract_feature_table(corpus, source);
    } else {
        const SynthClipSource source(load_synth_spec(synth_spec_path));
        table = extract_feature_table(source.corpus(), source);
    }
    const auto report = run_experiment(table, cfg);
    for (const char* format : {"json", "csv", "markdown"}) {
        render_report(report, format, out_dir);
    }
    std::cout << "group " << report.at("group").get<std::string>() << ", "
              << report.at("corpus").at("subjects").get<std::size_t>()
              << " subjects\n";
    for (const auto& row : report.at("fusion_table")) {
        std::cout << "  " << row.at("method").get<std::string>() << ": "
                  << detail::percent_cell(row.at("accuracy_percent")) << "%\n";
    }
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

int cmd_fuse_sim(const std::string& predictions_path, const std::string& cards_path,
                 const std::string& strategy_name_arg, const std::string& out_path) {
    const FusionStrategy strategy = parse_strategy(strategy_name_arg);
    std::ifstream cards_in(cards_path);
    if (!cards_in) throw IoError("cannot read " + cards_path);
    const auto cards = load_cards_csv(cards_in);
    std::ifstream pred_in(predictions_path);
    if (!pred_in) throw IoError("cannot read " + predictions_path);
    const auto predictions = load_predictions_csv(pred_in);

    const auto eval = fuse_table(strategy, cards, predictions);
    nlohmann::json traces = nlohmann::json::array();
    for (const auto& [subject, outcome] : eval.outcomes) {
        auto t = trace_to_json(strategy, outcome);
        t["subject_id"] = subject;
        traces.push_back(std::move(t));
    }
    const std::string text = traces.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + out_path);
        out << text;
        std::cout << "wrote " << eval.outcomes.size() << " traces to " << out_path
                  << "\n";
    }
    return 0;
}

int cmd_export_tree(const std::string& cards_path, const std::string& strategy_name_arg,
                    const std::string& out_path) {
    const FusionStrategy strategy = parse_strategy(strategy_name_arg);
    std::ifstream cards_in(cards_path);
    if (!cards_in) throw IoError("cannot read " + cards_path);
    const auto cards = load_cards_csv(cards_in);
    const std::string dot = export_tree_dot(strategy, cards);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    out << dot;
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "speech-based screening experiment toolkit: synthetic corpora, feature "
        "extraction, cross-validated per-segment classifiers and decision-level "
        "fusion (VOCATREE_THREADS caps worker threads; 0 or unset = auto)"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = "corpus";
    bool write_wavs = false;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--spec", spec_path,
                      "synthesis spec JSON (defaults: published cohort sizes, "
                      "strong class effect, seed 7)");
    synth->add_option("--out", out_dir, "output directory")->capture_default_str();
    synth->add_flag("--write-wavs", write_wavs,
                    "also render WAV files (default: manifest only)");

    std::string manifest_path, features_out = "features.csv";
    auto* extract = app.add_subcommand("extract", "extract feature vectors to CSV");
    extract->add_option("--manifest", manifest_path, "corpus manifest CSV")->required();
    extract->add_option("--out", features_out, "output feature CSV")
        ->capture_default_str();

    std::string run_manifest, run_synth_spec, config_path, run_out = "results";
    auto* run = app.add_subcommand("run", "run the full cross-validated experiment");
    run->add_option("--manifest", run_manifest, "corpus manifest CSV");
    run->add_option("--synth-spec", run_synth_spec,
                    "synthesis spec JSON (in-memory corpus, no WAVs needed)");
    run->add_option("--config", config_path,
                    "experiment config JSON (defaults: group=all, n_folds=4, "
                    "n_repetitions=50, top_n_features=20, classifier=both, "
                    "strategies=vote+accuracy_tree+sens_spec_tree, rng_seed=7, "
                    "relief_k=10, svm_c=1, svm_tol=0.001, forest_trees=100, "
                    "forest_max_depth=16, forest_min_leaf=1, forest_mtry=0=auto)");
    run->add_option("--out", run_out, "report output directory")->capture_default_str();

    std::string pred_path, cards_path, strategy = "sens_spec_tree", fuse_out;
    auto* fuse = app.add_subcommand("fuse-sim",
                                    "fuse a prediction matrix with given cards");
    fuse->add_option("--predictions", pred_path, "predictions CSV")->required();
    fuse->add_option("--cards", cards_path, "segment cards CSV")->required();
    fuse->add_option("--strategy", strategy,
                     "vote | accuracy_tree | sens_spec_tree")
        ->capture_default_str();
    fuse->add_option("--out", fuse_out, "trace JSON output (default: stdout)");

    std::string tree_cards, tree_strategy = "sens_spec_tree", tree_out = "tree.dot";
    auto* tree = app.add_subcommand("export-tree", "export a fusion tree as DOT");
    tree->add_option("--cards", tree_cards, "segment cards CSV")->required();
    tree->add_option("--strategy", tree_strategy, "accuracy_tree | sens_spec_tree")
        ->capture_default_str();
    tree->add_option("--out", tree_out, "output DOT path")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(spec_path, out_dir, write_wavs);
        if (extract->parsed()) return cmd_extract(manifest_path, features_out);
        if (run->parsed()) {
            return cmd_run(run_manifest, run_synth_spec, config_path, run_out);
        }
        if (fuse->parsed()) return cmd_fuse_sim(pred_path, cards_path, strategy, fuse_out);
        if (tree->parsed()) return cmd_export_tree(tree_cards, tree_strategy, tree_out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
