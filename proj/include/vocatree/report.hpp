#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocatree/common.hpp"

namespace vocatree {

namespace detail {

inline std::string percent_cell(const nlohmann::json& v) {
    if (v.is_null()) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v.get<double>());
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

inline std::string render_report_json(const nlohmann::json& report) {
    return report.dump(2) + "\n";
}

inline std::string render_segments_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "segment_id,paradigm,valence,support,classifier,accuracy_mean,accuracy_std,"
           "sensitivity_mean,sensitivity_std,specificity_mean,specificity_std\n";
    for (const auto& row : report.at("segment_table")) {
        for (const auto& [classifier, cells] : row.at("classifiers").items()) {
            out << row.at("segment_id").get<int>() << ','
                << row.at("paradigm").get<std::string>() << ','
                << row.at("valence").get<std::string>() << ','
                << row.at("support").get<std::size_t>() << ',' << classifier;
            for (const char* metric : {"accuracy", "sensitivity", "specificity"}) {
                out << ',' << detail::percent_cell(cells.at(metric).at("percent_mean"))
                    << ',' << detail::percent_cell(cells.at(metric).at("percent_std"));
            }
            out << "\n";
        }
    }
    return out.str();
}

inline std::string render_paradigms_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "paradigm,classifier,accuracy_mean,n_segments\n";
    for (const auto& row : report.at("paradigm_table")) {
        for (const auto& [classifier, cells] : row.at("classifiers").items()) {
            out << row.at("paradigm").get<std::string>() << ',' << classifier << ','
                << detail::percent_cell(cells.at("accuracy_percent")) << ','
                << row.at("segments").size() << "\n";
        }
    }
    return out.str();
}

inline std::string render_fusion_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "method,accuracy,accuracy_std,sensitivity,specificity\n";
    for (const auto& row : report.at("fusion_table")) {
        out << row.at("method").get<std::string>() << ','
            << detail::percent_cell(row.at("accuracy_percent")) << ','
            << detail::percent_cell(row.contains("accuracy_std_percent")
                                        ? row.at("accuracy_std_percent")
                                        : nlohmann::json())
            << ',' << detail::percent_cell(row.at("sensitivity_percent")) << ','
            << detail::percent_cell(row.at("specificity_percent")) << "\n";
    }
    return out.str();
}

inline std::string render_report_markdown(const nlohmann::json& report) {
    std::ostringstream out;
    const auto& corpus = report.at("corpus");
    out << "# Evaluation report — group: " << report.at("group").get<std::string>()
        << "\n\n";
    out << "Subjects: " << corpus.at("subjects").get<std::size_t>() << " (healthy "
        << corpus.at("healthy_male").get<std::size_t>() << " male / "
        << corpus.at("healthy_female").get<std::size_t>() << " female; depressed "
        << corpus.at("depressed_male").get<std::size_t>() << " male / "
        << corpus.at("depressed_female").get<std::size_t>() << " female). "
        << "Protocol: " << report.at("config").at("n_folds").get<int>()
        << "-fold cross-validation, "
        << report.at("config").at("n_repetitions").get<int>()
        << " repetitions, seed " << report.at("config").at("rng_seed").get<std::uint64_t>()
        << ".\n\n";
    out << "Substitution notes:\n";
    for (const auto& note : report.at("substitution_notes")) {
        out << "- " << note.get<std::string>() << "\n";
    }
    out << "\n## Per-segment results (% mean ± std over repetitions)\n\n";
    out << "| segment | paradigm | valence | support |";
    std::vector<std::string> classifiers;
    for (const auto& [classifier, cells] :
         report.at("segment_table").at(0).at("classifiers").items()) {
        (void)cells;
        classifiers.push_back(classifier);
        out << ' ' << classifier << " acc | " << classifier << " sens | " << classifier
            << " spec |";
    }
    out << "\n|---|---|---|---|";
    for (std::size_t i = 0; i < classifiers.size(); ++i) out << "---|---|---|";
    out << "\n";
    for (const auto& row : report.at("segment_table")) {
        out << "| " << row.at("segment_id").get<int>() << " | "
            << row.at("paradigm").get<std::string>() << " | "
            << row.at("valence").get<std::string>() << " | "
            << row.at("support").get<std::size_t>() << " |";
        for (const auto& classifier : classifiers) {
            const auto& cells = row.at("classifiers").at(classifier);
            for (const char* metric : {"accuracy", "sensitivity", "specificity"}) {
                out << ' ' << detail::percent_cell(cells.at(metric).at("percent_mean"))
                    << " ± " << detail::percent_cell(cells.at(metric).at("percent_std"))
                    << " |";
            }
        }
        out << "\n";
    }
    out << "\n## Paradigm summary (% mean accuracy)\n\n";
    out << "| paradigm | n segments |";
    for (const auto& classifier : classifiers) out << ' ' << classifier << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < classifiers.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& row : report.at("paradigm_table")) {
        out << "| " << row.at("paradigm").get<std::string>() << " | "
            << row.at("segments").size() << " |";
        for (const auto& classifier : classifiers) {
            out << ' '
                << detail::percent_cell(
                       row.at("classifiers").at(classifier).at("accuracy_percent"))
                << " |";
        }
        out << "\n";
    }
    out << "\n## Fusion comparison (%)\n\n";
    out << "| method | accuracy | sensitivity | specificity |\n";
    out << "|---|---|---|---|\n";
    for (const auto& row : report.at("fusion_table")) {
        out << "| " << row.at("method").get<std::string>() << " | "
            << detail::percent_cell(row.at("accuracy_percent")) << " | "
            << detail::percent_cell(row.at("sensitivity_percent")) << " | "
            << detail::percent_cell(row.at("specificity_percent")) << " |\n";
    }
    return out.str();
}

// Writes the chosen rendering into out_dir and returns the paths written.
inline std::vector<std::filesystem::path> render_report(
    const nlohmann::json& report, const std::string& format,
    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    if (format == "json") {
        const auto p = out_dir / "report.json";
        detail::write_text_file(p, render_report_json(report));
        written.push_back(p);
    } else if (format == "csv") {
        const auto segments = out_dir / "segments.csv";
        const auto paradigms = out_dir / "paradigms.csv";
        const auto fusion = out_dir / "fusion.csv";
        detail::write_text_file(segments, render_segments_csv(report));
        detail::write_text_file(paradigms, render_paradigms_csv(report));
        detail::write_text_file(fusion, render_fusion_csv(report));
        written.insert(written.end(), {segments, paradigms, fusion});
    } else if (format == "markdown") {
        const auto p = out_dir / "report.md";
        detail::write_text_file(p, render_report_markdown(report));
        written.push_back(p);
    } else {
        throw ValidationError("render_report: unknown format '" + format + "'");
    }
    return written;
}

}  // namespace vocatree
