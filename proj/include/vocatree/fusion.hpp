#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocatree/common.hpp"
#include "vocatree/corpus.hpp"
#include "vocatree/metrics.hpp"

namespace vocatree {

// Cross-validated quality estimates of one segment's classifier, measured on
// training data only; trees are built from these numbers.
struct SegmentCard {
    int segment_id = 0;
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

enum class FusionStrategy { majority_vote, accuracy_tree, sens_spec_tree };

inline const char* strategy_name(FusionStrategy s) {
    switch (s) {
        case FusionStrategy::majority_vote: return "vote";
        case FusionStrategy::accuracy_tree: return "accuracy_tree";
        case FusionStrategy::sens_spec_tree: return "sens_spec_tree";
    }
    return "?";
}

inline FusionStrategy parse_strategy(const std::string& s) {
    if (s == "vote" || s == "majority_vote") return FusionStrategy::majority_vote;
    if (s == "accuracy_tree") return FusionStrategy::accuracy_tree;
    if (s == "sens_spec_tree") return FusionStrategy::sens_spec_tree;
    throw ValidationError("unknown fusion strategy: " + s);
}

struct FusionOutcome {
    Label verdict = Label::depressed;
    std::vector<std::pair<int, Label>> path;  // (segment_id, its prediction)
    bool exhausted = false;                   // ran out of cards before a majority
    bool skipped_missing = false;             // some chosen card had no prediction
    bool vote_tie = false;
};

namespace detail {

// Picks the next card to consult. At the root and after a depressed
// prediction the sensitivity-first tree ranks by (sensitivity, accuracy,
// lower id); after a healthy prediction by (specificity, accuracy, lower id).
// The accuracy-first tree ranks by accuracy, breaking ties toward the metric
// matching the branch just taken.
inline const SegmentCard* pick_card(FusionStrategy strategy,
                                    const std::vector<SegmentCard>& cards,
                                    const std::vector<char>& used,
                                    std::optional<Label> branch) {
    const SegmentCard* best = nullptr;
    auto key = [&](const SegmentCard& c) -> std::array<double, 3> {
        if (strategy == FusionStrategy::sens_spec_tree) {
            if (branch && *branch == Label::healthy) {
                return {c.specificity, c.accuracy, -static_cast<double>(c.segment_id)};
            }
            return {c.sensitivity, c.accuracy, -static_cast<double>(c.segment_id)};
        }
        if (branch && *branch == Label::healthy) {
            return {c.accuracy, c.specificity, -static_cast<double>(c.segment_id)};
        }
        if (branch && *branch == Label::depressed) {
            return {c.accuracy, c.sensitivity, -static_cast<double>(c.segment_id)};
        }
        return {c.accuracy, -static_cast<double>(c.segment_id), 0.0};
    };
    std::array<double, 3> best_key{};
    for (std::size_t i = 0; i < cards.size(); ++i) {
        if (used[i]) continue;
        const auto k = key(cards[i]);
        if (best == nullptr || k > best_key) {
            best = &cards[i];
            best_key = k;
        }
    }
    return best;
}

}  // namespace detail

// Walks one subject through a fused decision. Tree strategies consult cards
// lazily: the next card depends only on the cards already used and the last
// prediction, and the first class predicted twice wins. A card whose segment
// has no prediction for this subject is skipped without consuming a turn.
// If cards run out before any class reaches two votes, the subject is
// flagged and classed depressed (screening-conservative).
inline FusionOutcome fuse_subject(FusionStrategy strategy,
                                  const std::vector<SegmentCard>& cards,
                                  const std::map<int, Label>& predictions) {
    FusionOutcome out;
    if (strategy == FusionStrategy::majority_vote) {
        int score = 0;
        for (const auto& [segment_id, pred] : predictions) {
            out.path.emplace_back(segment_id, pred);
            score += label_sign(pred);
        }
        if (score == 0) out.vote_tie = true;
        out.verdict = score > 0 ? Label::healthy : Label::depressed;
        return out;
    }

    std::vector<char> used(cards.size(), 0);
    std::optional<Label> branch;
    int votes_healthy = 0, votes_depressed = 0;
    while (true) {
        const SegmentCard* card = detail::pick_card(strategy, cards, used, branch);
        if (card == nullptr) {
            out.exhausted = true;
            out.verdict = Label::depressed;
            return out;
        }
        used[static_cast<std::size_t>(card - cards.data())] = 1;
        const auto it = predictions.find(card->segment_id);
        if (it == predictions.end()) {
            out.skipped_missing = true;
            continue;  // branch context unchanged; the card is spent
        }
        const Label pred = it->second;
        out.path.emplace_back(card->segment_id, pred);
        (pred == Label::healthy ? votes_healthy : votes_depressed) += 1;
        if (votes_healthy == 2 || votes_depressed == 2) {
            out.verdict = votes_healthy == 2 ? Label::healthy : Label::depressed;
            return out;
        }
        branch = pred;
    }
}

// ---- prediction-matrix + card file plumbing --------------------------------

using PredictionTable = std::map<std::string, std::map<int, Label>>;

inline constexpr const char* kCardsHeader = "segment_id,accuracy,sensitivity,specificity";
inline constexpr const char* kPredictionsHeader = "subject_id,segment_id,prediction";

inline std::vector<SegmentCard> load_cards_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("cards: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCardsHeader) throw ParseError("cards: bad header: " + line);
    std::vector<SegmentCard> cards;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 4) {
            throw ParseError("cards: line " + std::to_string(line_no) +
                             ": expected 4 fields");
        }
        SegmentCard c;
        try {
            c.segment_id = std::stoi(fields[0]);
            c.accuracy = std::stod(fields[1]);
            c.sensitivity = std::stod(fields[2]);
            c.specificity = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw ParseError("cards: line " + std::to_string(line_no) + ": bad number");
        }
        for (double v : {c.accuracy, c.sensitivity, c.specificity}) {
            if (v < 0.0 || v > 1.0) {
                throw ValidationError("cards: line " + std::to_string(line_no) +
                                      ": metric outside [0, 1]");
            }
        }
        for (const auto& prev : cards) {
            if (prev.segment_id == c.segment_id) {
                throw DuplicateError("cards: duplicate segment " +
                                     std::to_string(c.segment_id));
            }
        }
        cards.push_back(c);
    }
    if (cards.empty()) throw EmptyInputError("cards: no rows");
    return cards;
}

inline void write_cards_csv(std::ostream& out, const std::vector<SegmentCard>& cards) {
    out << kCardsHeader << "\n";
    for (const auto& c : cards) {
        out << c.segment_id << ',' << format_significant(c.accuracy, 6) << ','
            << format_significant(c.sensitivity, 6) << ','
            << format_significant(c.specificity, 6) << "\n";
    }
}

inline PredictionTable load_predictions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("predictions: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kPredictionsHeader) throw ParseError("predictions: bad header: " + line);
    PredictionTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 3) {
            throw ParseError("predictions: line " + std::to_string(line_no) +
                             ": expected 3 fields");
        }
        int segment_id = 0;
        try {
            segment_id = std::stoi(fields[1]);
        } catch (const std::exception&) {
            throw ParseError("predictions: line " + std::to_string(line_no) +
                             ": bad segment id");
        }
        const Label pred = parse_label(fields[2]);
        auto& row = table[fields[0]];
        if (row.count(segment_id) != 0) {
            throw DuplicateError("predictions: duplicate (" + fields[0] + ", " +
                                 std::to_string(segment_id) + ")");
        }
        row[segment_id] = pred;
    }
    if (table.empty()) throw EmptyInputError("predictions: no rows");
    return table;
}

inline void write_predictions_csv(std::ostream& out, const PredictionTable& table) {
    out << kPredictionsHeader << "\n";
    for (const auto& [subject, row] : table) {
        for (const auto& [segment_id, pred] : row) {
            out << subject << ',' << segment_id << ',' << label_name(pred) << "\n";
        }
    }
}

inline nlohmann::json trace_to_json(FusionStrategy strategy, const FusionOutcome& outcome) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& [segment_id, pred] : outcome.path) {
        path.push_back({{"segment_id", segment_id}, {"prediction", label_name(pred)}});
    }
    nlohmann::json flags = nlohmann::json::array();
    if (outcome.exhausted) flags.push_back("exhausted");
    if (outcome.skipped_missing) flags.push_back("skipped_missing");
    if (outcome.vote_tie) flags.push_back("vote_tie");
    return {{"strategy", strategy_name(strategy)},
            {"path", path},
            {"label", label_name(outcome.verdict)},
            {"flags", flags}};
}

// ---- static tree rendering -------------------------------------------------

// The lazy rule induces a static tree when no predictions are missing:
// each node's children are what pick_card would choose after each outcome.
// Depth is bounded by three evaluations plus verdict leaves.
inline std::string export_tree_dot(FusionStrategy strategy,
                                   const std::vector<SegmentCard>& cards) {
    if (strategy == FusionStrategy::majority_vote) {
        throw ValidationError("export-tree: majority vote has no tree form");
    }
    if (cards.empty()) throw EmptyInputError("export-tree: no cards");
    std::ostringstream out;
    out << "digraph fusion {\n";
    out << "  node [shape=box];\n";
    int next_id = 0;

    struct Frame {
        std::vector<char> used;
        std::optional<Label> branch;
        int votes_healthy;
        int votes_depressed;
        int parent;      // dot node id, -1 for root
        Label via;       // edge label from parent
    };

    auto emit_leaf = [&](Label verdict, int parent, Label via) {
        const int id = next_id++;
        out << "  n" << id << " [shape=ellipse,label=\"" << label_name(verdict)
            << "\"];\n";
        if (parent >= 0) {
            out << "  n" << parent << " -> n" << id << " [label=\"" << label_name(via)
                << "\"];\n";
        }
    };

    std::vector<Frame> stack;
    stack.push_back({std::vector<char>(cards.size(), 0), std::nullopt, 0, 0, -1,
                     Label::depressed});
    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        const SegmentCard* card = detail::pick_card(strategy, cards, fr.used, fr.branch);
        if (card == nullptr) {
            emit_leaf(Label::depressed, fr.parent, fr.via);
            continue;
        }
        const int id = next_id++;
        out << "  n" << id << " [label=\"segment " << card->segment_id << "\"];\n";
        if (fr.parent >= 0) {
            out << "  n" << fr.parent << " -> n" << id << " [label=\""
                << label_name(fr.via) << "\"];\n";
        }
        auto used = fr.used;
        used[static_cast<std::size_t>(card - cards.data())] = 1;
        for (Label outcome : {Label::healthy, Label::depressed}) {
            const int vh = fr.votes_healthy + (outcome == Label::healthy ? 1 : 0);
            const int vd = fr.votes_depressed + (outcome == Label::depressed ? 1 : 0);
            if (vh == 2 || vd == 2) {
                emit_leaf(vh == 2 ? Label::healthy : Label::depressed, id, outcome);
            } else {
                stack.push_back({used, outcome, vh, vd, id, outcome});
            }
        }
    }
    out << "}\n";
    return out.str();
}

// ---- whole-table evaluation ------------------------------------------------

struct FusionEvaluation {
    std::map<std::string, FusionOutcome> outcomes;
    ConfusionCounts confusion;  // filled only when truth labels are supplied
};

inline FusionEvaluation fuse_table(FusionStrategy strategy,
                                   const std::vector<SegmentCard>& cards,
                                   const PredictionTable& predictions,
                                   const std::map<std::string, Label>* truth = nullptr) {
    FusionEvaluation eval;
    for (const auto& [subject, row] : predictions) {
        auto outcome = fuse_subject(strategy, cards, row);
        if (truth != nullptr) {
            const auto it = truth->find(subject);
            if (it != truth->end()) eval.confusion.add(it->second, outcome.verdict);
        }
        eval.outcomes.emplace(subject, std::move(outcome));
    }
    return eval;
}

}  // namespace vocatree
