// Decision-level fusion: the two lazily built trees are checked against an
// independent interpreter of the documented selection policy on every
// possible prediction pattern, the constructed-advantage card set is
// enumerated in closed form, and the CSV/trace/DOT plumbing is exercised.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vocatree/fusion.hpp"

using namespace vocatree;

namespace {

// ---------------------------------------------------------------------------
// Reference interpreter, written from the policy statement alone: consult
// the best unused card for the current branch, tally its prediction, stop
// as soon as one class has two votes. Rankings are lexicographic with ties
// resolved toward the lower segment id.
// ---------------------------------------------------------------------------

bool ranks_higher(FusionStrategy strategy, std::optional<Label> branch,
                  const SegmentCard& a, const SegmentCard& b) {
  auto lex = [&](double a1, double b1, double a2, double b2) {
    if (a1 != b1) return a1 > b1;
    if (a2 != b2) return a2 > b2;
    return a.segment_id < b.segment_id;
  };
  if (strategy == FusionStrategy::sens_spec_tree) {
    if (branch.has_value() && *branch == Label::healthy)
      return lex(a.specificity, b.specificity, a.accuracy, b.accuracy);
    return lex(a.sensitivity, b.sensitivity, a.accuracy, b.accuracy);
  }
  if (branch.has_value() && *branch == Label::healthy)
    return lex(a.accuracy, b.accuracy, a.specificity, b.specificity);
  if (branch.has_value() && *branch == Label::depressed)
    return lex(a.accuracy, b.accuracy, a.sensitivity, b.sensitivity);
  if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  return a.segment_id < b.segment_id;
}

struct OracleRun {
  Label verdict = Label::depressed;
  std::vector<std::pair<int, Label>> path;
  bool exhausted = false;
  bool skipped = false;
};

OracleRun oracle_fuse(FusionStrategy strategy, std::vector<SegmentCard> cards,
                      const std::map<int, Label>& predictions) {
  OracleRun run;
  std::optional<Label> branch;
  int healthy_votes = 0, depressed_votes = 0;
  std::vector<bool> spent(cards.size(), false);
  while (true) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(cards.size()); ++i) {
      if (spent[i]) continue;
      if (best < 0 || ranks_higher(strategy, branch, cards[i], cards[best]))
        best = i;
    }
    if (best < 0) {
      run.exhausted = true;
      run.verdict = Label::depressed;
      return run;
    }
    spent[best] = true;
    const auto it = predictions.find(cards[best].segment_id);
    if (it == predictions.end()) {
      run.skipped = true;
      continue;
    }
    run.path.emplace_back(cards[best].segment_id, it->second);
    if (it->second == Label::healthy) {
      if (++healthy_votes == 2) {
        run.verdict = Label::healthy;
        return run;
      }
    } else {
      if (++depressed_votes == 2) {
        run.verdict = Label::depressed;
        return run;
      }
    }
    branch = it->second;
  }
}

SegmentCard make_card(int id, double acc, double sens, double spec) {
  SegmentCard c;
  c.segment_id = id;
  c.accuracy = acc;
  c.sensitivity = sens;
  c.specificity = spec;
  return c;
}

/// The constructed-advantage card set: one high-sensitivity screener, one
/// high-specificity confirmer, three mediocre tie-breakers.
std::vector<SegmentCard> advantage_cards() {
  return {
      make_card(1, 0.75, 1.0, 0.5),
      make_card(2, 0.75, 0.5, 1.0),
      make_card(3, 0.60, 0.6, 0.6),
      make_card(4, 0.60, 0.6, 0.6),
      make_card(5, 0.60, 0.6, 0.6),
  };
}

std::map<int, Label> pattern_predictions(const std::vector<SegmentCard>& cards,
                                         unsigned mask) {
  std::map<int, Label> preds;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    preds[cards[i].segment_id] =
        (mask >> i) & 1u ? Label::depressed : Label::healthy;
  }
  return preds;
}

std::vector<SegmentCard> random_cards(Rng& rng, int n) {
  std::vector<SegmentCard> cards;
  for (int i = 0; i < n; ++i) {
    const double sens = 0.3 + 0.7 * rng.uniform01();
    const double spec = 0.3 + 0.7 * rng.uniform01();
    cards.push_back(make_card(i + 1, 0.5 * (sens + spec), sens, spec));
  }
  return cards;
}

}  // namespace

TEST_CASE("tree fusion agrees with the reference interpreter exhaustively") {
  std::vector<std::vector<SegmentCard>> card_sets;
  card_sets.push_back(advantage_cards());
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    card_sets.push_back(random_cards(rng, 5));
  }

  for (const auto& cards : card_sets) {
    for (const FusionStrategy strategy :
         {FusionStrategy::accuracy_tree, FusionStrategy::sens_spec_tree}) {
      for (unsigned mask = 0; mask < 32u; ++mask) {
        const auto preds = pattern_predictions(cards, mask);
        const FusionOutcome got = fuse_subject(strategy, cards, preds);
        const OracleRun want = oracle_fuse(strategy, cards, preds);
        INFO("strategy " << strategy_name(strategy) << " mask " << mask);
        REQUIRE(got.verdict == want.verdict);
        REQUIRE(got.path == want.path);
        REQUIRE_FALSE(got.exhausted);
        REQUIRE_FALSE(got.skipped_missing);

        // Hard bound: at most three segments consulted, none twice.
        REQUIRE(got.path.size() >= 2);
        REQUIRE(got.path.size() <= 3);
        std::set<int> seen;
        for (const auto& [segment_id, pred] : got.path) seen.insert(segment_id);
        REQUIRE(seen.size() == got.path.size());
      }
    }
  }
}

TEST_CASE("constructed cards give the sensitivity-first tree its edge") {
  const auto cards = advantage_cards();

  // Closed-form enumeration: each card errs independently given the truth,
  // with miss rate 1 - sensitivity on depressed subjects and false-alarm
  // rate 1 - specificity on healthy subjects.
  auto correct_rate = [&](FusionStrategy strategy, Label truth) {
    double mass_correct = 0.0;
    for (unsigned mask = 0; mask < 32u; ++mask) {
      double prob = 1.0;
      for (std::size_t i = 0; i < cards.size(); ++i) {
        const double p_depressed = truth == Label::depressed
                                       ? cards[i].sensitivity
                                       : 1.0 - cards[i].specificity;
        prob *= ((mask >> i) & 1u) ? p_depressed : 1.0 - p_depressed;
      }
      if (prob == 0.0) continue;
      const FusionOutcome out =
          fuse_subject(strategy, cards, pattern_predictions(cards, mask));
      if (out.verdict == truth) mass_correct += prob;
    }
    return mass_correct;
  };

  const double tree_sens =
      correct_rate(FusionStrategy::sens_spec_tree, Label::depressed);
  const double tree_spec =
      correct_rate(FusionStrategy::sens_spec_tree, Label::healthy);
  const double vote_sens =
      correct_rate(FusionStrategy::majority_vote, Label::depressed);
  const double vote_spec =
      correct_rate(FusionStrategy::majority_vote, Label::healthy);

  // Frozen expected values for this exact card set.
  REQUIRE_THAT(tree_sens, Catch::Matchers::WithinAbs(0.8, 1e-12));
  REQUIRE_THAT(tree_spec, Catch::Matchers::WithinAbs(0.8, 1e-12));
  const double tree_acc = 0.5 * (tree_sens + tree_spec);
  const double vote_acc = 0.5 * (vote_sens + vote_spec);
  REQUIRE_THAT(tree_acc, Catch::Matchers::WithinAbs(0.8, 1e-12));
  REQUIRE_THAT(vote_acc, Catch::Matchers::WithinAbs(0.792, 1e-12));
  REQUIRE(tree_acc >= vote_acc);
}

TEST_CASE("root choice is invariant to common sensitivity rescaling") {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    Rng rng(seed);
    const auto base = random_cards(rng, 6);
    const auto preds = pattern_predictions(base, 0x2Au);
    const int base_root =
        fuse_subject(FusionStrategy::sens_spec_tree, base, preds).path[0].first;
    for (const double c : {0.25, 0.5, 0.75, 1.0}) {
      auto scaled = base;
      for (auto& card : scaled) card.sensitivity *= c;
      const FusionOutcome out =
          fuse_subject(FusionStrategy::sens_spec_tree, scaled, preds);
      INFO("seed " << seed << " scale " << c);
      REQUIRE(out.path[0].first == base_root);
    }
  }
}

TEST_CASE("a strict dominator heads every sensitivity-first path") {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    auto cards = random_cards(rng, 4);
    for (auto& c : cards) {
      c.sensitivity = std::min(c.sensitivity, 0.9);
      c.specificity = std::min(c.specificity, 0.9);
      c.accuracy = 0.5 * (c.sensitivity + c.specificity);
    }
    cards.push_back(make_card(9, 0.95, 0.95, 0.95));
    for (unsigned mask = 0; mask < 32u; ++mask) {
      const auto preds = pattern_predictions(cards, mask);
      const FusionOutcome out =
          fuse_subject(FusionStrategy::sens_spec_tree, cards, preds);
      REQUIRE(out.path.front().first == 9);
    }
  }
}

TEST_CASE("missing predictions spend the card without an evaluation") {
  const auto cards = advantage_cards();
  std::map<int, Label> preds = {{2, Label::healthy},
                                {3, Label::healthy},
                                {4, Label::depressed},
                                {5, Label::depressed}};
  // Root for sens_spec is segment 1 (highest sensitivity), which has no
  // prediction here, so the walk starts at the runner-up.
  const FusionOutcome out =
      fuse_subject(FusionStrategy::sens_spec_tree, cards, preds);
  REQUIRE(out.skipped_missing);
  for (const auto& [segment_id, pred] : out.path) REQUIRE(segment_id != 1);
  const OracleRun want = oracle_fuse(FusionStrategy::sens_spec_tree, cards, preds);
  REQUIRE(out.verdict == want.verdict);
  REQUIRE(out.path == want.path);
}

TEST_CASE("running out of cards defaults to the screening-positive class") {
  const std::vector<SegmentCard> cards = {make_card(1, 0.7, 0.7, 0.7),
                                          make_card(2, 0.6, 0.6, 0.6)};
  SECTION("split votes exhaust the deck") {
    const std::map<int, Label> preds = {{1, Label::healthy},
                                        {2, Label::depressed}};
    const FusionOutcome out =
        fuse_subject(FusionStrategy::accuracy_tree, cards, preds);
    REQUIRE(out.exhausted);
    REQUIRE(out.verdict == Label::depressed);
    REQUIRE(out.path.size() == 2);
  }
  SECTION("a single available card cannot reach two votes") {
    const std::map<int, Label> preds = {{1, Label::healthy}};
    const FusionOutcome out =
        fuse_subject(FusionStrategy::sens_spec_tree, cards, preds);
    REQUIRE(out.exhausted);
    REQUIRE(out.skipped_missing);
    REQUIRE(out.verdict == Label::depressed);
  }
  SECTION("no predictions at all") {
    const FusionOutcome out = fuse_subject(FusionStrategy::sens_spec_tree,
                                           cards, {});
    REQUIRE(out.exhausted);
    REQUIRE(out.path.empty());
    REQUIRE(out.verdict == Label::depressed);
  }
}

TEST_CASE("majority vote counts every prediction and breaks ties down") {
  const auto cards = advantage_cards();
  SECTION("clear majority") {
    const std::map<int, Label> preds = {{1, Label::healthy},
                                        {2, Label::healthy},
                                        {3, Label::depressed}};
    const FusionOutcome out =
        fuse_subject(FusionStrategy::majority_vote, cards, preds);
    REQUIRE(out.verdict == Label::healthy);
    REQUIRE(out.path.size() == 3);
    REQUIRE_FALSE(out.vote_tie);
  }
  SECTION("tie goes to depressed") {
    const std::map<int, Label> preds = {{1, Label::healthy},
                                        {2, Label::depressed}};
    const FusionOutcome out =
        fuse_subject(FusionStrategy::majority_vote, cards, preds);
    REQUIRE(out.vote_tie);
    REQUIRE(out.verdict == Label::depressed);
  }
}

TEST_CASE("strategy names parse and print consistently") {
  REQUIRE(parse_strategy("vote") == FusionStrategy::majority_vote);
  REQUIRE(parse_strategy("majority_vote") == FusionStrategy::majority_vote);
  REQUIRE(parse_strategy("accuracy_tree") == FusionStrategy::accuracy_tree);
  REQUIRE(parse_strategy("sens_spec_tree") == FusionStrategy::sens_spec_tree);
  REQUIRE_THROWS_AS(parse_strategy("bogus"), ValidationError);
  REQUIRE(std::string(strategy_name(FusionStrategy::majority_vote)) == "vote");
  REQUIRE(std::string(strategy_name(FusionStrategy::sens_spec_tree)) ==
          "sens_spec_tree");
}

TEST_CASE("card files round-trip and reject malformed input") {
  // Values chosen to be exact at six significant digits.
  const std::vector<SegmentCard> cards = {make_card(1, 0.8125, 0.75, 0.875),
                                          make_card(19, 0.9, 1.0, 0.8)};
  std::ostringstream out;
  write_cards_csv(out, cards);
  std::istringstream in(out.str());
  const auto back = load_cards_csv(in);
  REQUIRE(back.size() == 2);
  REQUIRE(back[0].segment_id == 1);
  REQUIRE(back[0].accuracy == 0.8125);
  REQUIRE(back[1].specificity == 0.8);

  auto expect_throw = [](const std::string& text, auto tag) {
    std::istringstream bad(text);
    using E = decltype(tag);
    REQUIRE_THROWS_AS(load_cards_csv(bad), E);
  };
  expect_throw("", ParseError{""});
  expect_throw("wrong,header\n", ParseError{""});
  expect_throw(std::string(kCardsHeader) + "\n1,0.5,0.5\n", ParseError{""});
  expect_throw(std::string(kCardsHeader) + "\n1,0.5,abc,0.5\n", ParseError{""});
  expect_throw(std::string(kCardsHeader) + "\n1,1.5,0.5,0.5\n",
               ValidationError{""});
  expect_throw(std::string(kCardsHeader) + "\n1,0.5,0.5,0.5\n1,0.6,0.6,0.6\n",
               DuplicateError{""});
  expect_throw(std::string(kCardsHeader) + "\n", EmptyInputError{""});
}

TEST_CASE("prediction files round-trip and reject malformed input") {
  PredictionTable table;
  table["D001"][1] = Label::depressed;
  table["D001"][19] = Label::healthy;
  table["H003"][1] = Label::healthy;
  std::ostringstream out;
  write_predictions_csv(out, table);
  std::istringstream in(out.str());
  const PredictionTable back = load_predictions_csv(in);
  REQUIRE(back == table);

  auto expect_throw = [](const std::string& text, auto tag) {
    std::istringstream bad(text);
    using E = decltype(tag);
    REQUIRE_THROWS_AS(load_predictions_csv(bad), E);
  };
  expect_throw("", ParseError{""});
  expect_throw("subject,segment\n", ParseError{""});
  expect_throw(std::string(kPredictionsHeader) + "\nD001,xx,healthy\n",
               ParseError{""});
  expect_throw(std::string(kPredictionsHeader) + "\nD001,1,maybe\n",
               ValidationError{""});
  expect_throw(std::string(kPredictionsHeader) +
                   "\nD001,1,healthy\nD001,1,depressed\n",
               DuplicateError{""});
  expect_throw(std::string(kPredictionsHeader) + "\n", EmptyInputError{""});
}

TEST_CASE("fusion traces serialize the consulted path") {
  const auto cards = advantage_cards();
  const auto preds = pattern_predictions(cards, 0x1Fu);  // all depressed
  const FusionOutcome out =
      fuse_subject(FusionStrategy::sens_spec_tree, cards, preds);
  const nlohmann::json j = trace_to_json(FusionStrategy::sens_spec_tree, out);
  REQUIRE(j.at("strategy") == "sens_spec_tree");
  REQUIRE(j.at("label") == "depressed");
  REQUIRE(j.at("path").size() == 2);  // two straight depressed votes
  REQUIRE(j.at("path")[0].at("segment_id").get<int>() == 1);
  REQUIRE(j.at("path")[0].at("prediction") == "depressed");
  REQUIRE(j.at("flags").empty());
}

TEST_CASE("static tree export renders the policy as a graph") {
  const auto cards = advantage_cards();
  const std::string dot = export_tree_dot(FusionStrategy::sens_spec_tree, cards);
  REQUIRE(dot.rfind("digraph fusion {", 0) == 0);
  REQUIRE(dot.find("n0 [label=\"segment 1\"]") != std::string::npos);
  REQUIRE(dot.find("shape=ellipse") != std::string::npos);
  REQUIRE(dot.find("[label=\"healthy\"]") != std::string::npos);
  REQUIRE(dot.find("[label=\"depressed\"]") != std::string::npos);

  // After a healthy root prediction the policy moves to the best
  // specificity card, segment 2.
  const std::regex healthy_child(
      R"(n(\d+) \[label="segment 2"\];\s*\n\s*n0 -> n\1 \[label="healthy"\])");
  REQUIRE(std::regex_search(dot, healthy_child));

  REQUIRE_THROWS_AS(export_tree_dot(FusionStrategy::majority_vote, cards),
                    ValidationError);
  REQUIRE_THROWS_AS(export_tree_dot(FusionStrategy::sens_spec_tree, {}),
                    EmptyInputError);
}

TEST_CASE("whole-table fusion fills a confusion matrix from truth") {
  const auto cards = advantage_cards();
  PredictionTable table;
  table["D001"] = pattern_predictions(cards, 0x1Fu);  // all depressed
  table["H001"] = pattern_predictions(cards, 0x00u);  // all healthy
  table["H002"] = pattern_predictions(cards, 0x01u);  // root says depressed
  const std::map<std::string, Label> truth = {{"D001", Label::depressed},
                                              {"H001", Label::healthy},
                                              {"H002", Label::healthy}};
  const FusionEvaluation eval =
      fuse_table(FusionStrategy::sens_spec_tree, cards, table, &truth);
  REQUIRE(eval.outcomes.size() == 3);
  REQUIRE(eval.confusion.total() == 3);
  REQUIRE(eval.outcomes.at("D001").verdict == Label::depressed);
  REQUIRE(eval.outcomes.at("H001").verdict == Label::healthy);
  // H002: segment 1 says depressed, then the sensitivity branch consults
  // segment 3 (best remaining sensitivity), which says healthy, then
  // segment 2; healthy reaches two votes first.
  REQUIRE(eval.outcomes.at("H002").verdict == Label::healthy);
  REQUIRE(eval.confusion.tp == 1);
  REQUIRE(eval.confusion.tn == 2);

  const FusionEvaluation no_truth =
      fuse_table(FusionStrategy::majority_vote, cards, table, nullptr);
  REQUIRE(no_truth.confusion.total() == 0);
  REQUIRE(no_truth.outcomes.size() == 3);
}
