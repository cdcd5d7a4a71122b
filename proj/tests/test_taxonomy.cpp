// Copyright 2026 The mamrc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mamrc/taxonomy.hpp"
#include "test_util.hpp"

namespace mamrc {
namespace {

using Hits = std::vector<std::pair<std::string, ClueType>>;

Hits detect(const std::string& q) {
  const auto t = tokenize(q);
  Hits out;
  for (const auto& c : hits_to_clues(t, detect_clue_words(t))) out.emplace_back(c.text, c.type);
  return out;
}

TEST(DetectClueWords, ClueWordExamples) {
  EXPECT_EQ(detect("Which two players completed 1-yard TD pass?"), (Hits{{"two", ClueType::kCardinal}}));
  EXPECT_EQ(detect("Who scored the first touchdown of the game?"), (Hits{{"first", ClueType::kOrdinal}}));
  EXPECT_EQ(detect("What's the largest pizza chain in America?"), (Hits{{"largest", ClueType::kCompSuper}}));
  EXPECT_EQ(detect("Is San Juan Bautista incorporated or unincorporated?"), (Hits{{"or", ClueType::kAlternative}}));
  EXPECT_EQ(detect("What are the first names of the trio who try to call 911?"),
            (Hits{{"trio", ClueType::kOtherSemantics}}));
}

TEST(DetectClueWords, QuestionsWithoutClues) {
  EXPECT_EQ(detect("1 light year equal to how many km?"), Hits{});
  EXPECT_EQ(detect("Which countries does the Danube River flow through?"), Hits{});
  EXPECT_EQ(detect("Who won Super Bowl XXXIX?"), Hits{});
  EXPECT_EQ(detect("How much is a ticket?"), Hits{});
  EXPECT_EQ(detect(""), Hits{});
}

TEST(DetectClueWords, MoreForms) {
  EXPECT_EQ(detect("What are the two official languages of Puerto Rico?"), (Hits{{"two", ClueType::kCardinal}}));
  EXPECT_EQ(detect("Who finished 3rd in the race?"), (Hits{{"3rd", ClueType::kOrdinal}}));
  EXPECT_EQ(detect("Name the top 5 scorers"), (Hits{{"top", ClueType::kOtherSemantics}, {"5", ClueType::kCardinal}}));
  EXPECT_EQ(detect("Which team had more yards?"), (Hits{{"more", ClueType::kCompSuper}}));
  EXPECT_EQ(detect("What is the name of the person who sang it?"),
            (Hits{{"name of the person", ClueType::kOtherSemantics}}));
  EXPECT_EQ(detect("Which player was taller?"), (Hits{{"taller", ClueType::kCompSuper}}));
}

TEST(DetectClueWords, HitsAreInsideAndDisjoint) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> words = {"which", "two", "the", "first", "or", "largest", "name", "of", "person",
                                          "how", "many", "3rd", "Bigger", "top", "12", "only", "players", "?"};
  for (int i = 0; i < 3000; ++i) {
    std::string q;
    for (int k = 0, n = rng() % 12; k < n; ++k) q += words[rng() % words.size()] + " ";
    const auto t = tokenize(q);
    const auto hits = detect_clue_words(t);
    for (std::size_t h = 0; h < hits.size(); ++h) {
      ASSERT_LT(hits[h].tokens.begin, hits[h].tokens.end);
      ASSERT_LE(hits[h].tokens.end, t.size());
      if (h) {
        ASSERT_LE(hits[h - 1].tokens.end, hits[h].tokens.begin);
      }
    }
  }
}

TEST(Lexicon, BundledFileMatchesEmbeddedCopy) {
  EXPECT_EQ(testing::read_file(std::string(MAMRC_SOURCE_DIR) + "/data/clues.tsv"), std::string(kDefaultLexiconTsv));
}

TEST(Lexicon, ParseErrorsNameTheLine) {
  try {
    Lexicon::parse("# comment\ntwo\tcardinal\nthree cardinal\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(Lexicon::parse("two\tnumber\n"), ParseError);
}

TEST(Lexicon, CustomLexiconAndToggle) {
  const auto lex = Lexicon::parse("and\tother_semantics\ncouple of\tother_semantics\n");
  const auto t = tokenize("Name a couple of cats and dogs");
  const auto hits = detect_clue_words(t, lex);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].tokens, (Range{2, 4}));
  EXPECT_EQ(hits[1].tokens, (Range{5, 6}));
  // Not a clue with the bundled lexicon.
  EXPECT_TRUE(detect_clue_words(tokenize("cats and dogs")).empty());
}

TEST(RecallStage1, PartitionsCorpus) {
  std::vector<Instance> corpus;
  for (const auto* q : {"Which two players completed 1-yard TD pass?", "What's the largest pizza chain in America?",
                        "Is San Juan Bautista incorporated or unincorporated?", "1 light year equal to how many km?"})
    corpus.push_back(make_instance(std::to_string(corpus.size()), Dataset::kOther, q, "x", {"x"}));
  const auto p = recall_stage1(corpus);
  EXPECT_EQ(p.recalled, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(p.remaining, (std::vector<std::size_t>{3}));
  EXPECT_TRUE(recall_stage1({corpus[3]}).recalled.empty());
}

AnnotatorRecord rec(const char* who, TaxonomyLabel label, Round round) {
  return {who, "i1", std::move(label), round};
}

TEST(Adjudicate, Examples) {
  const auto P = TaxonomyLabel::passage_dependent();
  const auto Q = TaxonomyLabel::question_dependent();
  const auto B = TaxonomyLabel::bad_annotation();
  auto v = adjudicate({rec("a", P, Round::kFirst), rec("b", P, Round::kSecond)});
  EXPECT_TRUE(v.final());
  EXPECT_EQ(v.label, P);
  v = adjudicate({rec("a", Q, Round::kFirst), rec("b", B, Round::kSecond)});
  EXPECT_EQ(v.label, B);
  v = adjudicate({rec("a", P, Round::kFirst), rec("b", Q, Round::kSecond), rec("c", Q, Round::kAdjudication)});
  EXPECT_TRUE(v.final());
  EXPECT_EQ(v.label, Q);
  v = adjudicate({rec("a", P, Round::kFirst), rec("b", Q, Round::kSecond)});
  EXPECT_FALSE(v.final());
  EXPECT_THROW(adjudicate({rec("a", P, Round::kFirst)}), InvalidArgument);
  EXPECT_EQ(adjudicate({rec("a", B, Round::kFirst)}).label, B);
}

TEST(Adjudicate, MergesAgreedClues) {
  const auto q = tokenize("Which two or three?");
  auto l1 = TaxonomyLabel::question_dependent({{"two", ClueType::kCardinal, std::nullopt}});
  auto l2 = TaxonomyLabel::question_dependent({{"or", ClueType::kAlternative, std::nullopt},
                                                {"two", ClueType::kCardinal, std::nullopt}});
  locate_clues(q, &l1);
  locate_clues(q, &l2);
  const auto v = adjudicate({rec("a", l1, Round::kFirst), rec("b", l2, Round::kSecond)});
  ASSERT_EQ(v.label.clues.size(), 2u);
  EXPECT_EQ(v.label.clues[0].text, "two");
  EXPECT_EQ(v.label.clues[1].text, "or");
}

TEST(Adjudicate, OrderInsensitiveAndBadAbsorbs) {
  const std::vector<TaxonomyLabel> labels = {TaxonomyLabel::passage_dependent(), TaxonomyLabel::question_dependent(),
                                             TaxonomyLabel::bad_annotation()};
  for (const auto& a : labels)
    for (const auto& b : labels) {
      const auto x = adjudicate({rec("a", a, Round::kFirst), rec("b", b, Round::kSecond)});
      const auto y = adjudicate({rec("b", b, Round::kSecond), rec("a", a, Round::kFirst)});
      EXPECT_EQ(x.status, y.status);
      EXPECT_EQ(x.label, y.label);
      for (const auto& c : labels) {
        const auto z = adjudicate({rec("a", a, Round::kFirst), rec("b", b, Round::kSecond),
                                   rec("c", c, Round::kAdjudication), rec("d", TaxonomyLabel::bad_annotation(), Round::kFirst)});
        EXPECT_EQ(z.label.kind, TaxonomyKind::kBadAnnotation);
      }
    }
}

TEST(CohensKappa, Examples) {
  EXPECT_EQ(cohens_kappa({{TaxonomyKind::kPassageDependent, TaxonomyKind::kPassageDependent},
                          {TaxonomyKind::kQuestionDependent, TaxonomyKind::kQuestionDependent}}),
            1.0);
  // Everyone always says the same single label: p_e == 1.
  EXPECT_EQ(cohens_kappa({{TaxonomyKind::kBadAnnotation, TaxonomyKind::kBadAnnotation}}), 1.0);
  const auto pairs = testing::kappa_fixture();
  ASSERT_EQ(pairs.size(), 20u);
  EXPECT_NEAR(cohens_kappa(pairs), 36.0 / 61.0, 1e-9);
  EXPECT_THROW(cohens_kappa({}), InvalidArgument);
}

TEST(CohensKappa, ChanceLevelNearZero) {
  std::mt19937_64 rng(12);
  std::vector<std::pair<TaxonomyKind, TaxonomyKind>> pairs;
  for (int i = 0; i < 10000; ++i)
    pairs.emplace_back(kAllKinds[rng() % 3], kAllKinds[rng() % 3]);
  EXPECT_LT(std::abs(cohens_kappa(pairs)), 0.05);
}

TEST(CohensKappa, SelfPairingIsOne) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::pair<TaxonomyKind, TaxonomyKind>> pairs;
    for (int i = 0, n = 1 + rng() % 30; i < n; ++i) {
      const auto k = kAllKinds[rng() % 3];
      pairs.emplace_back(k, k);
    }
    ASSERT_EQ(cohens_kappa(pairs), 1.0);
  }
}

}  // namespace
}  // namespace mamrc
