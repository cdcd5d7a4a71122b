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

#include <algorithm>
#include <random>

#include "mamrc/ensemble.hpp"

namespace mamrc {
namespace {

std::vector<PredictionSet> sets(const std::vector<std::vector<std::string>>& texts) {
  std::vector<PredictionSet> out;
  for (std::size_t i = 0; i < texts.size(); ++i)
    out.push_back(PredictionSet::from_texts("q", texts[i], "m" + std::to_string(i)));
  return out;
}

std::vector<std::string> sorted_normalized(const PredictionSet& p) {
  std::vector<std::string> out;
  for (const auto& s : p.spans) out.push_back(normalize(s.text));
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Vote, Examples) {
  EXPECT_EQ(vote(sets({{"x"}, {"x", "y"}, {"z"}, {}})).texts(), (std::vector<std::string>{"x"}));
  EXPECT_EQ(vote(sets({{"New England"}, {"New England Patriots"}})).texts(),
            (std::vector<std::string>{"New England Patriots"}));
  EXPECT_EQ(sorted_normalized(vote(sets({{"w"}, {"b"}, {"c"}, {"d"}}))),
            (std::vector<std::string>{"b", "c", "d", "w"}));
}

TEST(Vote, OneVotePerModelPerClass) {
  const auto t = tally_votes(sets({{"New England", "New England Patriots"}, {"Boston"}}));
  ASSERT_EQ(t.classes.size(), 2u);
  EXPECT_EQ(t.classes[1].representative, "New England Patriots");
  EXPECT_EQ(t.classes[1].votes(), 1u);
  // No class has two votes, so everything is kept.
  EXPECT_EQ(vote(sets({{"New England", "New England Patriots"}, {"Boston"}})).spans.size(), 2u);
}

TEST(Vote, TransitiveChainsCollapse) {
  const auto t = tally_votes(sets({{"a b"}, {"b c d"}, {"a b c d e"}}));
  ASSERT_EQ(t.classes.size(), 1u);
  EXPECT_EQ(t.classes[0].representative, "a b c d e");
  EXPECT_EQ(t.classes[0].votes(), 3u);
}

TEST(Vote, Errors) {
  EXPECT_THROW(vote(sets({{"x"}})), InvalidArgument);
  auto s = sets({{"x"}, {"x"}});
  s[1].instance_id = "other";
  EXPECT_THROW(vote(s), InvalidArgument);
}

std::vector<std::vector<std::string>> random_input(std::mt19937_64& rng, bool containment_free) {
  static const std::vector<std::string> phrases = {"p", "b", "p b", "b c", "p b c", "d", "The D", "e f",
                                                   "E", "g", "g h", "x y z"};
  static const std::vector<std::string> flat = {"alpha", "bravo", "charlie", "delta", "echo", "fox"};
  const auto& pool = containment_free ? flat : phrases;
  std::vector<std::vector<std::string>> out(2 + rng() % 4);
  for (auto& m : out)
    for (std::size_t i = 0, n = rng() % 4; i < n; ++i) {
      const auto& p = pool[rng() % pool.size()];
      if (std::find(m.begin(), m.end(), p) == m.end()) m.push_back(p);
    }
  return out;
}

TEST(Vote, ModelOrderInvariance) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    auto input = random_input(rng, false);
    const auto expected = vote(sets(input));
    std::shuffle(input.begin(), input.end(), rng);
    for (auto& m : input) std::shuffle(m.begin(), m.end(), rng);
    ASSERT_EQ(vote(sets(input)).texts(), expected.texts());
  }
}

TEST(Vote, UnanimityOnContainmentFreeSets) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    auto input = random_input(rng, true);
    for (auto& m : input) m = input.front();
    const auto out = vote(sets(input));
    auto expected = input.front();
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(sorted_normalized(out), expected);
  }
}

TEST(Vote, OutputBoundedByClassCount) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 300; ++t) {
    const auto s = sets(random_input(rng, false));
    ASSERT_LE(vote(s).spans.size(), tally_votes(s).classes.size());
  }
}

}  // namespace
}  // namespace mamrc
