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

#include "mamrc/mock_clients.hpp"
#include "mamrc/model_client.hpp"
#include "test_util.hpp"

namespace mamrc {
namespace {

TEST(Codec, RequestWireFormatIsExact) {
  const ModelRequest r{ModelMode::kCount, "q \"x\"", "p", "r7"};
  EXPECT_EQ(serialize_request(r), R"({"id":"r7","mode":"count","question":"q \"x\"","passage":"p"})");
  EXPECT_EQ(parse_request(serialize_request(r)), r);
}

TEST(Codec, ResponseWireFormatIsExact) {
  EXPECT_EQ(serialize_response({"r1", SpanResult{"French", 1.0}}),
            R"({"id":"r1","result":{"text":"French","score":1.0}})");
  EXPECT_EQ(serialize_response({"r2", CandidatesResult{{{{0, 2}, 0.5}}}}),
            R"({"id":"r2","result":{"candidates":[{"start":0,"end":2,"score":0.5}]}})");
}

std::string random_string(std::mt19937_64& rng) {
  static const std::string chars = "ab \"\\\n\t;:{}\xc3\xa9";
  std::string s;
  for (std::size_t i = 0, n = rng() % 12; i < n; ++i) s += chars[rng() % chars.size()];
  // Keep UTF-8 valid: drop a dangling lead byte.
  if (!s.empty() && static_cast<unsigned char>(s.back()) == 0xc3) s.pop_back();
  std::string clean;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == 0xc3 && (i + 1 >= s.size() || static_cast<unsigned char>(s[i + 1]) != 0xa9)) continue;
    if (c == 0xa9 && (i == 0 || static_cast<unsigned char>(s[i - 1]) != 0xc3)) continue;
    clean += s[i];
  }
  return clean;
}

ModelResult random_result(std::mt19937_64& rng, ModelMode mode) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (mode) {
    case ModelMode::kExtractOne: return SpanResult{random_string(rng), u(rng)};
    case ModelMode::kTag: {
      TagResult t;
      for (std::size_t i = 0, n = rng() % 20; i < n; ++i) t.probs.push_back(u(rng));
      return t;
    }
    case ModelMode::kCandidates: {
      CandidatesResult c;
      for (std::size_t i = 0, n = rng() % 6; i < n; ++i) {
        const std::size_t b = rng() % 30;
        c.candidates.push_back({{b, b + 1 + rng() % 4}, u(rng) * 10 - 5});
      }
      return c;
    }
    case ModelMode::kCount: {
      CountResult c{std::vector<double>(kMaxAnswers)};
      double sum = 0;
      for (auto& p : c.distribution) sum += (p = u(rng));
      for (auto& p : c.distribution) p /= sum;
      return c;
    }
    case ModelMode::kGenerate: break;
  }
  return GenerateResult{random_string(rng)};
}

TEST(Codec, RoundTripAllVariants) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const auto mode = static_cast<ModelMode>(rng() % 5);
    const ModelRequest req{mode, random_string(rng), random_string(rng), "id" + random_string(rng)};
    ASSERT_EQ(parse_request(serialize_request(req)), req);
    const ModelResponse resp{req.request_id, random_result(rng, mode)};
    ASSERT_EQ(parse_response(serialize_response(resp), mode), resp);
  }
}

TEST(Codec, InvalidResponsesCarryPayload) {
  const std::vector<std::pair<std::string, ModelMode>> bad = {
      {"not json", ModelMode::kTag},
      {R"({"result":{"probs":[]}})", ModelMode::kTag},
      {R"({"id":"1","result":{"probs":[1.5]}})", ModelMode::kTag},
      {R"({"id":"1","result":{"distribution":[1]}})", ModelMode::kCount},
      {R"({"id":"1","result":{"distribution":[0.5,0.1,0,0,0,0,0,0]}})", ModelMode::kCount},
      {R"({"id":"1","result":{"candidates":[{"start":3,"end":3,"score":1}]}})", ModelMode::kCandidates},
      {R"({"id":"1","result":{"text":7}})", ModelMode::kGenerate},
      {R"({"id":"1","error":"model crashed"})", ModelMode::kGenerate},
  };
  for (const auto& [line, mode] : bad) {
    try {
      parse_response(line, mode);
      ADD_FAILURE() << "accepted: " << line;
    } catch (const ProtocolError& e) {
      EXPECT_EQ(e.payload(), line);
    }
  }
}

class EchoClient : public ModelClient {
 public:
  explicit EchoClient(ModelResponse fixed) : fixed_(std::move(fixed)) {}
  ModelResponse query(const ModelRequest&) override { return fixed_; }

 private:
  ModelResponse fixed_;
};

TEST(ModelClient, AskValidatesIdAndVariant) {
  EchoClient wrong_id({"nope", SpanResult{"x", 1}});
  EXPECT_THROW(wrong_id.ask(ModelMode::kExtractOne, "q", "p"), ProtocolError);
  EchoClient wrong_variant({"r1", GenerateResult{"x"}});
  EXPECT_THROW(wrong_variant.ask(ModelMode::kExtractOne, "q", "p"), ProtocolError);
}

std::vector<Instance> languages() {
  return {make_instance("q1", Dataset::kOther, "What are the official languages?", "x English and French y",
                        {"English", "French"})};
}

TEST(Oracle, Examples) {
  auto oracle = make_mock(MockKind::kOracle, languages());
  const std::string p = "x English and French y";
  auto r = std::get<SpanResult>(oracle->ask(ModelMode::kExtractOne, "What are the official languages?", p).result);
  EXPECT_EQ(r.text, "English");
  r = std::get<SpanResult>(
      oracle->ask(ModelMode::kExtractOne, "What are the official languages? except English", p).result);
  EXPECT_EQ(r.text, "French");
  r = std::get<SpanResult>(
      oracle->ask(ModelMode::kExtractOne, "What are the official languages? except English, French", p).result);
  EXPECT_EQ(r.text, "");
  const auto tags = std::get<TagResult>(oracle->ask(ModelMode::kTag, "What are the official languages?", p).result);
  EXPECT_EQ(tags.probs, (std::vector<double>{0, 1, 0, 1, 0}));
  const auto count = std::get<CountResult>(oracle->ask(ModelMode::kCount, "What are the official languages?", p).result);
  EXPECT_EQ(count.distribution[1], 1.0);
  const auto gen = std::get<GenerateResult>(oracle->ask(ModelMode::kGenerate, "What are the official languages?", p).result);
  EXPECT_EQ(gen.text, "English; French");
  EXPECT_THROW(oracle->ask(ModelMode::kTag, "Unknown question", p), ProtocolError);
}

TEST(Oracle, ExclusionListWithCommasInsideAnswers) {
  auto oracle = make_mock(MockKind::kOracle,
                          {make_instance("q", Dataset::kOther, "Who?", "Dean, Floy Dean and Ray", {"Floy Dean", "Dean", "Ray"})});
  const auto r = std::get<SpanResult>(oracle->ask(ModelMode::kExtractOne, "Who? except Floy Dean", "Dean, Floy Dean and Ray").result);
  EXPECT_EQ(r.text, "Dean");
}

TEST(Scripted, LookupAndMiss) {
  auto scripted = make_mock(MockKind::kScripted, {}, json{{"q1", "There are 2 answers: English; French"}});
  EXPECT_EQ(std::get<GenerateResult>(scripted->ask(ModelMode::kGenerate, "q1", "p").result).text,
            "There are 2 answers: English; French");
  EXPECT_THROW(scripted->ask(ModelMode::kGenerate, "q2", "p"), ProtocolError);
  auto structured = make_mock(MockKind::kScripted, {}, json{{"q1", {{"probs", {0.2, 0.9}}}}});
  EXPECT_EQ(std::get<TagResult>(structured->ask(ModelMode::kTag, "q1", "a b").result).probs,
            (std::vector<double>{0.2, 0.9}));
}

TEST(Degenerate, Examples) {
  auto d = make_mock(MockKind::kDegenerate);
  EXPECT_EQ(std::get<SpanResult>(d->ask(ModelMode::kExtractOne, "q", "p").result).text, "");
  EXPECT_EQ(std::get<TagResult>(d->ask(ModelMode::kTag, "q", "a b c d e").result).probs, std::vector<double>(5, 0.0));
  EXPECT_TRUE(std::get<CandidatesResult>(d->ask(ModelMode::kCandidates, "q", "p").result).candidates.empty());
  EXPECT_EQ(std::get<GenerateResult>(d->ask(ModelMode::kGenerate, "q", "p").result).text, "");
}

}  // namespace
}  // namespace mamrc
