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

// Shared data model: instances, gold answer sets, predictions and the
// answer-count taxonomy labels attached to questions.

#ifndef MAMRC_CORE_HPP_
#define MAMRC_CORE_HPP_

#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mamrc/error.hpp"
#include "mamrc/text.hpp"

namespace mamrc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Default cap on the number of answers a count head may predict.
inline constexpr int kMaxAnswers = 8;

enum class Dataset { kDrop, kQuoref, kMultiSpanQA, kOther };

inline std::string_view dataset_name(Dataset d) {
  switch (d) {
    case Dataset::kDrop: return "DROP";
    case Dataset::kQuoref: return "Quoref";
    case Dataset::kMultiSpanQA: return "MultiSpanQA";
    case Dataset::kOther: break;
  }
  return "Other";
}

inline std::optional<Dataset> parse_dataset(std::string_view s) {
  if (s == "DROP") return Dataset::kDrop;
  if (s == "Quoref") return Dataset::kQuoref;
  if (s == "MultiSpanQA") return Dataset::kMultiSpanQA;
  if (s == "Other") return Dataset::kOther;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Taxonomy labels

enum class ClueType { kCardinal, kOrdinal, kCompSuper, kAlternative, kOtherSemantics };

inline constexpr std::array<ClueType, 5> kAllClueTypes = {
    ClueType::kCardinal, ClueType::kOrdinal, ClueType::kCompSuper,
    ClueType::kAlternative, ClueType::kOtherSemantics};

inline std::string_view clue_type_name(ClueType t) {
  switch (t) {
    case ClueType::kCardinal: return "cardinal";
    case ClueType::kOrdinal: return "ordinal";
    case ClueType::kCompSuper: return "comp_super";
    case ClueType::kAlternative: return "alternative";
    case ClueType::kOtherSemantics: break;
  }
  return "other_semantics";
}

inline std::optional<ClueType> parse_clue_type(std::string_view s) {
  for (auto t : kAllClueTypes)
    if (clue_type_name(t) == s) return t;
  return std::nullopt;
}

enum class TaxonomyKind { kPassageDependent, kQuestionDependent, kBadAnnotation };

inline constexpr std::array<TaxonomyKind, 3> kAllKinds = {
    TaxonomyKind::kPassageDependent, TaxonomyKind::kQuestionDependent,
    TaxonomyKind::kBadAnnotation};

inline std::string_view kind_name(TaxonomyKind k) {
  switch (k) {
    case TaxonomyKind::kPassageDependent: return "passage_dependent";
    case TaxonomyKind::kQuestionDependent: return "question_dependent";
    case TaxonomyKind::kBadAnnotation: break;
  }
  return "bad_annotation";
}

inline std::optional<TaxonomyKind> parse_kind(std::string_view s) {
  for (auto k : kAllKinds)
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

// One clue word (or phrase) in a question. `tokens` is present when the clue
// has been located in the tokenized question.
struct Clue {
  std::string text;
  ClueType type = ClueType::kCardinal;
  std::optional<Range> tokens;

  friend bool operator==(const Clue&, const Clue&) = default;
};

struct TaxonomyLabel {
  TaxonomyKind kind = TaxonomyKind::kPassageDependent;
  // Only QuestionDependent labels carry clues; empty means the
  // without-clue-words subtype.
  std::vector<Clue> clues;

  bool with_clue_words() const {
    return kind == TaxonomyKind::kQuestionDependent && !clues.empty();
  }

  // Distinct clue types, in enum order.
  std::vector<ClueType> clue_types() const {
    std::set<ClueType> seen;
    for (const auto& c : clues) seen.insert(c.type);
    return {seen.begin(), seen.end()};
  }

  friend bool operator==(const TaxonomyLabel&, const TaxonomyLabel&) = default;

  static TaxonomyLabel passage_dependent() { return {TaxonomyKind::kPassageDependent, {}}; }
  static TaxonomyLabel bad_annotation() { return {TaxonomyKind::kBadAnnotation, {}}; }
  static TaxonomyLabel question_dependent(std::vector<Clue> clues = {}) {
    return {TaxonomyKind::kQuestionDependent, std::move(clues)};
  }
};

// {label, clue?: {spans: [...], types: [...]}}. Clue token ranges are not
// serialized; they are re-derived against the question when attached.
inline ordered_json label_to_json(const TaxonomyLabel& label) {
  ordered_json j;
  j["label"] = kind_name(label.kind);
  if (!label.clues.empty()) {
    ordered_json spans = ordered_json::array(), types = ordered_json::array();
    for (const auto& c : label.clues) {
      spans.push_back(c.text);
      types.push_back(clue_type_name(c.type));
    }
    j["clue"] = {{"spans", spans}, {"types", types}};
  }
  return j;
}

template <typename Json>
TaxonomyLabel label_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("label") || !j["label"].is_string())
    throw InvalidArgument("taxonomy label must be an object with a string 'label'");
  const auto name = j["label"].template get<std::string>();
  const auto kind = parse_kind(name);
  if (!kind) throw InvalidArgument("unknown taxonomy label '" + name + "'");
  TaxonomyLabel label{*kind, {}};
  if (j.contains("clue") && !j["clue"].is_null()) {
    const auto& clue = j["clue"];
    const auto& spans = clue.at("spans");
    const auto& types = clue.at("types");
    if (!spans.is_array() || !types.is_array() || spans.size() != types.size())
      throw InvalidArgument("clue.spans and clue.types must be equal-length arrays");
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const auto tname = types[i].template get<std::string>();
      const auto type = parse_clue_type(tname);
      if (!type) throw InvalidArgument("unknown clue type '" + tname + "'");
      label.clues.push_back({spans[i].template get<std::string>(), *type, std::nullopt});
    }
  }
  if (label.kind != TaxonomyKind::kQuestionDependent && !label.clues.empty())
    throw InvalidArgument("only question_dependent labels may carry clues");
  return label;
}

// ---------------------------------------------------------------------------
// Answers and instances

// First occurrence of the answer's normalized token sequence in the
// passage's normalized token sequence. Tokens that normalize to nothing
// (articles, bare punctuation) are skipped on both sides.
inline std::optional<Range> ground_span(const TokenizedText& passage,
                                        std::string_view answer) {
  const auto needle = normalized_tokens(answer);
  if (needle.empty()) return std::nullopt;
  std::vector<std::size_t> index;
  std::vector<std::string> hay;
  for (std::size_t i = 0; i < passage.size(); ++i) {
    auto n = normalize(passage.tokens()[i]);
    if (n.empty()) continue;
    index.push_back(i);
    hay.push_back(std::move(n));
  }
  if (hay.size() < needle.size()) return std::nullopt;
  for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size() && ok; ++k) ok = hay[s + k] == needle[k];
    if (ok) return Range{index[s], index[s + needle.size() - 1] + 1};
  }
  return std::nullopt;
}

struct AnswerSpan {
  std::string text;
  // Byte range in the passage raw text.
  std::optional<Range> chars;
  // Token range in the passage.
  std::optional<Range> tokens;

  std::string normalized() const { return normalize(text); }

  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

// The complete, unordered gold answer set of one question.
class AnswerSet {
 public:
  AnswerSet() = default;

  // Throws InvalidArgument when two spans share a normalized text.
  explicit AnswerSet(std::vector<AnswerSpan> spans) : spans_(std::move(spans)) {
    std::set<std::string> seen;
    for (const auto& s : spans_)
      if (!seen.insert(s.normalized()).second)
        throw InvalidArgument("duplicate answer '" + s.text + "' in answer set");
  }

  static AnswerSet from_texts(const std::vector<std::string>& texts) {
    std::vector<AnswerSpan> spans;
    for (const auto& t : texts) spans.push_back({t, std::nullopt, std::nullopt});
    return AnswerSet(std::move(spans));
  }

  const std::vector<AnswerSpan>& spans() const { return spans_; }
  std::size_t size() const { return spans_.size(); }
  bool empty() const { return spans_.empty(); }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    for (const auto& s : spans_) out.push_back(s.text);
    return out;
  }

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;

 private:
  std::vector<AnswerSpan> spans_;
};

struct Instance {
  std::string id;
  Dataset dataset = Dataset::kOther;
  TokenizedText question;
  TokenizedText passage;
  AnswerSet gold;
  std::optional<TaxonomyLabel> taxonomy;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Prediction {
  std::string text;
  std::optional<double> score;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// One producer's answers for one instance, in emission order.
struct PredictionSet {
  std::string instance_id;
  std::vector<Prediction> spans;
  std::string producer;

  static PredictionSet from_texts(std::string id, const std::vector<std::string>& texts,
                                  std::string producer = {}) {
    PredictionSet p{std::move(id), {}, std::move(producer)};
    for (const auto& t : texts) p.spans.push_back({t, std::nullopt});
    return p;
  }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    for (const auto& s : spans) out.push_back(s.text);
    return out;
  }

  void validate() const {
    for (const auto& s : spans)
      if (s.score && !std::isfinite(*s.score))
        throw InvalidArgument("non-finite score in prediction for " + instance_id);
  }

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

// Attaches token ranges to clues by locating their text in the question.
inline void locate_clues(const TokenizedText& question, TaxonomyLabel* label) {
  for (auto& c : label->clues)
    if (!c.tokens) c.tokens = ground_span(question, c.text);
}

}  // namespace mamrc

#endif  // MAMRC_CORE_HPP_
