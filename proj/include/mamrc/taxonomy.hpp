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

// Answer-count taxonomy machinery: clue-word detection used to pre-select
// question-dependent candidates, label adjudication between annotators and
// Cohen's kappa over the three label kinds.

#ifndef MAMRC_TAXONOMY_HPP_
#define MAMRC_TAXONOMY_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mamrc/core.hpp"
#include "mamrc/default_lexicon.hpp"

namespace mamrc {

// Lowercased token with leading/trailing ASCII punctuation removed.
inline std::string clue_key(std::string_view token) {
  while (!token.empty() && is_punct(token.front())) token.remove_prefix(1);
  while (!token.empty() && is_punct(token.back())) token.remove_suffix(1);
  return to_lower(token);
}

class Lexicon {
 public:
  struct Entry {
    std::vector<std::string> surface;
    // nullopt marks a stop pattern.
    std::optional<ClueType> type;
  };

  // Parses `surface<TAB>type` lines. Blank lines and lines starting with '#'
  // are ignored. Throws ParseError naming the line on bad input.
  static Lexicon parse(std::string_view tsv) {
    Lexicon lex;
    std::size_t pos = 0, line_no = 0;
    while (pos <= tsv.size()) {
      auto nl = tsv.find('\n', pos);
      if (nl == std::string_view::npos) nl = tsv.size();
      ++line_no;
      auto line = tsv.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const std::size_t offset = pos;
      pos = nl + 1;
      if (trim(line).empty() || trim(line).front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw ParseError("lexicon line " + std::to_string(line_no) + ": expected surface<TAB>type",
                         offset, line_no);
      Entry e;
      for (const auto& w : split_ws(line.substr(0, tab))) e.surface.push_back(clue_key(w));
      std::erase_if(e.surface, [](const std::string& s) { return s.empty(); });
      const auto type_name = std::string(trim(line.substr(tab + 1)));
      if (e.surface.empty())
        throw ParseError("lexicon line " + std::to_string(line_no) + ": empty surface", offset,
                         line_no);
      if (type_name != "stop") {
        e.type = parse_clue_type(type_name);
        if (!e.type)
          throw ParseError("lexicon line " + std::to_string(line_no) + ": unknown type '" +
                               type_name + "'",
                           offset, line_no);
      }
      lex.add(std::move(e));
    }
    return lex;
  }

  static const Lexicon& builtin() {
    static const Lexicon lex = parse(kDefaultLexiconTsv);
    return lex;
  }

  // Later entries with the same surface replace earlier ones.
  void add(Entry e) {
    const auto key = join(e.surface, " ");
    by_first_[e.surface.front()][key] = std::move(e);
  }

  // Longest entry matching keys[i..], if any.
  const Entry* match(const std::vector<std::string>& keys, std::size_t i) const {
    const auto it = by_first_.find(keys[i]);
    if (it == by_first_.end()) return nullptr;
    const Entry* best = nullptr;
    for (const auto& [_, e] : it->second) {
      if (i + e.surface.size() > keys.size()) continue;
      if (!std::equal(e.surface.begin(), e.surface.end(), keys.begin() + static_cast<long>(i)))
        continue;
      if (!best || e.surface.size() > best->surface.size()) best = &e;
    }
    return best;
  }

  bool is_stop_word(const std::string& key) const {
    const auto it = by_first_.find(key);
    if (it == by_first_.end()) return false;
    const auto e = it->second.find(key);
    return e != it->second.end() && !e->second.type;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, m] : by_first_) n += m.size();
    return n;
  }

 private:
  std::map<std::string, std::map<std::string, Entry>> by_first_;
};

struct ClueHit {
  Range tokens;
  ClueType type;

  friend bool operator==(const ClueHit&, const ClueHit&) = default;
};

namespace detail {

// A cardinal only signals an answer count when it modifies the answer
// phrase, e.g. "Which two", "the three", "top 5". Bare numerals elsewhere
// ("1 light year", "call 911") are quantities inside the question.
inline bool cardinal_context(const std::vector<std::string>& keys, std::size_t i) {
  static const std::set<std::string> kContext = {
      "which", "what", "what's", "whats", "the", "these", "those", "name", "list",
      "top",   "first", "last", "other", "are", "were", "all"};
  return i > 0 && kContext.count(keys[i - 1]) > 0;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool all_alpha(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool suffixed_ordinal(std::string_view key) {
  if (key.size() < 3) return false;
  const auto digits = key.substr(0, key.size() - 2);
  const auto suffix = key.substr(key.size() - 2);
  return all_digits(digits) &&
         (suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th");
}

// -er/-est adjectives. Capitalized tokens past the first position are taken
// as proper nouns ("Danube River", "Super Bowl").
inline bool comparative_form(std::string_view raw_token, std::string_view key, std::size_t pos) {
  if (!all_alpha(key) || key.size() < 5) return false;
  std::size_t suffix = 0;
  if (ends_with(key, "est")) suffix = 3;
  else if (ends_with(key, "er")) suffix = 2;
  else return false;
  if (key.size() - suffix < 3) return false;
  if (pos > 0) {
    const auto first = std::find_if(raw_token.begin(), raw_token.end(),
                                    [](char c) { return !is_punct(c); });
    if (first != raw_token.end() && *first >= 'A' && *first <= 'Z') return false;
  }
  return true;
}

}  // namespace detail

// Lexicon hits in a question, in token order, pairwise non-overlapping.
inline std::vector<ClueHit> detect_clue_words(const TokenizedText& question,
                                              const Lexicon& lexicon = Lexicon::builtin()) {
  std::vector<std::string> keys;
  for (const auto& t : question.tokens()) keys.push_back(clue_key(t));
  std::vector<ClueHit> hits;
  std::size_t i = 0;
  while (i < keys.size()) {
    if (keys[i].empty()) {
      ++i;
      continue;
    }
    if (const auto* e = lexicon.match(keys, i)) {
      const Range r{i, i + e->surface.size()};
      if (e->type && (*e->type != ClueType::kCardinal || detail::cardinal_context(keys, i)))
        hits.push_back({r, *e->type});
      i = r.end;
      continue;
    }
    const auto& key = keys[i];
    if (detail::all_digits(key) && key.size() <= 2 && detail::cardinal_context(keys, i)) {
      hits.push_back({{i, i + 1}, ClueType::kCardinal});
    } else if (detail::suffixed_ordinal(key)) {
      hits.push_back({{i, i + 1}, ClueType::kOrdinal});
    } else if (detail::comparative_form(question.tokens()[i], key, i)) {
      hits.push_back({{i, i + 1}, ClueType::kCompSuper});
    }
    ++i;
  }
  return hits;
}

// Clue hits as a label's clue list (text taken from the question).
inline std::vector<Clue> hits_to_clues(const TokenizedText& question,
                                       const std::vector<ClueHit>& hits) {
  std::vector<Clue> clues;
  for (const auto& h : hits) {
    std::vector<std::string> words;
    for (auto k = h.tokens.begin; k < h.tokens.end; ++k) words.push_back(clue_key(question.tokens()[k]));
    clues.push_back({join(words, " "), h.type, h.tokens});
  }
  return clues;
}

// Stage-1 recall: instances whose question has at least one clue hit are
// routed to verification; the rest go to full manual annotation.
struct RecallPartition {
  std::vector<std::size_t> recalled;
  std::vector<std::size_t> remaining;
};

inline RecallPartition recall_stage1(const std::vector<Instance>& corpus,
                                     const Lexicon& lexicon = Lexicon::builtin()) {
  RecallPartition p;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (detect_clue_words(corpus[i].question, lexicon).empty() ? p.remaining : p.recalled)
        .push_back(i);
  return p;
}

// ---------------------------------------------------------------------------
// Adjudication

// kFirst and kSecond are the two initial annotations of an instance.
enum class Round { kFirst, kSecond, kAdjudication };

inline std::string_view round_name(Round r) {
  switch (r) {
    case Round::kFirst: return "first";
    case Round::kSecond: return "second";
    case Round::kAdjudication: break;
  }
  return "adjudication";
}

inline std::optional<Round> parse_round(std::string_view s) {
  if (s == "first") return Round::kFirst;
  if (s == "second") return Round::kSecond;
  if (s == "adjudication") return Round::kAdjudication;
  return std::nullopt;
}

struct AnnotatorRecord {
  std::string annotator_id;
  std::string instance_id;
  TaxonomyLabel label;
  Round round = Round::kFirst;

  friend bool operator==(const AnnotatorRecord&, const AnnotatorRecord&) = default;
};

struct Verdict {
  enum class Status { kFinal, kNeedsAdjudication };
  Status status = Status::kFinal;
  TaxonomyLabel label;

  bool final() const { return status == Status::kFinal; }
};

namespace detail {

inline std::vector<Clue> merge_clues(const std::vector<const AnnotatorRecord*>& recs) {
  std::map<std::tuple<std::size_t, std::string, ClueType>, Clue> merged;
  for (const auto* r : recs)
    for (const auto& c : r->label.clues) {
      const std::size_t at = c.tokens ? c.tokens->begin : SIZE_MAX;
      merged.try_emplace({at, normalize(c.text), c.type}, c);
    }
  std::vector<Clue> out;
  for (auto& [_, c] : merged) out.push_back(std::move(c));
  return out;
}

}  // namespace detail

// Resolves one instance's records:
//  - any BadAnnotation record makes the instance BadAnnotation;
//  - two agreeing initial records give their kind (clue lists merged);
//  - otherwise the adjudication record decides, and without one the result
//    is kNeedsAdjudication.
// Throws InvalidArgument when fewer than two initial records exist and no
// record is BadAnnotation.
inline Verdict adjudicate(const std::vector<AnnotatorRecord>& records) {
  for (const auto& r : records)
    if (r.label.kind == TaxonomyKind::kBadAnnotation)
      return {Verdict::Status::kFinal, TaxonomyLabel::bad_annotation()};
  std::vector<const AnnotatorRecord*> initial;
  const AnnotatorRecord* adjudication = nullptr;
  for (const auto& r : records) {
    if (r.round == Round::kAdjudication) {
      if (!adjudication) adjudication = &r;
    } else {
      initial.push_back(&r);
    }
  }
  if (initial.size() < 2)
    throw InvalidArgument("adjudication needs two initial records, got " +
                          std::to_string(initial.size()));
  const auto kind = initial[0]->label.kind;
  const bool agree = std::all_of(initial.begin(), initial.end(),
                                 [&](const AnnotatorRecord* r) { return r->label.kind == kind; });
  if (agree) {
    TaxonomyLabel label{kind, {}};
    if (kind == TaxonomyKind::kQuestionDependent) label.clues = detail::merge_clues(initial);
    return {Verdict::Status::kFinal, std::move(label)};
  }
  if (adjudication) return {Verdict::Status::kFinal, adjudication->label};
  return {Verdict::Status::kNeedsAdjudication, {}};
}

// ---------------------------------------------------------------------------
// Agreement

// Cohen's kappa over the three label kinds. When chance agreement is 1 the
// result is 1 for perfect observed agreement and 0 otherwise.
inline double cohens_kappa(const std::vector<std::pair<TaxonomyKind, TaxonomyKind>>& pairs) {
  if (pairs.empty()) throw InvalidArgument("cohens_kappa needs at least one pair");
  constexpr std::size_t K = kAllKinds.size();
  std::array<double, K> row{}, col{};
  double agree = 0;
  for (const auto& [a, b] : pairs) {
    row[static_cast<std::size_t>(a)] += 1;
    col[static_cast<std::size_t>(b)] += 1;
    if (a == b) agree += 1;
  }
  const double n = static_cast<double>(pairs.size());
  const double po = agree / n;
  double pe = 0;
  for (std::size_t k = 0; k < K; ++k) pe += (row[k] / n) * (col[k] / n);
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

}  // namespace mamrc

#endif  // MAMRC_TAXONOMY_HPP_
