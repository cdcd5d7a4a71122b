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

// Decoding and orchestration for the four multi-answer paradigms (tagging,
// number prediction, iterative extraction, generation) and the answer-count
// sentence formats used to fuse them. The neural parts live behind
// ModelClient.

#ifndef MAMRC_PARADIGMS_HPP_
#define MAMRC_PARADIGMS_HPP_

#include <algorithm>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mamrc/core.hpp"
#include "mamrc/model_client.hpp"

namespace mamrc {

// ---------------------------------------------------------------------------
// Tagging

// Maximal runs of tokens with P(I) >= threshold, in passage order.
inline std::vector<Range> tagging_decode(std::span<const double> probs, std::size_t passage_tokens,
                                         double threshold = 0.5) {
  if (probs.size() != passage_tokens)
    throw InvalidArgument("tag probabilities (" + std::to_string(probs.size()) +
                          ") do not match passage length (" + std::to_string(passage_tokens) + ")");
  std::vector<Range> spans;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < threshold) continue;
    if (!spans.empty() && spans.back().end == i) spans.back().end = i + 1;
    else spans.push_back({i, i + 1});
  }
  return spans;
}

// ---------------------------------------------------------------------------
// Number prediction

struct CountPrediction {
  int k = 1;
  int k_max = kMaxAnswers;

  static CountPrediction make(int k, int k_max = kMaxAnswers) {
    if (k_max < 1 || k < 1 || k > k_max)
      throw InvalidArgument("answer count " + std::to_string(k) + " outside [1, " +
                            std::to_string(k_max) + "]");
    return {k, k_max};
  }
};

// Most probable count; ties go to the smaller count.
inline CountPrediction count_from_distribution(std::span<const double> dist,
                                               int k_max = kMaxAnswers) {
  if (dist.empty()) throw InvalidArgument("empty count distribution");
  const auto limit = std::min<std::size_t>(dist.size(), static_cast<std::size_t>(k_max));
  std::size_t best = 0;
  for (std::size_t i = 1; i < limit; ++i)
    if (dist[i] > dist[best]) best = i;
  return CountPrediction::make(static_cast<int>(best) + 1, k_max);
}

// Greedy top-k selection of non-overlapping candidates. Candidates are
// visited by descending score, then smaller start, then shorter span; a
// candidate is kept iff it shares no token with a kept span. Returned in
// selection order.
inline std::vector<CandidateSpan> numpred_select(std::vector<CandidateSpan> candidates,
                                                 CountPrediction count) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidateSpan& a, const CandidateSpan& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.tokens.begin != b.tokens.begin) return a.tokens.begin < b.tokens.begin;
                     return a.tokens.size() < b.tokens.size();
                   });
  std::vector<CandidateSpan> kept;
  for (const auto& c : candidates) {
    if (kept.size() >= static_cast<std::size_t>(count.k)) break;
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const CandidateSpan& k) {
      return k.tokens.overlaps(c.tokens);
    });
    if (!clash) kept.push_back(c);
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Answer-count sentences and generation targets

struct NpsMode {
  enum class Kind { kNone, kCount, kRemaining };
  Kind kind = Kind::kNone;
  int remaining = 0;

  static NpsMode none() { return {Kind::kNone, 0}; }
  static NpsMode count() { return {Kind::kCount, 0}; }
  static NpsMode remaining_answers(int r) { return {Kind::kRemaining, r}; }
};

inline constexpr std::string_view kNoAnswer = "No answer";

inline std::string count_sentence(int n) {
  return n == 1 ? "There is only one answer" : "There are " + std::to_string(n) + " answers";
}

inline std::string remaining_sentence(int r) {
  return "The number of remaining answers is " + std::to_string(r);
}

struct GenOutput {
  std::optional<int> declared_count;
  std::optional<int> remaining_count;
  std::vector<std::string> answers;

  friend bool operator==(const GenOutput&, const GenOutput&) = default;
};

// Best-effort inverse of gen_serialize. A leading count sentence (including
// the "The number of answers is N" wording) is recognized and stripped; the
// rest is split on ';' with empty pieces dropped. "No answer" yields no
// answers.
inline GenOutput gen_parse(std::string_view text) {
  static const std::regex kCount(R"(^\s*There\s+are\s+(\d+)\s+answers?\s*[:.]?\s*)",
                                 std::regex::icase);
  static const std::regex kOne(R"(^\s*There\s+is\s+only\s+one\s+answer\s*[:.]?\s*)",
                               std::regex::icase);
  static const std::regex kNumber(R"(^\s*The\s+number\s+of\s+answers\s+is\s+(\d+)\s*[:.]?\s*)",
                                  std::regex::icase);
  static const std::regex kRemaining(
      R"(^\s*The\s+number\s+of\s+remaining\s+answers\s+is\s+(\d+)\s*[:.]?\s*)", std::regex::icase);
  static const std::regex kNone(R"(^\s*No\s+answers?\s*\.?\s*$)", std::regex::icase);

  GenOutput out;
  std::string rest(text);
  std::smatch m;
  auto count_of = [](const std::string& digits) -> std::optional<int> {
    if (digits.size() > 6) return std::nullopt;
    const int n = std::stoi(digits);
    return n >= 1 ? std::optional<int>(n) : std::nullopt;
  };
  if (std::regex_search(rest, m, kRemaining)) {
    out.remaining_count = count_of(m[1].str());
    rest = m.suffix().str();
  } else if (std::regex_search(rest, m, kCount) || std::regex_search(rest, m, kNumber)) {
    out.declared_count = count_of(m[1].str());
    rest = m.suffix().str();
  } else if (std::regex_search(rest, m, kOne)) {
    out.declared_count = 1;
    rest = m.suffix().str();
  }
  if (std::regex_match(rest, kNone)) return out;
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    auto semi = rest.find(';', pos);
    if (semi == std::string::npos) semi = rest.size();
    const auto piece = trim(std::string_view(rest).substr(pos, semi - pos));
    if (!piece.empty()) out.answers.emplace_back(piece);
    pos = semi + 1;
  }
  return out;
}

// "a1; a2; ..." optionally preceded by an answer-count sentence and ": ".
// Throws InvalidArgument for answers that cannot survive gen_parse:
// semicolons, empty text, or surrounding whitespace.
inline std::string gen_serialize(const std::vector<std::string>& answers, NpsMode nps) {
  for (const auto& a : answers) {
    if (a.find(';') != std::string::npos)
      throw InvalidArgument("answer '" + a + "' contains a semicolon");
    if (trim(a).empty() || trim(a).size() != a.size())
      throw InvalidArgument("answer '" + a + "' is empty or has surrounding whitespace");
  }
  const auto body = join(answers, "; ");
  std::string out;
  switch (nps.kind) {
    case NpsMode::Kind::kNone:
      out = answers.empty() ? std::string(kNoAnswer) : body;
      break;
    case NpsMode::Kind::kCount:
      if (answers.empty()) throw InvalidArgument("count sentence needs at least one answer");
      out = count_sentence(static_cast<int>(answers.size())) + ": " + body;
      break;
    case NpsMode::Kind::kRemaining:
      if (nps.remaining < 1) throw InvalidArgument("remaining count must be >= 1");
      out = answers.empty() ? std::string(kNoAnswer) : remaining_sentence(nps.remaining) + ": " + body;
      break;
  }
  // Answers that read as a count sentence or as "No answer" would be eaten
  // by the parser.
  if (gen_parse(out).answers != answers)
    throw InvalidArgument("answers are not representable in the generation format");
  return out;
}

// ---------------------------------------------------------------------------
// Prompts

enum class PromptMode { kVanillaOneShot, kNumPredOneShot, kPipelineInput };

namespace detail {

inline constexpr std::string_view kExampleContext =
    "Laura Horton is a fictional character from the NBC soap opera , Days of Our Lives , a long - "
    "running serial drama about working class life in the fictional , United States town of "
    "Salem . Created by writer Peggy Phillips , the role was originated by actress Floy Dean on "
    "June 30 , 1966 till October 21 , 1966 . Susan Flannery stepped into the role from November "
    "22 , 1966 to May 27 , 1975 . Susan Oliver briefly stepped into the role from October 10 , "
    "1975 , to June 9 , 1976 , followed by Rosemary Forsyth from August 24 , 1976 , to March 25 , "
    "1980 .";
inline constexpr std::string_view kExampleQuestion = "who played laura horton on days of our lives";
inline constexpr std::string_view kExampleAnswers =
    "Floy Dean; Susan Flannery; Susan Oliver; Rosemary Forsyth";

}  // namespace detail

// One-shot prompts for general-purpose LLMs, and the pipeline input that
// appends a predicted answer-count sentence to the question.
inline std::string build_prompt(PromptMode mode, std::string_view question,
                                 std::string_view context,
                                 std::optional<CountPrediction> predicted = std::nullopt) {
  if (mode == PromptMode::kPipelineInput) {
    if (!predicted) throw InvalidArgument("pipeline input needs a predicted answer count");
    return std::string(question) + " " + count_sentence(predicted->k) + ".";
  }
  const bool numpred = mode == PromptMode::kNumPredOneShot;
  const std::string task = numpred ? "Please predict the number of answers first, then give all "
                                     "the answers and separate them with a semicolon."
                                   : "Please give all the answers and separate them with a "
                                     "semicolon.";
  std::string p;
  p += "Answer the question based on the given context. Each question has more than one "
       "answer. " + task + "\n";
  p += "Context: " + std::string(detail::kExampleContext) + "\n";
  p += "Question: " + std::string(detail::kExampleQuestion) + "\n";
  p += "Answers: ";
  if (numpred) p += "The number of answers is 4: ";
  p += std::string(detail::kExampleAnswers) + "\n";
  p += "\n";
  p += "Following the example above and answer the following multi-answer question. " + task +
       "\n";
  p += "Context: " + std::string(context) + "\n";
  p += "Question: " + std::string(question) + "\n";
  p += "Answers:";
  return p;
}

inline std::string build_prompt(PromptMode mode, const Instance& inst,
                                std::optional<CountPrediction> predicted = std::nullopt) {
  return build_prompt(mode, inst.question.raw(), inst.passage.raw(), predicted);
}

// ---------------------------------------------------------------------------
// Iterative extraction

// The question with every answer found so far appended after "except".
inline std::string iterative_rewrite(std::string_view question,
                                     const std::vector<std::string>& found) {
  if (found.empty()) return std::string(question);
  return std::string(question) + " except " + join(found, ", ");
}

struct IterativeResult {
  PredictionSet predictions;
  int calls = 0;
  // Set when the client failed mid-run; predictions hold what was found.
  bool aborted = false;
  std::string error;
};

enum class IterativeBackend { kExtractor, kGenerator };

// Queries the model with the rewritten question until it returns nothing, an
// answer it already gave (by normalized text), or max_iters calls are used.
inline IterativeResult iterative_run(ModelClient& client, const Instance& inst,
                                     int max_iters = kMaxAnswers,
                                     IterativeBackend backend = IterativeBackend::kExtractor) {
  IterativeResult out;
  out.predictions.instance_id = inst.id;
  out.predictions.producer =
      backend == IterativeBackend::kExtractor ? "iterative" : "iterative-generation";
  std::vector<std::string> found;
  std::set<std::string> seen;
  while (out.calls < max_iters) {
    const auto q = iterative_rewrite(inst.question.raw(), found);
    std::string answer;
    std::optional<double> score;
    try {
      ++out.calls;
      if (backend == IterativeBackend::kExtractor) {
        const auto r = std::get<SpanResult>(client.ask(ModelMode::kExtractOne, q, inst.passage.raw()).result);
        answer = r.text;
        score = r.score;
      } else {
        const auto r = std::get<GenerateResult>(client.ask(ModelMode::kGenerate, q, inst.passage.raw()).result);
        const auto parsed = gen_parse(r.text);
        if (!parsed.answers.empty()) answer = parsed.answers.front();
      }
    } catch (const Error& e) {
      out.aborted = true;
      out.error = e.what();
      break;
    }
    const auto key = normalize(answer);
    if (key.empty() || !seen.insert(key).second) break;
    found.push_back(answer);
    out.predictions.spans.push_back({answer, score});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Whole-instance decoding

enum class Paradigm { kTagging, kNumPred, kIterative, kGeneration };

inline std::optional<Paradigm> parse_paradigm(std::string_view s) {
  if (s == "tagging") return Paradigm::kTagging;
  if (s == "numpred") return Paradigm::kNumPred;
  if (s == "iterative") return Paradigm::kIterative;
  if (s == "generation") return Paradigm::kGeneration;
  return std::nullopt;
}

inline std::string_view paradigm_name(Paradigm p) {
  switch (p) {
    case Paradigm::kTagging: return "tagging";
    case Paradigm::kNumPred: return "numpred";
    case Paradigm::kIterative: return "iterative";
    case Paradigm::kGeneration: break;
  }
  return "generation";
}

// How generation uses answer-count sentences: not at all, emitted by the
// model before its answers (multitask), or predicted by the count head and
// appended to the question (pipeline).
enum class GenerationNps { kNone, kMultitask, kPipeline };

struct DecodeOptions {
  double threshold = 0.5;
  int k_max = kMaxAnswers;
  GenerationNps nps = GenerationNps::kNone;
  IterativeBackend iterative_backend = IterativeBackend::kExtractor;
};

struct DecodeResult {
  PredictionSet predictions;
  int calls = 0;
  bool aborted = false;
  std::string error;
};

inline DecodeResult decode_instance(ModelClient& client, const Instance& inst, Paradigm paradigm,
                                    const DecodeOptions& opts = {}) {
  DecodeResult out;
  out.predictions.instance_id = inst.id;
  out.predictions.producer = std::string(paradigm_name(paradigm));
  const auto& q = inst.question.raw();
  const auto& p = inst.passage.raw();
  auto add = [&](std::string text, std::optional<double> score) {
    out.predictions.spans.push_back({std::move(text), score});
  };
  try {
    switch (paradigm) {
      case Paradigm::kTagging: {
        ++out.calls;
        const auto tags = std::get<TagResult>(client.ask(ModelMode::kTag, q, p).result);
        for (const auto& r : tagging_decode(tags.probs, inst.passage.size(), opts.threshold))
          add(inst.passage.slice(r), std::nullopt);
        break;
      }
      case Paradigm::kNumPred: {
        out.calls += 2;
        const auto count = std::get<CountResult>(client.ask(ModelMode::kCount, q, p).result);
        const auto cands = std::get<CandidatesResult>(client.ask(ModelMode::kCandidates, q, p).result);
        for (const auto& c : cands.candidates)
          if (c.tokens.end > inst.passage.size())
            throw ProtocolError("candidate span outside the passage");
        auto kept = numpred_select(cands.candidates,
                                   count_from_distribution(count.distribution, opts.k_max));
        std::sort(kept.begin(), kept.end(), [](const CandidateSpan& a, const CandidateSpan& b) {
          return a.tokens.begin < b.tokens.begin;
        });
        for (const auto& c : kept) add(inst.passage.slice(c.tokens), c.score);
        break;
      }
      case Paradigm::kIterative: {
        auto r = iterative_run(client, inst, opts.k_max, opts.iterative_backend);
        out.predictions.spans = std::move(r.predictions.spans);
        out.calls = r.calls;
        out.aborted = r.aborted;
        out.error = std::move(r.error);
        break;
      }
      case Paradigm::kGeneration: {
        std::string question = q;
        if (opts.nps == GenerationNps::kPipeline) {
          ++out.calls;
          const auto count = std::get<CountResult>(client.ask(ModelMode::kCount, q, p).result);
          question = build_prompt(PromptMode::kPipelineInput, q, p,
                                  count_from_distribution(count.distribution, opts.k_max));
        }
        ++out.calls;
        const auto gen = std::get<GenerateResult>(client.ask(ModelMode::kGenerate, question, p).result);
        std::set<std::string> seen;
        for (auto& a : gen_parse(gen.text).answers)
          if (!normalize(a).empty() && seen.insert(normalize(a)).second) add(std::move(a), std::nullopt);
        break;
      }
    }
  } catch (const Error& e) {
    out.aborted = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace mamrc

#endif  // MAMRC_PARADIGMS_HPP_
