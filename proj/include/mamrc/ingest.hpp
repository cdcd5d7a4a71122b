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

// Dataset loaders. Everything is converted to the unified corpus format:
// one JSON object per line with fields id, dataset, question, passage,
// answers [{text, char_start?, char_end?}] and an optional taxonomy label.
// Character offsets in files count Unicode code points.

#ifndef MAMRC_INGEST_HPP_
#define MAMRC_INGEST_HPP_

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mamrc/core.hpp"

namespace mamrc {

enum class SourceFormat { kDrop, kQuoref, kMultiSpanQA, kUnified };

inline std::optional<SourceFormat> parse_source_format(std::string_view s) {
  if (s == "drop") return SourceFormat::kDrop;
  if (s == "quoref") return SourceFormat::kQuoref;
  if (s == "multispanqa") return SourceFormat::kMultiSpanQA;
  if (s == "unified") return SourceFormat::kUnified;
  return std::nullopt;
}

inline std::string_view source_format_name(SourceFormat f) {
  switch (f) {
    case SourceFormat::kDrop: return "drop";
    case SourceFormat::kQuoref: return "quoref";
    case SourceFormat::kMultiSpanQA: return "multispanqa";
    case SourceFormat::kUnified: break;
  }
  return "unified";
}

struct LoaderReport {
  std::size_t loaded = 0;
  std::size_t skipped_non_span = 0;
  std::size_t skipped_malformed = 0;
  SourceFormat source_format = SourceFormat::kUnified;
  // Gold spans dropped because another span of the same answer set had the
  // same normalized text. Does not affect the record counts.
  std::size_t duplicate_spans_dropped = 0;
  // First few human-readable reasons for malformed skips.
  std::vector<std::string> notes;

  std::size_t records() const { return loaded + skipped_non_span + skipped_malformed; }
};

struct LoadResult {
  std::vector<Instance> instances;
  LoaderReport report;
};

// Calls `fn(line, byte_offset, line_number)` for every non-blank line.
inline void for_each_line(
    std::string_view bytes,
    const std::function<void(std::string_view, std::size_t, std::size_t)>& fn) {
  std::size_t pos = 0, line_no = 0;
  while (pos < bytes.size()) {
    auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    ++line_no;
    const auto line = bytes.substr(pos, nl - pos);
    if (!trim(line).empty()) fn(line, pos, line_no);
    pos = nl + 1;
  }
}

inline json parse_json_document(std::string_view bytes, std::string_view what) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    // e.byte counts characters read, so the offending byte is one earlier.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed " + std::string(what) + " JSON at byte " +
                         std::to_string(at) + ": " + e.what(),
                     at);
  }
}

inline json parse_json_line(std::string_view line, std::size_t offset, std::size_t line_no) {
  try {
    return json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    const std::size_t at = offset + (e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("malformed JSON on line " + std::to_string(line_no) + " (byte " +
                         std::to_string(at) + "): " + e.what(),
                     at, line_no);
  }
}

namespace detail {

class InstanceBuilder {
 public:
  InstanceBuilder(SourceFormat format, LoadResult* out) : out_(out) {
    out_->report.source_format = format;
  }

  void skip_non_span() { ++out_->report.skipped_non_span; }

  void skip_malformed(std::string why) {
    ++out_->report.skipped_malformed;
    if (out_->report.notes.size() < 20) out_->report.notes.push_back(std::move(why));
  }

  // Drops repeated normalized answers and grounds every span. A span whose
  // byte range disagrees with its text is re-grounded from text.
  void emit(std::string id, Dataset dataset, std::string question, std::string passage,
            std::vector<AnswerSpan> spans, std::optional<TaxonomyLabel> label = {}) {
    if (id.empty()) return skip_malformed("record without id");
    if (!ids_.insert(id).second) return skip_malformed("duplicate id " + id);
    if (spans.empty()) return skip_malformed("record " + id + " has no answers");
    Instance inst;
    inst.id = std::move(id);
    inst.dataset = dataset;
    inst.question = tokenize(std::move(question));
    inst.passage = tokenize(std::move(passage));
    std::set<std::string> seen;
    std::vector<AnswerSpan> kept;
    for (auto& s : spans) {
      if (!seen.insert(s.normalized()).second) {
        ++out_->report.duplicate_spans_dropped;
        continue;
      }
      ground(inst.passage, &s);
      kept.push_back(std::move(s));
    }
    inst.gold = AnswerSet(std::move(kept));
    if (label) {
      locate_clues(inst.question, &*label);
      inst.taxonomy = std::move(label);
    }
    out_->instances.push_back(std::move(inst));
    ++out_->report.loaded;
  }

  static void ground(const TokenizedText& passage, AnswerSpan* s) {
    if (s->chars) {
      const auto& r = *s->chars;
      const bool valid = r.begin <= r.end && r.end <= passage.raw().size() &&
                         normalize(passage.raw().substr(r.begin, r.size())) == s->normalized();
      Range tok;
      if (valid && passage.token_range_for(r, &tok)) {
        s->tokens = tok;
        return;
      }
      s->chars.reset();
    }
    s->tokens = ground_span(passage, s->text);
  }

 private:
  LoadResult* out_;
  std::set<std::string> ids_;
};

inline std::string string_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) return {};
  return j[key].get<std::string>();
}

inline bool drop_date_present(const json& answer) {
  if (!answer.contains("date") || !answer["date"].is_object()) return false;
  for (const auto& [k, v] : answer["date"].items())
    if (v.is_string() ? !v.get<std::string>().empty() : !v.is_null()) return true;
  return false;
}

inline void load_drop(std::string_view bytes, LoadResult* out) {
  const auto doc = parse_json_document(bytes, "DROP");
  if (!doc.is_object()) throw ParseError("DROP file must be a passage-keyed object", 0);
  InstanceBuilder b(SourceFormat::kDrop, out);
  for (const auto& [pid, record] : doc.items()) {
    const auto passage = string_field(record, "passage");
    if (!record.is_object() || !record.contains("qa_pairs") || !record["qa_pairs"].is_array()) {
      b.skip_malformed("passage " + pid + " has no qa_pairs");
      continue;
    }
    for (const auto& qa : record["qa_pairs"]) {
      const auto qid = string_field(qa, "query_id");
      if (!qa.is_object() || !qa.contains("answer") || !qa["answer"].is_object()) {
        b.skip_malformed("question " + qid + " has no answer");
        continue;
      }
      const auto& ans = qa["answer"];
      if (!string_field(ans, "number").empty() || drop_date_present(ans)) {
        b.skip_non_span();
        continue;
      }
      std::vector<AnswerSpan> spans;
      if (ans.contains("spans") && ans["spans"].is_array())
        for (const auto& s : ans["spans"])
          if (s.is_string()) spans.push_back({s.get<std::string>(), std::nullopt, std::nullopt});
      if (spans.empty()) {
        b.skip_malformed("question " + qid + " has an empty answer");
        continue;
      }
      b.emit(qid, Dataset::kDrop, string_field(qa, "question"), passage, std::move(spans));
    }
  }
}

inline void load_quoref(std::string_view bytes, LoadResult* out) {
  const auto doc = parse_json_document(bytes, "Quoref");
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array())
    throw ParseError("Quoref file must be an object with a 'data' array", 0);
  InstanceBuilder b(SourceFormat::kQuoref, out);
  for (const auto& article : doc["data"]) {
    if (!article.is_object() || !article.contains("paragraphs")) {
      b.skip_malformed("article without paragraphs");
      continue;
    }
    for (const auto& para : article["paragraphs"]) {
      const auto context = string_field(para, "context");
      if (!para.is_object() || !para.contains("qas") || !para["qas"].is_array()) {
        b.skip_malformed("paragraph without qas");
        continue;
      }
      for (const auto& qa : para["qas"]) {
        std::vector<AnswerSpan> spans;
        if (qa.is_object() && qa.contains("answers") && qa["answers"].is_array()) {
          for (const auto& a : qa["answers"]) {
            AnswerSpan s{string_field(a, "text"), std::nullopt, std::nullopt};
            if (a.is_object() && a.contains("answer_start") && a["answer_start"].is_number_integer()) {
              const auto cp = a["answer_start"].get<long long>();
              if (cp >= 0) {
                const auto begin = utf8::byte_offset(context, static_cast<std::size_t>(cp));
                s.chars = Range{begin, std::min(context.size(), begin + s.text.size())};
              }
            }
            spans.push_back(std::move(s));
          }
        }
        b.emit(string_field(qa, "id"), Dataset::kQuoref, string_field(qa, "question"), context,
               std::move(spans));
      }
    }
  }
}

inline std::string join_tokens(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  std::vector<std::string> parts;
  for (const auto& t : j) parts.push_back(t.is_string() ? t.get<std::string>() : t.dump());
  return join(parts, " ");
}

inline void load_multispanqa(std::string_view bytes, LoadResult* out) {
  const auto doc = parse_json_document(bytes, "MultiSpanQA");
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array())
    throw ParseError("MultiSpanQA file must be an object with a 'data' array", 0);
  InstanceBuilder b(SourceFormat::kMultiSpanQA, out);
  for (const auto& rec : doc["data"]) {
    const auto id = string_field(rec, "id");
    if (!rec.is_object() || !rec.contains("context") || !rec["context"].is_array() ||
        !rec.contains("label") || !rec["label"].is_array() || !rec.contains("question")) {
      b.skip_malformed("record " + id + " lacks context/label/question");
      continue;
    }
    const auto& context = rec["context"];
    const auto& labels = rec["label"];
    if (context.size() != labels.size()) {
      b.skip_malformed("record " + id + " label/context length mismatch");
      continue;
    }
    const auto passage_raw = join_tokens(context);
    const auto passage = tokenize(passage_raw);
    if (passage.size() != context.size()) {
      b.skip_malformed("record " + id + " has tokens containing whitespace");
      continue;
    }
    // BIO runs; an I that does not follow B/I opens a new span.
    std::vector<Range> runs;
    bool bad_label = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto tag = labels[i].is_string() ? labels[i].get<std::string>() : std::string();
      if (tag == "B" || (tag == "I" && (runs.empty() || runs.back().end != i))) {
        runs.push_back({i, i + 1});
      } else if (tag == "I") {
        runs.back().end = i + 1;
      } else if (tag != "O") {
        bad_label = true;
        break;
      }
    }
    if (bad_label) {
      b.skip_malformed("record " + id + " has a label outside {B, I, O}");
      continue;
    }
    if (runs.empty()) {
      b.skip_non_span();
      continue;
    }
    std::vector<AnswerSpan> spans;
    for (const auto& r : runs)
      spans.push_back({passage.slice(r), passage.byte_range(r), r});
    b.emit(id, Dataset::kMultiSpanQA, join_tokens(rec["question"]), passage_raw, std::move(spans));
  }
}

inline void load_unified(std::string_view bytes, LoadResult* out) {
  InstanceBuilder b(SourceFormat::kUnified, out);
  for_each_line(bytes, [&](std::string_view line, std::size_t off, std::size_t no) {
    const auto j = parse_json_line(line, off, no);
    const auto where = "line " + std::to_string(no);
    if (!j.is_object()) return b.skip_malformed(where + ": not an object");
    const auto dataset = parse_dataset(string_field(j, "dataset"));
    if (!dataset) return b.skip_malformed(where + ": unknown dataset");
    if (!j.contains("question") || !j["question"].is_string() || !j.contains("passage") ||
        !j["passage"].is_string() || !j.contains("answers") || !j["answers"].is_array())
      return b.skip_malformed(where + ": missing question/passage/answers");
    const auto passage = j["passage"].get<std::string>();
    std::vector<AnswerSpan> spans;
    for (const auto& a : j["answers"]) {
      if (!a.is_object() || !a.contains("text") || !a["text"].is_string())
        return b.skip_malformed(where + ": answer without text");
      AnswerSpan s{a["text"].get<std::string>(), std::nullopt, std::nullopt};
      if (a.contains("char_start") && a.contains("char_end")) {
        if (!a["char_start"].is_number_unsigned() || !a["char_end"].is_number_unsigned())
          return b.skip_malformed(where + ": non-integer char offsets");
        s.chars = Range{utf8::byte_offset(passage, a["char_start"].get<std::size_t>()),
                        utf8::byte_offset(passage, a["char_end"].get<std::size_t>())};
      }
      spans.push_back(std::move(s));
    }
    std::optional<TaxonomyLabel> label;
    if (j.contains("taxonomy") && !j["taxonomy"].is_null()) {
      try {
        label = label_from_json(j["taxonomy"]);
      } catch (const Error& e) {
        return b.skip_malformed(where + ": " + e.what());
      }
    }
    b.emit(string_field(j, "id"), *dataset, j["question"].get<std::string>(), passage,
           std::move(spans), std::move(label));
  });
}

}  // namespace detail

// Loads a dataset file. Container-level syntax errors throw ParseError with
// the byte offset; record-level problems are skipped and counted.
inline LoadResult load(SourceFormat format, std::string_view bytes) {
  LoadResult out;
  out.report.source_format = format;
  switch (format) {
    case SourceFormat::kDrop: detail::load_drop(bytes, &out); break;
    case SourceFormat::kQuoref: detail::load_quoref(bytes, &out); break;
    case SourceFormat::kMultiSpanQA: detail::load_multispanqa(bytes, &out); break;
    case SourceFormat::kUnified: detail::load_unified(bytes, &out); break;
  }
  return out;
}

// Builds a grounded instance from answer texts, as the loaders do.
inline Instance make_instance(std::string id, Dataset dataset, std::string question,
                              std::string passage, const std::vector<std::string>& answers,
                              std::optional<TaxonomyLabel> label = {}) {
  Instance inst;
  inst.id = std::move(id);
  inst.dataset = dataset;
  inst.question = tokenize(std::move(question));
  inst.passage = tokenize(std::move(passage));
  std::vector<AnswerSpan> spans;
  for (const auto& a : answers) {
    AnswerSpan s{a, std::nullopt, ground_span(inst.passage, a)};
    // Byte offsets only when the raw passage slice is the answer verbatim.
    if (s.tokens) {
      const auto r = inst.passage.byte_range(*s.tokens);
      if (inst.passage.raw().compare(r.begin, r.size(), a) == 0) s.chars = r;
    }
    spans.push_back(std::move(s));
  }
  inst.gold = AnswerSet(std::move(spans));
  if (label) {
    locate_clues(inst.question, &*label);
    inst.taxonomy = std::move(label);
  }
  return inst;
}

inline ordered_json instance_to_json(const Instance& inst) {
  ordered_json j;
  j["id"] = inst.id;
  j["dataset"] = dataset_name(inst.dataset);
  j["question"] = inst.question.raw();
  j["passage"] = inst.passage.raw();
  ordered_json answers = ordered_json::array();
  for (const auto& s : inst.gold.spans()) {
    ordered_json a;
    a["text"] = s.text;
    if (s.chars) {
      a["char_start"] = utf8::codepoint_offset(inst.passage.raw(), s.chars->begin);
      a["char_end"] = utf8::codepoint_offset(inst.passage.raw(), s.chars->end);
    }
    answers.push_back(std::move(a));
  }
  j["answers"] = std::move(answers);
  if (inst.taxonomy) j["taxonomy"] = label_to_json(*inst.taxonomy);
  return j;
}

inline std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

// Unified JSONL; load(kUnified, export_corpus(c)).instances == c.
inline std::string export_corpus(const std::vector<Instance>& corpus) {
  std::string out;
  for (const auto& inst : corpus) out += dump_line(instance_to_json(inst));
  return out;
}

// ---------------------------------------------------------------------------
// Taxonomy annotation files

using AnnotationMap = std::map<std::string, TaxonomyLabel>;

namespace detail {

// Accepts the paper's hyphenated spellings and subtype names as aliases.
inline std::string canonical_label_name(std::string s) {
  for (auto& c : s) c = (c == '-' || c == ' ') ? '_' : ascii_lower(c);
  if (s == "with_clue_word" || s == "with_clue_words" || s == "no_clue_word" ||
      s == "without_clue_words" || s == "without_clue_word")
    return "question_dependent";
  if (s == "p_dep") return "passage_dependent";
  if (s == "q_dep") return "question_dependent";
  return s;
}

}  // namespace detail

// JSONL records {id, label, clue?: {spans, types}}. Unknown labels and
// repeated ids are fatal.
inline AnnotationMap load_annotations(std::string_view bytes) {
  AnnotationMap out;
  for_each_line(bytes, [&](std::string_view line, std::size_t off, std::size_t no) {
    auto j = parse_json_line(line, off, no);
    const auto where = "annotation line " + std::to_string(no);
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("label") ||
        !j["label"].is_string())
      throw ParseError(where + ": expected {id, label}", off, no);
    j["label"] = detail::canonical_label_name(j["label"].get<std::string>());
    TaxonomyLabel label;
    try {
      label = label_from_json(j);
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what(), off, no);
    }
    const auto id = j["id"].get<std::string>();
    if (!out.emplace(id, std::move(label)).second)
      throw ParseError(where + ": duplicate id " + id, off, no);
  });
  return out;
}

inline std::string export_annotations(const AnnotationMap& labels) {
  std::string out;
  for (const auto& [id, label] : labels) {
    ordered_json j;
    j["id"] = id;
    const auto fields = label_to_json(label);
    for (const auto& [k, v] : fields.items()) j[k] = v;
    out += dump_line(j);
  }
  return out;
}

// Attaches labels by id and returns the annotation ids with no instance.
inline std::vector<std::string> attach_annotations(std::vector<Instance>* corpus,
                                                   const AnnotationMap& labels) {
  std::set<std::string> used;
  for (auto& inst : *corpus) {
    const auto it = labels.find(inst.id);
    if (it == labels.end()) continue;
    auto label = it->second;
    locate_clues(inst.question, &label);
    inst.taxonomy = std::move(label);
    used.insert(inst.id);
  }
  std::vector<std::string> unknown;
  for (const auto& [id, _] : labels)
    if (!used.count(id)) unknown.push_back(id);
  return unknown;
}

// ---------------------------------------------------------------------------
// Prediction files: JSONL {instance_id, spans: [text, ...], scores?, producer?}

inline std::vector<PredictionSet> load_predictions(std::string_view bytes) {
  std::vector<PredictionSet> out;
  std::set<std::string> ids;
  for_each_line(bytes, [&](std::string_view line, std::size_t off, std::size_t no) {
    const auto j = parse_json_line(line, off, no);
    const auto where = "prediction line " + std::to_string(no);
    if (!j.is_object() || !j.contains("instance_id") || !j["instance_id"].is_string() ||
        !j.contains("spans") || !j["spans"].is_array())
      throw ParseError(where + ": expected {instance_id, spans}", off, no);
    PredictionSet p;
    p.instance_id = j["instance_id"].get<std::string>();
    if (!ids.insert(p.instance_id).second)
      throw ParseError(where + ": duplicate instance_id " + p.instance_id, off, no);
    p.producer = detail::string_field(j, "producer");
    const json* scores = j.contains("scores") && j["scores"].is_array() ? &j["scores"] : nullptr;
    if (scores && scores->size() != j["spans"].size())
      throw ParseError(where + ": scores and spans differ in length", off, no);
    for (std::size_t i = 0; i < j["spans"].size(); ++i) {
      const auto& s = j["spans"][i];
      if (!s.is_string()) throw ParseError(where + ": span is not a string", off, no);
      Prediction pred{s.get<std::string>(), std::nullopt};
      if (scores && !(*scores)[i].is_null()) {
        if (!(*scores)[i].is_number()) throw ParseError(where + ": score is not a number", off, no);
        pred.score = (*scores)[i].get<double>();
      }
      p.spans.push_back(std::move(pred));
    }
    try {
      p.validate();
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what(), off, no);
    }
    out.push_back(std::move(p));
  });
  return out;
}

inline std::string export_predictions(const std::vector<PredictionSet>& preds) {
  std::string out;
  for (const auto& p : preds) {
    ordered_json j;
    j["instance_id"] = p.instance_id;
    ordered_json spans = ordered_json::array(), scores = ordered_json::array();
    bool any_score = false;
    for (const auto& s : p.spans) {
      spans.push_back(s.text);
      scores.push_back(s.score ? ordered_json(*s.score) : ordered_json());
      any_score = any_score || s.score.has_value();
    }
    j["spans"] = std::move(spans);
    if (any_score) j["scores"] = std::move(scores);
    if (!p.producer.empty()) j["producer"] = p.producer;
    out += dump_line(j);
  }
  return out;
}

}  // namespace mamrc

#endif  // MAMRC_INGEST_HPP_
