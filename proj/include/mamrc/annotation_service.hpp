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

// Two-stage annotation workflow state: task assignment, label records,
// conflict routing and agreement statistics.
//
// All state is derived from an append-only event log (JSONL). Two event
// kinds exist:
//
//   {"event":"assign","annotator":..,"instance":..,"stage":..,"round":..,"ts":..}
//   {"event":"label","annotator":..,"instance":..,"round":..,"label":{..},"ts":..}
//
// Replaying the log reproduces the in-memory state exactly; timestamps are
// informational only. Task choice is pseudo-random but a pure function of
// (seed, log length, annotator), so replay never needs the generator.

#ifndef MAMRC_ANNOTATION_SERVICE_HPP_
#define MAMRC_ANNOTATION_SERVICE_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mamrc/core.hpp"
#include "mamrc/ingest.hpp"
#include "mamrc/taxonomy.hpp"

namespace mamrc {

// verify_recalled: confirm an automatically detected clue (stage 1).
// full: answer-form check, question-only classification, clue extraction
// (stage 2). adjudication: third-annotator resolution of a conflict.
enum class Stage { kVerifyRecalled, kFull, kAdjudication };

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kVerifyRecalled: return "verify_recalled";
    case Stage::kFull: return "full";
    case Stage::kAdjudication: break;
  }
  return "adjudication";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "verify_recalled") return Stage::kVerifyRecalled;
  if (s == "full") return Stage::kFull;
  if (s == "adjudication") return Stage::kAdjudication;
  return std::nullopt;
}

struct Assignment {
  std::string annotator;
  Stage stage = Stage::kFull;
  Round round = Round::kFirst;
  bool done = false;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AnnotationTask {
  std::string instance_id;
  Stage stage = Stage::kFull;
  Round round = Round::kFirst;
  std::string assigned_to;
};

// HTTP-shaped outcome of a submission.
struct SubmitResult {
  int status = 200;  // 200 ok, 400 bad request, 403 not assigned, 409 already submitted
  std::string message;
  bool finalized = false;
  bool conflict = false;
};

struct AgreementStats {
  std::optional<double> kappa;  // absent: insufficient data
  std::size_t pairs = 0;
  std::map<std::string, std::size_t> label_counts;  // finalized labels by kind
  std::size_t open_verify_recalled = 0;
  std::size_t open_full = 0;
  std::size_t conflicts = 0;
};

class AnnotationService {
 public:
  using Clock = std::function<std::int64_t()>;

  // `log_path` may be empty for a purely in-memory session. An existing log
  // is replayed before the service accepts requests.
  AnnotationService(std::vector<Instance> corpus, std::string log_path = {}, std::uint64_t seed = 0,
                    const Lexicon& lexicon = Lexicon::builtin(), Clock clock = {})
      : corpus_(std::move(corpus)), log_path_(std::move(log_path)), seed_(seed),
        clock_(clock ? std::move(clock) : Clock([] {
          return static_cast<std::int64_t>(
              std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count());
        })) {
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
      if (!index_.emplace(corpus_[i].id, i).second)
        throw InvalidArgument("duplicate instance id '" + corpus_[i].id + "'");
    }
    stage_.assign(corpus_.size(), Stage::kFull);
    const auto part = recall_stage1(corpus_, lexicon);
    for (auto i : part.recalled) stage_[i] = Stage::kVerifyRecalled;
    detected_.resize(corpus_.size());
    for (auto i : part.recalled)
      detected_[i] = hits_to_clues(corpus_[i].question, detect_clue_words(corpus_[i].question, lexicon));
    state_.resize(corpus_.size());
    if (!log_path_.empty()) replay_file();
  }

  std::optional<AnnotationTask> next_task(const std::string& annotator, Stage stage) {
    std::lock_guard lock(mu_);
    if (annotator.empty()) throw InvalidArgument("annotator id must be nonempty");
    // An annotator keeps their open task until they submit it.
    for (std::size_t i = 0; i < corpus_.size(); ++i)
      for (const auto& a : state_[i].assignments)
        if (a.annotator == annotator && !a.done && a.stage == stage && !state_[i].final_label)
          return AnnotationTask{corpus_[i].id, stage, a.round, annotator};

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < corpus_.size(); ++i)
      if (eligible_for(i, annotator, stage)) eligible.push_back(i);
    if (eligible.empty()) return std::nullopt;
    std::mt19937_64 rng(mix(seed_, events_.size(), annotator));
    const auto pick = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
    Round round = Round::kAdjudication;
    if (stage != Stage::kAdjudication) round = initial_count(pick) == 0 ? Round::kFirst : Round::kSecond;
    ordered_json ev;
    ev["event"] = "assign";
    ev["annotator"] = annotator;
    ev["instance"] = corpus_[pick].id;
    ev["stage"] = stage_name(stage);
    ev["round"] = round_name(round);
    ev["ts"] = clock_();
    commit(std::move(ev));
    return AnnotationTask{corpus_[pick].id, stage, round, annotator};
  }

  SubmitResult submit_label(const std::string& annotator, const std::string& instance_id,
                            TaxonomyLabel label) {
    std::lock_guard lock(mu_);
    const auto it = index_.find(instance_id);
    if (it == index_.end()) return {400, "unknown instance '" + instance_id + "'"};
    auto& st = state_[it->second];
    const Assignment* mine = nullptr;
    for (const auto& a : st.assignments)
      if (a.annotator == annotator && (!mine || (mine->done && !a.done))) mine = &a;
    if (!mine) return {403, "instance '" + instance_id + "' is not assigned to '" + annotator + "'"};
    if (mine->done) return {409, "label already submitted for '" + instance_id + "'", bool(st.final_label), st.conflict};
    if (label.kind != TaxonomyKind::kQuestionDependent && !label.clues.empty())
      return {400, "only question_dependent labels may carry clues"};
    ordered_json ev;
    ev["event"] = "label";
    ev["annotator"] = annotator;
    ev["instance"] = instance_id;
    ev["round"] = round_name(mine->round);
    ev["label"] = label_to_json(label);
    ev["ts"] = clock_();
    commit(std::move(ev));
    return {200, "ok", bool(st.final_label), st.conflict};
  }

  AgreementStats agreement_stats() const {
    std::lock_guard lock(mu_);
    AgreementStats s;
    std::vector<std::pair<TaxonomyKind, TaxonomyKind>> pairs;
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
      const auto& st = state_[i];
      const AnnotatorRecord *first = nullptr, *second = nullptr;
      for (const auto& r : st.records) {
        if (r.round == Round::kFirst && !first) first = &r;
        if (r.round == Round::kSecond && !second) second = &r;
      }
      if (first && second) pairs.emplace_back(first->label.kind, second->label.kind);
      if (st.final_label) ++s.label_counts[std::string(kind_name(st.final_label->kind))];
      if (st.conflict) ++s.conflicts;
      if (!st.final_label && !st.conflict && initial_count(i) < 2)
        ++(stage_[i] == Stage::kVerifyRecalled ? s.open_verify_recalled : s.open_full);
    }
    s.pairs = pairs.size();
    if (!pairs.empty()) s.kappa = cohens_kappa(pairs);
    return s;
  }

  // Instances awaiting a third annotator, with their conflicting records.
  std::vector<std::pair<std::string, std::vector<AnnotatorRecord>>> conflicts() const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<std::string, std::vector<AnnotatorRecord>>> out;
    for (std::size_t i = 0; i < corpus_.size(); ++i)
      if (state_[i].conflict) out.emplace_back(corpus_[i].id, state_[i].records);
    return out;
  }

  std::optional<TaxonomyLabel> final_label(const std::string& instance_id) const {
    std::lock_guard lock(mu_);
    const auto it = index_.find(instance_id);
    if (it == index_.end()) return std::nullopt;
    return state_[it->second].final_label;
  }

  // Question-side payload for the workbench. The passage is never included;
  // answers are shown only for the answer-form check.
  ordered_json task_payload(const AnnotationTask& task) const {
    std::lock_guard lock(mu_);
    const auto i = index_.at(task.instance_id);
    const auto& inst = corpus_[i];
    ordered_json j;
    j["instance_id"] = inst.id;
    j["stage"] = stage_name(task.stage);
    j["round"] = round_name(task.round);
    j["question"] = inst.question.raw();
    j["question_tokens"] = inst.question.tokens();
    j["answers"] = inst.gold.texts();
    j["steps"] = {"verify_answers", "classify_question_only", "extract_clues"};
    if (task.stage == Stage::kVerifyRecalled) {
      ordered_json clues = ordered_json::array();
      for (const auto& c : detected_[i]) {
        ordered_json cj{{"text", c.text}, {"type", clue_type_name(c.type)}};
        if (c.tokens) cj["tokens"] = {c.tokens->begin, c.tokens->end};
        clues.push_back(std::move(cj));
      }
      j["detected_clues"] = std::move(clues);
    }
    if (task.stage == Stage::kAdjudication) {
      ordered_json recs = ordered_json::array();
      for (const auto& r : state_[i].records)
        recs.push_back({{"annotator", r.annotator_id}, {"round", round_name(r.round)},
                        {"label", label_to_json(r.label)}});
      j["records"] = std::move(recs);
    }
    return j;
  }

  // Full derived state, for equality checks between a continuous run and a
  // replayed one.
  ordered_json snapshot() const {
    std::lock_guard lock(mu_);
    ordered_json j = ordered_json::object();
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
      const auto& st = state_[i];
      if (st.assignments.empty()) continue;
      ordered_json s;
      ordered_json as = ordered_json::array();
      for (const auto& a : st.assignments)
        as.push_back({{"annotator", a.annotator}, {"stage", stage_name(a.stage)},
                      {"round", round_name(a.round)}, {"done", a.done}});
      s["assignments"] = std::move(as);
      ordered_json rs = ordered_json::array();
      for (const auto& r : st.records)
        rs.push_back({{"annotator", r.annotator_id}, {"round", round_name(r.round)},
                      {"label", label_to_json(r.label)}});
      s["records"] = std::move(rs);
      s["final"] = st.final_label ? label_to_json(*st.final_label) : ordered_json();
      s["conflict"] = st.conflict;
      j[corpus_[i].id] = std::move(s);
    }
    return j;
  }

  std::size_t log_size() const {
    std::lock_guard lock(mu_);
    return events_.size();
  }

  const std::vector<Instance>& corpus() const { return corpus_; }

 private:
  struct InstanceState {
    std::vector<Assignment> assignments;
    std::vector<AnnotatorRecord> records;
    std::optional<TaxonomyLabel> final_label;
    bool conflict = false;
  };

  // FNV-1a over the inputs; stable across platforms unlike std::hash.
  static std::uint64_t mix(std::uint64_t seed, std::size_t n, const std::string& who) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](unsigned char c) {
      h ^= c;
      h *= 1099511628211ULL;
    };
    for (int b = 0; b < 8; ++b) feed(static_cast<unsigned char>(seed >> (8 * b)));
    for (int b = 0; b < 8; ++b) feed(static_cast<unsigned char>(static_cast<std::uint64_t>(n) >> (8 * b)));
    for (unsigned char c : who) feed(c);
    return h;
  }

  std::size_t initial_count(std::size_t i) const {
    std::size_t n = 0;
    for (const auto& a : state_[i].assignments)
      if (a.round != Round::kAdjudication) ++n;
    return n;
  }

  bool eligible_for(std::size_t i, const std::string& annotator, Stage stage) const {
    const auto& st = state_[i];
    if (st.final_label) return false;
    for (const auto& a : st.assignments)
      if (a.annotator == annotator) return false;
    if (stage == Stage::kAdjudication) {
      if (!st.conflict) return false;
      for (const auto& a : st.assignments)
        if (a.round == Round::kAdjudication) return false;
      return true;
    }
    return stage_[i] == stage && !st.conflict && initial_count(i) < 2;
  }

  // The event is durable before it takes effect, so a crash can only lose
  // an event the caller never saw acknowledged.
  void commit(ordered_json ev) {
    if (!log_path_.empty()) {
      std::ofstream out(log_path_, std::ios::app | std::ios::binary);
      out << ev.dump() << "\n";
      out.flush();
      if (!out) throw Error("cannot append to annotation log '" + log_path_ + "'");
    }
    apply(ev);
    events_.push_back(std::move(ev));
  }

  // A final line without its newline is a torn write from a crash; it is
  // dropped and truncated away. Any other bad line is fatal.
  void replay_file() {
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) return;  // fresh session
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    in.close();
    std::size_t line_no = 0, offset = 0;
    while (offset < bytes.size()) {
      ++line_no;
      const auto nl = bytes.find('\n', offset);
      const bool torn = nl == std::string::npos;
      const auto line = bytes.substr(offset, torn ? std::string::npos : nl - offset);
      const auto start = offset;
      offset = torn ? bytes.size() : nl + 1;
      if (trim(line).empty()) continue;
      ordered_json ev;
      try {
        ev = ordered_json::parse(line);
      } catch (const ordered_json::parse_error& e) {
        if (torn) {
          std::filesystem::resize_file(log_path_, start);
          break;
        }
        throw ParseError(log_path_ + ": " + e.what(), start, line_no);
      }
      try {
        apply(ev);
      } catch (const Error& e) {
        throw ParseError(log_path_ + ": " + e.what(), start, line_no);
      } catch (const ordered_json::exception& e) {
        throw ParseError(log_path_ + ": malformed event: " + e.what(), start, line_no);
      }
      events_.push_back(std::move(ev));
      if (torn) {
        std::ofstream(log_path_, std::ios::app | std::ios::binary) << "\n";
      }
    }
  }

  void apply(const ordered_json& ev) {
    const auto kind = ev.at("event").get<std::string>();
    const auto annotator = ev.at("annotator").get<std::string>();
    const auto id = ev.at("instance").get<std::string>();
    const auto it = index_.find(id);
    if (it == index_.end()) throw InvalidArgument("event for unknown instance '" + id + "'");
    const auto i = it->second;
    auto& st = state_[i];
    const auto round = parse_round(ev.at("round").get<std::string>());
    if (!round) throw InvalidArgument("unknown round in event");
    if (kind == "assign") {
      const auto stage = parse_stage(ev.at("stage").get<std::string>());
      if (!stage) throw InvalidArgument("unknown stage in event");
      st.assignments.push_back({annotator, *stage, *round, false});
      return;
    }
    if (kind != "label") throw InvalidArgument("unknown event '" + kind + "'");
    Assignment* mine = nullptr;
    for (auto& a : st.assignments)
      if (a.annotator == annotator && !a.done && a.round == *round) mine = &a;
    if (!mine) throw InvalidArgument("label event without an open assignment");
    mine->done = true;
    auto label = label_from_json(ev.at("label"));
    locate_clues(corpus_[i].question, &label);
    st.records.push_back({annotator, id, std::move(label), *round});
    if (st.final_label) return;  // late label on a finished instance: kept for the record

    const auto& rec = st.records.back();
    if (rec.label.kind == TaxonomyKind::kBadAnnotation) {
      st.final_label = TaxonomyLabel::bad_annotation();
      st.conflict = false;
      return;
    }
    std::size_t initial = 0;
    for (const auto& r : st.records)
      if (r.round != Round::kAdjudication) ++initial;
    if (rec.round != Round::kAdjudication && initial < 2) return;
    const auto verdict = adjudicate(st.records);
    if (verdict.final()) {
      st.final_label = verdict.label;
      st.conflict = false;
    } else {
      st.conflict = true;
    }
  }

  mutable std::mutex mu_;
  std::vector<Instance> corpus_;
  std::map<std::string, std::size_t> index_;
  std::vector<Stage> stage_;
  std::vector<std::vector<Clue>> detected_;
  std::vector<InstanceState> state_;
  std::vector<ordered_json> events_;
  std::string log_path_;
  std::uint64_t seed_;
  Clock clock_;
};

inline ordered_json stats_to_json(const AgreementStats& s) {
  ordered_json j;
  if (s.kappa) {
    j["status"] = "ok";
    j["kappa"] = *s.kappa;
  } else {
    j["status"] = "insufficient data";
    j["kappa"] = nullptr;
  }
  j["pairs"] = s.pairs;
  ordered_json counts = ordered_json::object();
  for (auto k : kAllKinds) {
    const auto it = s.label_counts.find(std::string(kind_name(k)));
    counts[std::string(kind_name(k))] = it == s.label_counts.end() ? 0 : it->second;
  }
  j["label_counts"] = std::move(counts);
  j["queues"] = {{"verify_recalled", s.open_verify_recalled},
                 {"full", s.open_full},
                 {"adjudication", s.conflicts}};
  return j;
}

}  // namespace mamrc

#endif  // MAMRC_ANNOTATION_SERVICE_HPP_
