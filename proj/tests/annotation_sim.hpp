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

// Scripted annotation sessions shared by the unit and acceptance tests.

#ifndef MAMRC_TESTS_ANNOTATION_SIM_HPP_
#define MAMRC_TESTS_ANNOTATION_SIM_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mamrc/annotation_service.hpp"
#include "test_util.hpp"

namespace mamrc::testing {

inline std::vector<Instance> plain_corpus(std::size_t n) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(make_instance("s" + std::to_string(i), Dataset::kOther,
                                "Who is mentioned in passage " + std::to_string(i) + "?",
                                "Ann and Bob met in town " + std::to_string(i) + " .", {"Ann", "Bob"}));
  return out;
}

// Drives a two-round session in which every instance gets exactly the
// (first, second) labels of `plan`, one pair per corpus instance. Fresh
// annotators keep joining; a first-round Bad label is held back until the
// second annotator is assigned, since Bad finalizes the instance at once.
inline void run_planned_session(AnnotationService& svc,
                                const std::vector<std::pair<TaxonomyKind, TaxonomyKind>>& plan) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < svc.corpus().size(); ++i) pos[svc.corpus()[i].id] = i;
  std::vector<AnnotationTask> open;
  int next = 0;
  for (int guard = 0; guard < 100000; ++guard) {
    bool progress = false;
    for (auto it = open.begin(); it != open.end();) {
      const auto& pr = plan.at(pos.at(it->instance_id));
      const auto kind = it->round == Round::kFirst ? pr.first : pr.second;
      const auto assigned = svc.snapshot()[it->instance_id]["assignments"].size();
      if (kind == TaxonomyKind::kBadAnnotation && it->round == Round::kFirst && assigned < 2) {
        ++it;
        continue;
      }
      const auto r = svc.submit_label(it->assigned_to, it->instance_id, TaxonomyLabel{kind, {}});
      if (r.status != 200) throw Error("planned session: submit failed: " + r.message);
      it = open.erase(it);
      progress = true;
    }
    const auto who = "ann" + std::to_string(next++);
    for (auto stage : {Stage::kFull, Stage::kVerifyRecalled})
      if (auto t = svc.next_task(who, stage)) {
        open.push_back(*t);
        progress = true;
        break;
      }
    if (!progress && open.empty()) return;
  }
  throw Error("planned session did not terminate");
}

struct ReplayOutcome {
  bool ok = true;
  std::string detail;
  std::size_t restarts = 0;
  std::size_t events = 0;
};

// Applies one random stream of requests to a continuously running service
// and to a log-backed twin that is torn down and rebuilt from its log at
// random points (sometimes with a torn, half-written tail line). After every
// restart the twin's state must equal the continuous run's, field for field.
inline ReplayOutcome crash_replay_trial(std::uint64_t seed, int steps, const std::string& log_path) {
  std::filesystem::remove(log_path);
  std::mt19937_64 rng(seed);
  auto corpus = plain_corpus(12);
  corpus.push_back(make_instance("c0", Dataset::kOther, "Which two players scored?", "Ann and Bob scored .",
                                 {"Ann", "Bob"}));
  corpus.push_back(make_instance("c1", Dataset::kOther, "Name the first three states.", "Ohio , Utah , Iowa .",
                                 {"Ohio", "Utah", "Iowa"}));
  std::int64_t tick = 0;
  auto clock = [&tick] { return ++tick; };
  AnnotationService live(corpus, {}, seed, Lexicon::builtin(), clock);
  auto twin = std::make_unique<AnnotationService>(corpus, log_path, seed, Lexicon::builtin(), clock);
  const std::vector<std::string> annotators = {"u1", "u2", "u3", "u4", "u5"};
  std::vector<AnnotationTask> open;
  ReplayOutcome out;

  auto random_label = [&](const std::string& id) {
    const auto& inst = corpus[std::stoul(id.substr(1)) + (id[0] == 'c' ? 12 : 0)];
    switch (rng() % 4) {
      case 0: return TaxonomyLabel::passage_dependent();
      case 1: return TaxonomyLabel::bad_annotation();
      case 2: return TaxonomyLabel{TaxonomyKind::kQuestionDependent, {}};
      default: break;
    }
    const auto& toks = inst.question.tokens();
    return TaxonomyLabel{TaxonomyKind::kQuestionDependent,
                         {{toks[rng() % toks.size()], static_cast<ClueType>(rng() % 5), std::nullopt}}};
  };
  auto compare = [&](const std::string& when) {
    if (out.ok && live.snapshot() != twin->snapshot()) {
      out.ok = false;
      out.detail = "state diverged " + when;
    }
  };

  for (int step = 0; step < steps && out.ok; ++step) {
    const auto dice = rng() % 10;
    if (dice < 4) {
      const auto& who = annotators[rng() % annotators.size()];
      const auto stage = static_cast<Stage>(rng() % 3);
      const auto a = live.next_task(who, stage);
      const auto b = twin->next_task(who, stage);
      if (a.has_value() != b.has_value() || (a && a->instance_id != b->instance_id)) {
        out.ok = false;
        out.detail = "task assignment diverged at step " + std::to_string(step);
      }
      if (a) open.push_back(*a);
    } else if (dice < 8) {
      // Submit an open task, or poke a random instance (403/409 paths).
      std::string who, id;
      if (!open.empty() && rng() % 4) {
        const auto k = rng() % open.size();
        who = open[k].assigned_to;
        id = open[k].instance_id;
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        who = annotators[rng() % annotators.size()];
        id = corpus[rng() % corpus.size()].id;
      }
      const auto label = random_label(id);
      const auto a = live.submit_label(who, id, label);
      const auto b = twin->submit_label(who, id, label);
      if (a.status != b.status || a.finalized != b.finalized || a.conflict != b.conflict) {
        out.ok = false;
        out.detail = "submit outcome diverged at step " + std::to_string(step);
      }
    } else {
      twin.reset();
      if (rng() % 2) std::ofstream(log_path, std::ios::app | std::ios::binary) << R"({"event":"label","annot)";
      twin = std::make_unique<AnnotationService>(corpus, log_path, seed, Lexicon::builtin(), clock);
      ++out.restarts;
      compare("after restart at step " + std::to_string(step));
      if (out.ok && twin->log_size() != live.log_size()) {
        out.ok = false;
        out.detail = "event count differs after restart";
      }
    }
  }
  compare("at the end");
  if (out.ok) {
    // One more cold start from the final log.
    twin.reset();
    AnnotationService cold(corpus, log_path, seed, Lexicon::builtin(), clock);
    if (cold.snapshot() != live.snapshot()) {
      out.ok = false;
      out.detail = "cold replay differs";
    }
    const auto sa = stats_to_json(cold.agreement_stats()), sb = stats_to_json(live.agreement_stats());
    if (sa != sb) {
      out.ok = false;
      out.detail = "agreement stats differ after replay";
    }
  }
  out.events = live.log_size();
  std::filesystem::remove(log_path);
  return out;
}

}  // namespace mamrc::testing

#endif  // MAMRC_TESTS_ANNOTATION_SIM_HPP_
