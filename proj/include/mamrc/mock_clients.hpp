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

// Deterministic in-process model clients for tests, CI and dry runs.
//
//   oracle      answers from the gold corpus. The request question must be
//               an instance question, optionally followed by
//               " except a, b, ..." (excluded answers) or by an appended
//               answer-count sentence.
//   scripted    looks the request question up in a fixture table.
//   degenerate  never finds anything.

#ifndef MAMRC_MOCK_CLIENTS_HPP_
#define MAMRC_MOCK_CLIENTS_HPP_

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mamrc/core.hpp"
#include "mamrc/model_client.hpp"
#include "mamrc/paradigms.hpp"

namespace mamrc {

class OracleClient : public ModelClient {
 public:
  explicit OracleClient(std::vector<Instance> corpus) : corpus_(std::move(corpus)) {
    for (std::size_t i = 0; i < corpus_.size(); ++i)
      by_passage_[corpus_[i].passage.raw()].push_back(i);
  }

  ModelResponse query(const ModelRequest& req) override {
    const auto [inst, excluded] = resolve(req);
    std::vector<std::string> remaining;
    for (const auto& t : inst->gold.texts())
      if (!excluded.count(normalize(t))) remaining.push_back(t);

    ModelResponse resp{req.request_id, {}};
    switch (req.mode) {
      case ModelMode::kExtractOne:
        resp.result = remaining.empty() ? SpanResult{"", 0.0} : SpanResult{remaining.front(), 1.0};
        break;
      case ModelMode::kTag: {
        TagResult t{std::vector<double>(inst->passage.size(), 0.0)};
        for (const auto& s : inst->gold.spans())
          if (s.tokens)
            for (auto k = s.tokens->begin; k < s.tokens->end; ++k) t.probs[k] = 1.0;
        resp.result = std::move(t);
        break;
      }
      case ModelMode::kCandidates: {
        CandidatesResult c;
        for (const auto& s : inst->gold.spans())
          if (s.tokens) c.candidates.push_back({*s.tokens, 1.0});
        resp.result = std::move(c);
        break;
      }
      case ModelMode::kCount: {
        CountResult c{std::vector<double>(kMaxAnswers, 0.0)};
        const auto n = std::clamp<std::size_t>(inst->gold.size(), 1, kMaxAnswers);
        c.distribution[n - 1] = 1.0;
        resp.result = std::move(c);
        break;
      }
      case ModelMode::kGenerate:
        resp.result = GenerateResult{remaining.empty() ? std::string(kNoAnswer)
                                                       : join(remaining, "; ")};
        break;
    }
    return resp;
  }

 private:
  struct Resolved {
    const Instance* inst;
    std::set<std::string> excluded;
  };

  Resolved resolve(const ModelRequest& req) const {
    const auto it = by_passage_.find(req.passage);
    if (it == by_passage_.end())
      throw ProtocolError("oracle: no instance with this passage", serialize_request(req));
    const Instance* best = nullptr;
    for (auto idx : it->second) {
      const auto& q = corpus_[idx].question.raw();
      if (req.question.compare(0, q.size(), q) != 0) continue;
      if (req.question.size() > q.size() && req.question[q.size()] != ' ') continue;
      if (!best || q.size() > best->question.raw().size()) best = &corpus_[idx];
    }
    if (!best) throw ProtocolError("oracle: no instance with this question", serialize_request(req));
    Resolved r{best, {}};
    const std::string marker = " except ";
    const auto rest = req.question.substr(best->question.raw().size());
    if (rest.rfind(marker, 0) == 0) {
      const auto list = rest.substr(marker.size());
      std::vector<std::string> pieces;
      if (segment(list, 0, best->gold.texts(), &pieces)) {
        for (const auto& p : pieces) r.excluded.insert(normalize(p));
      } else {
        std::size_t pos = 0;
        while (pos <= list.size()) {
          auto comma = list.find(", ", pos);
          if (comma == std::string::npos) comma = list.size();
          r.excluded.insert(normalize(list.substr(pos, comma - pos)));
          pos = comma + 2;
        }
      }
    }
    return r;
  }

  // Splits `list` into ", "-separated gold texts; answers may contain ", ".
  static bool segment(const std::string& list, std::size_t pos, const std::vector<std::string>& golds,
                      std::vector<std::string>* out) {
    if (pos == list.size()) return true;
    for (const auto& g : golds) {
      if (g.empty() || list.compare(pos, g.size(), g) != 0) continue;
      const auto next = pos + g.size();
      if (next != list.size() && list.compare(next, 2, ", ") != 0) continue;
      out->push_back(g);
      if (segment(list, next == list.size() ? next : next + 2, golds, out)) return true;
      out->pop_back();
    }
    return false;
  }

  std::vector<Instance> corpus_;
  std::map<std::string, std::vector<std::size_t>> by_passage_;
};

// Fixture table keyed by request question. A string value answers
// extract_one/generate directly; an object is a wire-format result.
class ScriptedClient : public ModelClient {
 public:
  explicit ScriptedClient(std::map<std::string, json> fixtures) : fixtures_(std::move(fixtures)) {}

  static std::unique_ptr<ScriptedClient> from_json(const json& j) {
    if (!j.is_object()) throw InvalidArgument("scripted fixtures must be a JSON object");
    std::map<std::string, json> m;
    for (const auto& [k, v] : j.items()) m[k] = v;
    return std::make_unique<ScriptedClient>(std::move(m));
  }

  ModelResponse query(const ModelRequest& req) override {
    const auto it = fixtures_.find(req.question);
    if (it == fixtures_.end())
      throw ProtocolError("scripted: no fixture for question '" + req.question + "'",
                          serialize_request(req));
    const auto& v = it->second;
    if (v.is_string()) {
      if (req.mode == ModelMode::kExtractOne) return {req.request_id, SpanResult{v.get<std::string>(), 1.0}};
      if (req.mode == ModelMode::kGenerate) return {req.request_id, GenerateResult{v.get<std::string>()}};
      throw ProtocolError("scripted: string fixture cannot answer mode " +
                              std::string(mode_name(req.mode)),
                          serialize_request(req));
    }
    return {req.request_id, parse_result(v, req.mode, v.dump())};
  }

 private:
  std::map<std::string, json> fixtures_;
};

class DegenerateClient : public ModelClient {
 public:
  ModelResponse query(const ModelRequest& req) override {
    ModelResponse resp{req.request_id, {}};
    switch (req.mode) {
      case ModelMode::kExtractOne: resp.result = SpanResult{"", 0.0}; break;
      case ModelMode::kTag:
        resp.result = TagResult{std::vector<double>(tokenize(req.passage).size(), 0.0)};
        break;
      case ModelMode::kCandidates: resp.result = CandidatesResult{}; break;
      case ModelMode::kCount: {
        CountResult c{std::vector<double>(kMaxAnswers, 0.0)};
        c.distribution[0] = 1.0;
        resp.result = std::move(c);
        break;
      }
      case ModelMode::kGenerate: resp.result = GenerateResult{""}; break;
    }
    return resp;
  }
};

// Counts calls and forwards to another client. Thread-safe counter.
class CountingClient : public ModelClient {
 public:
  explicit CountingClient(ModelClient& inner) : inner_(inner) {}

  ModelResponse query(const ModelRequest& req) override {
    calls_.fetch_add(1);
    return inner_.query(req);
  }

  std::size_t calls() const { return calls_.load(); }

 private:
  ModelClient& inner_;
  std::atomic<std::size_t> calls_{0};
};

enum class MockKind { kOracle, kScripted, kDegenerate };

inline std::unique_ptr<ModelClient> make_mock(MockKind kind, std::vector<Instance> corpus = {},
                                              const json& fixtures = json::object()) {
  switch (kind) {
    case MockKind::kOracle: return std::make_unique<OracleClient>(std::move(corpus));
    case MockKind::kScripted:
      return ScriptedClient::from_json(fixtures);
    case MockKind::kDegenerate: break;
  }
  return std::make_unique<DegenerateClient>();
}

}  // namespace mamrc

#endif  // MAMRC_MOCK_CLIENTS_HPP_
