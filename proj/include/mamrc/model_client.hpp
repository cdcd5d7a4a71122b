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

// Wire protocol to external neural models.
//
// Request line:  {"id":...,"mode":...,"question":...,"passage":...}
// Response line: {"id":...,"result":{...}}  or  {"id":...,"error":"..."}
//
// Result objects per mode:
//   extract_one  {"text": str, "score": num}      empty text = no answer
//   tag          {"probs": [num, ...]}            one per passage token
//   candidates   {"candidates": [{"start","end","score"}, ...]}
//   count        {"distribution": [num x 8]}      P(k) for k = 1..8
//   generate     {"text": str}

#ifndef MAMRC_MODEL_CLIENT_HPP_
#define MAMRC_MODEL_CLIENT_HPP_

#include <atomic>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mamrc/core.hpp"

namespace mamrc {

enum class ModelMode { kExtractOne, kTag, kCandidates, kCount, kGenerate };

inline std::string_view mode_name(ModelMode m) {
  switch (m) {
    case ModelMode::kExtractOne: return "extract_one";
    case ModelMode::kTag: return "tag";
    case ModelMode::kCandidates: return "candidates";
    case ModelMode::kCount: return "count";
    case ModelMode::kGenerate: break;
  }
  return "generate";
}

inline std::optional<ModelMode> parse_mode(std::string_view s) {
  for (auto m : {ModelMode::kExtractOne, ModelMode::kTag, ModelMode::kCandidates,
                 ModelMode::kCount, ModelMode::kGenerate})
    if (mode_name(m) == s) return m;
  return std::nullopt;
}

struct ModelRequest {
  ModelMode mode = ModelMode::kExtractOne;
  std::string question;
  std::string passage;
  std::string request_id;

  friend bool operator==(const ModelRequest&, const ModelRequest&) = default;
};

struct CandidateSpan {
  Range tokens;
  double score = 0;

  friend bool operator==(const CandidateSpan&, const CandidateSpan&) = default;
};

struct SpanResult {
  std::string text;
  double score = 0;
  friend bool operator==(const SpanResult&, const SpanResult&) = default;
};
struct TagResult {
  std::vector<double> probs;
  friend bool operator==(const TagResult&, const TagResult&) = default;
};
struct CandidatesResult {
  std::vector<CandidateSpan> candidates;
  friend bool operator==(const CandidatesResult&, const CandidatesResult&) = default;
};
struct CountResult {
  std::vector<double> distribution;
  friend bool operator==(const CountResult&, const CountResult&) = default;
};
struct GenerateResult {
  std::string text;
  friend bool operator==(const GenerateResult&, const GenerateResult&) = default;
};

using ModelResult = std::variant<SpanResult, TagResult, CandidatesResult, CountResult, GenerateResult>;

inline ModelMode result_mode(const ModelResult& r) {
  return static_cast<ModelMode>(r.index());
}

struct ModelResponse {
  std::string request_id;
  ModelResult result;

  ModelMode mode() const { return result_mode(result); }
  friend bool operator==(const ModelResponse&, const ModelResponse&) = default;
};

// ---------------------------------------------------------------------------
// Codec

inline std::string serialize_request(const ModelRequest& r) {
  ordered_json j;
  j["id"] = r.request_id;
  j["mode"] = mode_name(r.mode);
  j["question"] = r.question;
  j["passage"] = r.passage;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

inline ModelRequest parse_request(std::string_view line) {
  json j;
  try {
    j = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what(), std::string(line));
  }
  auto str = [&](const char* k) -> std::string {
    if (!j.is_object() || !j.contains(k) || !j[k].is_string())
      throw ProtocolError(std::string("request field '") + k + "' missing or not a string",
                          std::string(line));
    return j[k].get<std::string>();
  };
  ModelRequest r;
  r.request_id = str("id");
  const auto m = parse_mode(str("mode"));
  if (!m) throw ProtocolError("unknown request mode", std::string(line));
  r.mode = *m;
  r.question = str("question");
  r.passage = str("passage");
  return r;
}

inline ordered_json result_to_json(const ModelResult& result) {
  ordered_json j;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SpanResult>) {
          j["text"] = r.text;
          j["score"] = r.score;
        } else if constexpr (std::is_same_v<T, TagResult>) {
          j["probs"] = r.probs;
        } else if constexpr (std::is_same_v<T, CandidatesResult>) {
          j["candidates"] = ordered_json::array();
          for (const auto& c : r.candidates)
            j["candidates"].push_back(
                ordered_json{{"start", c.tokens.begin}, {"end", c.tokens.end}, {"score", c.score}});
        } else if constexpr (std::is_same_v<T, CountResult>) {
          j["distribution"] = r.distribution;
        } else {
          j["text"] = r.text;
        }
      },
      result);
  return j;
}

inline std::string serialize_response(const ModelResponse& r) {
  ordered_json j;
  j["id"] = r.request_id;
  j["result"] = result_to_json(r.result);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

inline std::string serialize_error(std::string_view id, std::string_view message) {
  ordered_json j;
  j["id"] = id;
  j["error"] = message;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace detail {

inline double probability(const json& v, const std::string& payload) {
  if (!v.is_number()) throw ProtocolError("expected a number", payload);
  const double p = v.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) throw ProtocolError("probability outside [0, 1]", payload);
  return p;
}

}  // namespace detail

// Parses a result object for the given mode, validating its invariants.
inline ModelResult parse_result(const json& r, ModelMode mode, const std::string& payload = {}) {
  if (!r.is_object()) throw ProtocolError("result is not an object", payload);
  auto need = [&](const char* k) -> const json& {
    if (!r.contains(k))
      throw ProtocolError(std::string("result for mode ") + std::string(mode_name(mode)) +
                              " lacks '" + k + "'",
                          payload);
    return r[k];
  };
  switch (mode) {
    case ModelMode::kExtractOne: {
      const auto& text = need("text");
      if (!text.is_string()) throw ProtocolError("text is not a string", payload);
      double score = 0;
      if (r.contains("score")) {
        if (!r["score"].is_number() || !std::isfinite(r["score"].get<double>()))
          throw ProtocolError("score is not a finite number", payload);
        score = r["score"].get<double>();
      }
      return SpanResult{text.get<std::string>(), score};
    }
    case ModelMode::kTag: {
      const auto& probs = need("probs");
      if (!probs.is_array()) throw ProtocolError("probs is not an array", payload);
      TagResult t;
      for (const auto& p : probs) t.probs.push_back(detail::probability(p, payload));
      return t;
    }
    case ModelMode::kCandidates: {
      const auto& cands = need("candidates");
      if (!cands.is_array()) throw ProtocolError("candidates is not an array", payload);
      CandidatesResult out;
      for (const auto& c : cands) {
        if (!c.is_object() || !c.contains("start") || !c.contains("end") || !c.contains("score") ||
            !c["start"].is_number_unsigned() || !c["end"].is_number_unsigned() ||
            !c["score"].is_number())
          throw ProtocolError("candidate must be {start, end, score}", payload);
        CandidateSpan s{{c["start"].get<std::size_t>(), c["end"].get<std::size_t>()},
                        c["score"].get<double>()};
        if (s.tokens.begin >= s.tokens.end) throw ProtocolError("empty candidate span", payload);
        if (!std::isfinite(s.score)) throw ProtocolError("non-finite candidate score", payload);
        out.candidates.push_back(s);
      }
      return out;
    }
    case ModelMode::kCount: {
      const auto& dist = need("distribution");
      if (!dist.is_array() || dist.size() != static_cast<std::size_t>(kMaxAnswers))
        throw ProtocolError("distribution must have " + std::to_string(kMaxAnswers) + " entries",
                            payload);
      CountResult c;
      double sum = 0;
      for (const auto& p : dist) {
        c.distribution.push_back(detail::probability(p, payload));
        sum += c.distribution.back();
      }
      if (std::abs(sum - 1.0) > 1e-6) throw ProtocolError("distribution does not sum to 1", payload);
      return c;
    }
    case ModelMode::kGenerate: {
      const auto& text = need("text");
      if (!text.is_string()) throw ProtocolError("text is not a string", payload);
      return GenerateResult{text.get<std::string>()};
    }
  }
  throw ProtocolError("unknown mode", payload);
}

inline ModelResponse parse_response(std::string_view line, ModelMode mode) {
  const std::string payload(line);
  json j;
  try {
    j = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what(), payload);
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
    throw ProtocolError("response lacks a string id", payload);
  if (j.contains("error"))
    throw ProtocolError("model error: " + (j["error"].is_string() ? j["error"].get<std::string>()
                                                                  : j["error"].dump()),
                        payload);
  if (!j.contains("result")) throw ProtocolError("response lacks result", payload);
  return {j["id"].get<std::string>(), parse_result(j["result"], mode, payload)};
}

// ---------------------------------------------------------------------------
// Client interface

class ModelClient {
 public:
  virtual ~ModelClient() = default;

  // Returns a response whose variant matches request.mode and whose id
  // echoes request.request_id. Throws TransportError or ProtocolError.
  virtual ModelResponse query(const ModelRequest& request) = 0;

  // Fills in a fresh request id and validates the response.
  ModelResponse ask(ModelMode mode, std::string question, std::string passage) {
    ModelRequest r{mode, std::move(question), std::move(passage),
                   "r" + std::to_string(next_id_.fetch_add(1))};
    auto resp = query(r);
    if (resp.request_id != r.request_id)
      throw ProtocolError("response id '" + resp.request_id + "' does not echo '" +
                              r.request_id + "'",
                          serialize_response(resp));
    if (resp.mode() != mode)
      throw ProtocolError("response variant does not match request mode",
                          serialize_response(resp));
    return resp;
  }

 private:
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace mamrc

#endif  // MAMRC_MODEL_CLIENT_HPP_
