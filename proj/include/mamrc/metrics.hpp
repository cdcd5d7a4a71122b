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

// Exact-match and partial-match scoring for multi-answer predictions.
//
// For prediction p_i and gold t_j the partial scores are
//   ret(i, j) = |LCS(p_i, t_j)| / |p_i|,   rel(i, j) = |LCS(p_i, t_j)| / |t_j|
// where LCS is the longest common contiguous run of normalized tokens. A
// question contributes sum_i max_j ret(i, j) and sum_j max_i rel(i, j); the
// corpus divides the summed numerators by the summed prediction and gold
// counts (micro-average). Exact match pairs predictions and golds one-to-one
// on normalized text.

#ifndef MAMRC_METRICS_HPP_
#define MAMRC_METRICS_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mamrc/core.hpp"

namespace mamrc {

enum class LcsUnit { kToken, kChar };

// Length of the longest common contiguous run of elements.
template <typename T>
std::size_t lcs_len(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

inline std::size_t lcs_len(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return lcs_len<std::string>(std::span<const std::string>(a), std::span<const std::string>(b));
}

struct PartialScorePair {
  double ret = 0;
  double rel = 0;
};

// Scoring units of a text: normalized tokens, or the characters of the
// normalized string in char mode.
inline std::vector<std::string> scoring_units(std::string_view text, LcsUnit unit) {
  if (unit == LcsUnit::kToken) return normalized_tokens(text);
  std::vector<std::string> out;
  for (char c : normalize(text)) out.emplace_back(1, c);
  return out;
}

inline PartialScorePair partial_scores(const std::vector<std::string>& pred,
                                       const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return {};
  const double l = static_cast<double>(lcs_len(pred, gold));
  return {l / static_cast<double>(pred.size()), l / static_cast<double>(gold.size())};
}

inline PartialScorePair partial_scores(std::string_view pred, std::string_view gold,
                                       LcsUnit unit = LcsUnit::kToken) {
  return partial_scores(scoring_units(pred, unit), scoring_units(gold, unit));
}

struct QuestionScore {
  std::size_t em_matched_pairs = 0;
  std::size_t n_pred = 0;
  std::size_t m_gold = 0;
  double pm_ret_sum = 0;
  double pm_rel_sum = 0;
  // Predictions that normalize to nothing; they score zero everywhere.
  std::size_t empty_predictions = 0;

  QuestionScore& operator+=(const QuestionScore& o) {
    em_matched_pairs += o.em_matched_pairs;
    n_pred += o.n_pred;
    m_gold += o.m_gold;
    pm_ret_sum += o.pm_ret_sum;
    pm_rel_sum += o.pm_rel_sum;
    empty_predictions += o.empty_predictions;
    return *this;
  }
};

inline QuestionScore score_question(const std::vector<std::string>& preds,
                                    const std::vector<std::string>& golds,
                                    LcsUnit unit = LcsUnit::kToken) {
  QuestionScore q;
  q.n_pred = preds.size();
  q.m_gold = golds.size();

  std::vector<std::vector<std::string>> pu, gu;
  for (const auto& p : preds) {
    pu.push_back(scoring_units(p, unit));
    if (pu.back().empty()) ++q.empty_predictions;
  }
  for (const auto& g : golds) gu.push_back(scoring_units(g, unit));

  // Maximum one-to-one matching under equality is the multiset intersection.
  std::map<std::string, long> gold_counts;
  for (const auto& g : golds) {
    auto n = normalize(g);
    if (!n.empty()) ++gold_counts[n];
  }
  for (const auto& p : preds) {
    auto it = gold_counts.find(normalize(p));
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++q.em_matched_pairs;
    }
  }

  std::vector<double> best_rel(golds.size(), 0.0);
  for (std::size_t i = 0; i < pu.size(); ++i) {
    double best_ret = 0;
    for (std::size_t j = 0; j < gu.size(); ++j) {
      const auto s = partial_scores(pu[i], gu[j]);
      best_ret = std::max(best_ret, s.ret);
      best_rel[j] = std::max(best_rel[j], s.rel);
    }
    q.pm_ret_sum += best_ret;
  }
  for (double r : best_rel) q.pm_rel_sum += r;
  return q;
}

inline QuestionScore score_question(const PredictionSet& preds, const AnswerSet& gold,
                                    LcsUnit unit = LcsUnit::kToken) {
  return score_question(preds.texts(), gold.texts(), unit);
}

struct PRF {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

inline PRF make_prf(double num_p, double den_p, double num_r, double den_r) {
  PRF r;
  r.precision = den_p > 0 ? 100.0 * num_p / den_p : 0.0;
  r.recall = den_r > 0 ? 100.0 * num_r / den_r : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

struct ScoreReport {
  PRF em;
  PRF pm;
  QuestionScore totals;
  std::size_t questions = 0;
};

inline ScoreReport corpus_report(std::span<const QuestionScore> scores) {
  ScoreReport r;
  for (const auto& q : scores) r.totals += q;
  r.questions = scores.size();
  const auto np = static_cast<double>(r.totals.n_pred);
  const auto mg = static_cast<double>(r.totals.m_gold);
  r.em = make_prf(static_cast<double>(r.totals.em_matched_pairs), np,
                  static_cast<double>(r.totals.em_matched_pairs), mg);
  r.pm = make_prf(r.totals.pm_ret_sum, np, r.totals.pm_rel_sum, mg);
  return r;
}

inline ScoreReport corpus_report(const std::vector<QuestionScore>& scores) {
  return corpus_report(std::span<const QuestionScore>(scores));
}

// Per-instance scores of a prediction file against a corpus. Instances with
// no prediction score as empty predictions. Unmatched prediction ids are
// returned in `unknown_ids`.
struct Evaluation {
  std::vector<std::string> instance_ids;
  std::vector<QuestionScore> scores;
  std::vector<std::string> unknown_ids;
};

inline Evaluation evaluate(const std::vector<Instance>& corpus,
                           const std::vector<PredictionSet>& preds,
                           LcsUnit unit = LcsUnit::kToken) {
  std::map<std::string, const PredictionSet*> by_id;
  for (const auto& p : preds) by_id[p.instance_id] = &p;
  Evaluation ev;
  for (const auto& inst : corpus) {
    const auto it = by_id.find(inst.id);
    const std::vector<std::string> texts = it == by_id.end() ? std::vector<std::string>{}
                                                             : it->second->texts();
    ev.instance_ids.push_back(inst.id);
    ev.scores.push_back(score_question(texts, inst.gold.texts(), unit));
    if (it != by_id.end()) by_id.erase(it);
  }
  for (const auto& [id, _] : by_id) ev.unknown_ids.push_back(id);
  return ev;
}

inline ordered_json report_to_json(const ScoreReport& r) {
  auto prf = [](const PRF& p) {
    return ordered_json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  ordered_json j;
  j["questions"] = r.questions;
  j["em"] = prf(r.em);
  j["pm"] = prf(r.pm);
  j["n_pred"] = r.totals.n_pred;
  j["m_gold"] = r.totals.m_gold;
  j["em_matched"] = r.totals.em_matched_pairs;
  j["empty_predictions"] = r.totals.empty_predictions;
  return j;
}

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Aligned text table with EM and PM precision/recall/F1 columns. `rows`
// pairs a row label with its report.
inline std::string render_score_table(
    const std::vector<std::pair<std::string, ScoreReport>>& rows) {
  std::size_t w = 5;
  for (const auto& [label, _] : rows) w = std::max(w, label.size());
  auto pad = [](std::string s, std::size_t n, bool right) {
    if (s.size() >= n) return s;
    return right ? std::string(n - s.size(), ' ') + s : s + std::string(n - s.size(), ' ');
  };
  std::ostringstream out;
  out << pad("", w, false) << " | " << pad("EM", 23, false) << " | PM\n";
  out << pad("", w, false) << " | ";
  for (int k = 0; k < 2; ++k) {
    out << pad("P", 7, true) << pad("R", 8, true) << pad("F1", 8, true);
    out << (k == 0 ? " | " : "\n");
  }
  out << std::string(w, '-') << "-+-" << std::string(23, '-') << "-+-" << std::string(23, '-')
      << "\n";
  for (const auto& [label, r] : rows) {
    out << pad(label, w, false) << " | ";
    out << pad(fmt2(r.em.precision), 7, true) << pad(fmt2(r.em.recall), 8, true)
        << pad(fmt2(r.em.f1), 8, true) << " | ";
    out << pad(fmt2(r.pm.precision), 7, true) << pad(fmt2(r.pm.recall), 8, true)
        << pad(fmt2(r.pm.f1), 8, true) << "\n";
  }
  return out.str();
}

}  // namespace mamrc

#endif  // MAMRC_METRICS_HPP_
