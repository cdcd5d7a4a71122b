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

// Corpus analyses: label distributions, clue-type distributions, answer-count
// cross tabulations, corpus statistics and per-type score breakdowns, with
// JSON, CSV and aligned-text renderers.

#ifndef MAMRC_REPORTING_HPP_
#define MAMRC_REPORTING_HPP_

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mamrc/core.hpp"
#include "mamrc/metrics.hpp"

namespace mamrc {

enum class Dimension {
  kTypes,       // instance types per dataset
  kClues,       // clue types among with-clue-word questions
  kCounts,      // answer-count buckets x instance type
  kClueCounts,  // answer-count buckets x clue type
};

struct DistributionRow {
  std::string group;
  std::string label;
  std::vector<std::size_t> counts;  // one per column
  // Denominator for the row's percentages.
  std::size_t base = 0;

  double percent(std::size_t col) const {
    return base == 0 ? 0.0 : 100.0 * static_cast<double>(counts[col]) / static_cast<double>(base);
  }
};

struct DistributionTable {
  Dimension dimension = Dimension::kTypes;
  std::vector<std::string> columns;
  // Columns rendered with a percentage next to the count.
  std::vector<bool> show_percent;
  std::vector<DistributionRow> rows;

  const DistributionRow* find(std::string_view group, std::string_view label) const {
    for (const auto& r : rows)
      if (r.group == group && r.label == label) return &r;
    return nullptr;
  }
};

inline std::string_view answer_bucket(std::size_t n) {
  if (n <= 1) return "1";
  if (n == 2) return "2";
  if (n == 3) return "3";
  return ">3";
}

namespace detail {

inline std::vector<Dataset> datasets_in(const std::vector<Instance>& corpus) {
  std::set<Dataset> seen;
  for (const auto& i : corpus) seen.insert(i.dataset);
  return {seen.begin(), seen.end()};
}

// Column index of an instance's type; with/without clue words are separate.
enum TypeColumn { kPassage = 0, kQuestion, kWithClue, kNoClue, kBad, kUnlabeled };

inline void count_type(const Instance& inst, std::vector<std::size_t>& counts) {
  if (!inst.taxonomy) {
    ++counts[kUnlabeled];
    return;
  }
  switch (inst.taxonomy->kind) {
    case TaxonomyKind::kPassageDependent: ++counts[kPassage]; break;
    case TaxonomyKind::kQuestionDependent:
      ++counts[kQuestion];
      ++counts[inst.taxonomy->with_clue_words() ? kWithClue : kNoClue];
      break;
    case TaxonomyKind::kBadAnnotation: ++counts[kBad]; break;
  }
}

}  // namespace detail

// Exact counts along one dimension. Unlabeled instances get their own
// column; a question with several clue types counts once per type.
inline DistributionTable distribution(const std::vector<Instance>& corpus, Dimension dim) {
  DistributionTable t;
  t.dimension = dim;
  const auto datasets = detail::datasets_in(corpus);
  const std::vector<std::string> buckets = {"1", "2", "3", ">3"};

  switch (dim) {
    case Dimension::kTypes: {
      t.columns = {"passage_dependent", "question_dependent", "with_clue_word", "no_clue_word",
                   "bad_annotation", "unlabeled"};
      t.show_percent.assign(t.columns.size(), true);
      DistributionRow total{"", "Total", std::vector<std::size_t>(t.columns.size(), 0), 0};
      for (auto d : datasets) {
        DistributionRow row{"", std::string(dataset_name(d)),
                            std::vector<std::size_t>(t.columns.size(), 0), 0};
        for (const auto& inst : corpus) {
          if (inst.dataset != d) continue;
          ++row.base;
          detail::count_type(inst, row.counts);
        }
        for (std::size_t c = 0; c < row.counts.size(); ++c) total.counts[c] += row.counts[c];
        total.base += row.base;
        t.rows.push_back(std::move(row));
      }
      t.rows.push_back(std::move(total));
      break;
    }
    case Dimension::kClues: {
      t.columns = {"with_clue_word"};
      for (auto ct : kAllClueTypes) t.columns.emplace_back(clue_type_name(ct));
      t.show_percent.assign(t.columns.size(), true);
      t.show_percent[0] = false;
      for (auto d : datasets) {
        DistributionRow row{"", std::string(dataset_name(d)),
                            std::vector<std::size_t>(t.columns.size(), 0), 0};
        for (const auto& inst : corpus) {
          if (inst.dataset != d || !inst.taxonomy || !inst.taxonomy->with_clue_words()) continue;
          ++row.counts[0];
          for (auto ct : inst.taxonomy->clue_types()) ++row.counts[1 + static_cast<std::size_t>(ct)];
        }
        row.base = row.counts[0];
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case Dimension::kCounts: {
      t.columns = {"passage_dependent", "with_clue_word", "no_clue_word", "bad_annotation",
                   "unlabeled"};
      t.show_percent.assign(t.columns.size(), false);
      for (auto d : datasets)
        for (const auto& b : buckets) {
          DistributionRow row{std::string(dataset_name(d)), b,
                              std::vector<std::size_t>(t.columns.size(), 0), 0};
          for (const auto& inst : corpus) {
            if (inst.dataset != d || answer_bucket(inst.gold.size()) != b) continue;
            ++row.base;
            std::vector<std::size_t> tc(6, 0);
            detail::count_type(inst, tc);
            row.counts[0] += tc[detail::kPassage];
            row.counts[1] += tc[detail::kWithClue];
            row.counts[2] += tc[detail::kNoClue];
            row.counts[3] += tc[detail::kBad];
            row.counts[4] += tc[detail::kUnlabeled];
          }
          t.rows.push_back(std::move(row));
        }
      break;
    }
    case Dimension::kClueCounts: {
      for (auto ct : kAllClueTypes) t.columns.emplace_back(clue_type_name(ct));
      t.show_percent.assign(t.columns.size(), false);
      for (auto d : datasets)
        for (const auto& b : buckets) {
          DistributionRow row{std::string(dataset_name(d)), b,
                              std::vector<std::size_t>(t.columns.size(), 0), 0};
          for (const auto& inst : corpus) {
            if (inst.dataset != d || answer_bucket(inst.gold.size()) != b || !inst.taxonomy ||
                !inst.taxonomy->with_clue_words())
              continue;
            ++row.base;
            for (auto ct : inst.taxonomy->clue_types()) ++row.counts[static_cast<std::size_t>(ct)];
          }
          t.rows.push_back(std::move(row));
        }
      break;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Corpus statistics

struct CorpusStats {
  std::size_t instances = 0;
  std::size_t multi_answer_instances = 0;
  double mean_question_len = 0;
  double mean_context_len = 0;
  double mean_answer_len = 0;
  double mean_answers = 0;
  std::optional<double> mean_answers_multi;
  // Token gap from one answer's end to the next answer's start, over
  // adjacent answer pairs of grounded multi-answer instances.
  std::optional<double> mean_answer_distance;
  std::size_t distance_pairs = 0;
  // Multi-answer instances left out of the distance mean for lack of
  // grounded spans.
  std::size_t ungrounded_multi = 0;
};

inline CorpusStats corpus_stats(const std::vector<Instance>& corpus) {
  CorpusStats s;
  s.instances = corpus.size();
  if (corpus.empty()) return s;
  double q = 0, c = 0, a = 0, answers = 0, multi_answers = 0, dist = 0;
  std::size_t spans = 0;
  for (const auto& inst : corpus) {
    q += static_cast<double>(inst.question.size());
    c += static_cast<double>(inst.passage.size());
    answers += static_cast<double>(inst.gold.size());
    for (const auto& sp : inst.gold.spans()) {
      a += static_cast<double>(split_ws(sp.text).size());
      ++spans;
    }
    if (inst.gold.size() < 2) continue;
    ++s.multi_answer_instances;
    multi_answers += static_cast<double>(inst.gold.size());
    std::vector<Range> ranges;
    for (const auto& sp : inst.gold.spans())
      if (sp.tokens) ranges.push_back(*sp.tokens);
    if (ranges.size() != inst.gold.size()) {
      ++s.ungrounded_multi;
      continue;
    }
    std::sort(ranges.begin(), ranges.end(),
              [](const Range& x, const Range& y) { return x.begin < y.begin; });
    for (std::size_t k = 1; k < ranges.size(); ++k) {
      const auto gap = ranges[k].begin > ranges[k - 1].end ? ranges[k].begin - ranges[k - 1].end : 0;
      dist += static_cast<double>(gap);
      ++s.distance_pairs;
    }
  }
  const auto n = static_cast<double>(corpus.size());
  s.mean_question_len = q / n;
  s.mean_context_len = c / n;
  s.mean_answer_len = spans ? a / static_cast<double>(spans) : 0.0;
  s.mean_answers = answers / n;
  if (s.multi_answer_instances)
    s.mean_answers_multi = multi_answers / static_cast<double>(s.multi_answer_instances);
  if (s.distance_pairs) s.mean_answer_distance = dist / static_cast<double>(s.distance_pairs);
  return s;
}

// ---------------------------------------------------------------------------
// Per-type score breakdown

struct StratumReport {
  std::string stratum;
  std::size_t instances = 0;
  ScoreReport report;
};

// Strata: all, passage_dependent, question_dependent, with_clue_word,
// no_clue_word, bad_annotation, unlabeled. Each stratum is micro-averaged on
// its own instances only.
inline std::vector<StratumReport> breakdown_report(const std::vector<Instance>& corpus,
                                                   const std::vector<PredictionSet>& preds,
                                                   LcsUnit unit = LcsUnit::kToken) {
  const auto ev = evaluate(corpus, preds, unit);
  const std::vector<std::string> names = {"all",           "passage_dependent", "question_dependent",
                                          "with_clue_word", "no_clue_word",      "bad_annotation",
                                          "unlabeled"};
  std::vector<std::vector<QuestionScore>> buckets(names.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<std::size_t> tc(6, 0);
    detail::count_type(corpus[i], tc);
    buckets[0].push_back(ev.scores[i]);
    if (tc[detail::kPassage]) buckets[1].push_back(ev.scores[i]);
    if (tc[detail::kQuestion]) buckets[2].push_back(ev.scores[i]);
    if (tc[detail::kWithClue]) buckets[3].push_back(ev.scores[i]);
    if (tc[detail::kNoClue]) buckets[4].push_back(ev.scores[i]);
    if (tc[detail::kBad]) buckets[5].push_back(ev.scores[i]);
    if (tc[detail::kUnlabeled]) buckets[6].push_back(ev.scores[i]);
  }
  std::vector<StratumReport> out;
  for (std::size_t k = 0; k < names.size(); ++k)
    out.push_back({names[k], buckets[k].size(), corpus_report(buckets[k])});
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string with_commas(std::size_t v) {
  auto s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

inline std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline ordered_json to_json(const DistributionTable& t) {
  ordered_json j;
  j["columns"] = t.columns;
  j["rows"] = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json row;
    if (!r.group.empty()) row["group"] = r.group;
    row["label"] = r.label;
    row["base"] = r.base;
    ordered_json cells;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      ordered_json cell{{"count", r.counts[c]}};
      if (t.show_percent[c]) cell["percent"] = r.percent(c);
      cells[t.columns[c]] = std::move(cell);
    }
    row["cells"] = std::move(cells);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

inline std::string to_csv(const DistributionTable& t) {
  std::ostringstream out;
  out << "group,label,base";
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    out << "," << t.columns[c];
    if (t.show_percent[c]) out << "," << t.columns[c] << "_pct";
  }
  out << "\n";
  for (const auto& r : t.rows) {
    out << r.group << "," << r.label << "," << r.base;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out << "," << r.counts[c];
      if (t.show_percent[c]) out << "," << fmt1(r.percent(c));
    }
    out << "\n";
  }
  return out.str();
}

// Aligned text table, e.g. "826 (26.4%)" cells for percentage columns.
inline std::string to_text(const DistributionTable& t) {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"Dataset"};
  if (t.dimension == Dimension::kCounts || t.dimension == Dimension::kClueCounts) header.push_back("#Ans");
  for (const auto& c : t.columns) header.push_back(c);
  grid.push_back(header);
  for (const auto& r : t.rows) {
    std::vector<std::string> line;
    if (header.size() > t.columns.size() + 1) {
      line.push_back(r.group);
      line.push_back(r.label);
    } else {
      line.push_back(r.label);
    }
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      auto cell = with_commas(r.counts[c]);
      if (t.show_percent[c]) cell += " (" + fmt1(r.percent(c)) + "%)";
      line.push_back(std::move(cell));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::ostringstream out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      const auto& cell = grid[r][c];
      const auto padding = std::string(width[c] - cell.size(), ' ');
      if (c > 0) out << " | ";
      // Labels left-aligned, numbers right-aligned.
      const bool is_label = c == 0 || (header.size() > t.columns.size() + 1 && c == 1);
      out << (is_label ? cell + padding : padding + cell);
    }
    out << "\n";
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) out << (c ? "-+-" : "") << std::string(width[c], '-');
      out << "\n";
    }
  }
  return out.str();
}

inline ordered_json to_json(const CorpusStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); };
  ordered_json j;
  j["instances"] = s.instances;
  j["multi_answer_instances"] = s.multi_answer_instances;
  j["mean_question_len"] = s.mean_question_len;
  j["mean_context_len"] = s.mean_context_len;
  j["mean_answer_len"] = s.mean_answer_len;
  j["mean_answers"] = s.mean_answers;
  j["mean_answers_multi"] = opt(s.mean_answers_multi);
  j["mean_answer_distance"] = opt(s.mean_answer_distance);
  j["distance_pairs"] = s.distance_pairs;
  j["ungrounded_multi"] = s.ungrounded_multi;
  return j;
}

inline std::string to_text(const CorpusStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt1(*v) : std::string("n/a"); };
  std::ostringstream out;
  out << "Instances                " << with_commas(s.instances) << "\n";
  out << "Length of Question       " << fmt1(s.mean_question_len) << "\n";
  out << "Length of Context        " << fmt1(s.mean_context_len) << "\n";
  out << "Length of Answer         " << fmt1(s.mean_answer_len) << "\n";
  out << "#Answers                 " << fmt1(s.mean_answers) << "\n";
  out << "#Answers (Multi)         " << opt(s.mean_answers_multi) << "\n";
  out << "Distance Between Ans.    " << opt(s.mean_answer_distance) << "\n";
  return out.str();
}

inline std::string to_csv(const CorpusStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  std::ostringstream out;
  out << "instances,mean_question_len,mean_context_len,mean_answer_len,mean_answers,"
         "mean_answers_multi,mean_answer_distance\n";
  out << s.instances << "," << s.mean_question_len << "," << s.mean_context_len << ","
      << s.mean_answer_len << "," << s.mean_answers << "," << opt(s.mean_answers_multi) << ","
      << opt(s.mean_answer_distance) << "\n";
  return out.str();
}

inline ordered_json to_json(const std::vector<StratumReport>& rows) {
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    auto row = report_to_json(r.report);
    ordered_json out;
    out["stratum"] = r.stratum;
    out["n"] = r.instances;
    if (r.instances == 0) out["empty"] = true;
    for (const auto& [k, v] : row.items()) out[k] = v;
    j.push_back(std::move(out));
  }
  return j;
}

inline std::string to_text(const std::vector<StratumReport>& rows) {
  std::vector<std::pair<std::string, ScoreReport>> table;
  for (const auto& r : rows)
    table.emplace_back(r.stratum + " (n=" + std::to_string(r.instances) + ")", r.report);
  return render_score_table(table);
}

inline std::string to_csv(const std::vector<StratumReport>& rows) {
  std::ostringstream out;
  out << "stratum,n,em_p,em_r,em_f1,pm_p,pm_r,pm_f1\n";
  for (const auto& r : rows)
    out << r.stratum << "," << r.instances << "," << fmt2(r.report.em.precision) << ","
        << fmt2(r.report.em.recall) << "," << fmt2(r.report.em.f1) << ","
        << fmt2(r.report.pm.precision) << "," << fmt2(r.report.pm.recall) << ","
        << fmt2(r.report.pm.f1) << "\n";
  return out.str();
}

}  // namespace mamrc

#endif  // MAMRC_REPORTING_HPP_
