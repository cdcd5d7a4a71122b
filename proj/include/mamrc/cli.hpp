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

// The `mamrc` command line. Exit codes: 0 success, 1 data error, 2 usage
// error. Data goes to --out/standard output, diagnostics to standard error.

#ifndef MAMRC_CLI_HPP_
#define MAMRC_CLI_HPP_

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mamrc/annotation_server.hpp"
#include "mamrc/annotation_service.hpp"
#include "mamrc/core.hpp"
#include "mamrc/ensemble.hpp"
#include "mamrc/ingest.hpp"
#include "mamrc/metrics.hpp"
#include "mamrc/mock_clients.hpp"
#include "mamrc/paradigms.hpp"
#include "mamrc/reporting.hpp"
#include "mamrc/taxonomy.hpp"
#include "mamrc/transports.hpp"

namespace mamrc::cli {

// Data problem tied to an input file; reported as "file:line: message".
class DataError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open for reading");
  return {std::istreambuf_iterator<char>(in), {}};
}

inline void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << data;
  if (!f) throw DataError(path + ": cannot write");
}

// Runs `fn` with the file name prefixed to any parse error.
template <typename Fn>
auto with_file(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw DataError(path + ":" + std::to_string(e.line()) + ": " + e.what());
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline std::vector<Instance> read_corpus(const std::string& path, const std::string& annotations = {}) {
  auto result = with_file(path, [&] { return load(SourceFormat::kUnified, read_input(path)); });
  if (result.report.skipped_malformed) {
    std::string why = result.report.notes.empty() ? "" : " (" + result.report.notes.front() + ")";
    throw DataError(path + ": " + std::to_string(result.report.skipped_malformed) +
                    " malformed record(s)" + why);
  }
  if (!annotations.empty()) {
    const auto labels = with_file(annotations, [&] { return load_annotations(read_input(annotations)); });
    const auto unknown = attach_annotations(&result.instances, labels);
    if (!unknown.empty())
      throw DataError(annotations + ": annotation for unknown instance '" + unknown.front() + "'");
  }
  return std::move(result.instances);
}

inline std::vector<PredictionSet> read_predictions(const std::string& path) {
  return with_file(path, [&] { return load_predictions(read_input(path)); });
}

inline ordered_json clues_to_json(const std::vector<Clue>& clues) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : clues) {
    ordered_json j;
    j["text"] = c.text;
    j["type"] = clue_type_name(c.type);
    if (c.tokens) j["tokens"] = {c.tokens->begin, c.tokens->end};
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::unique_ptr<ModelClient> make_client(const std::string& spec,
                                                const std::vector<Instance>& corpus,
                                                TransportOptions opts) {
  if (spec == "mock:oracle") return make_mock(MockKind::kOracle, corpus);
  if (spec == "mock:degenerate") return make_mock(MockKind::kDegenerate);
  const std::string scripted = "mock:scripted=";
  if (spec.rfind(scripted, 0) == 0) {
    const auto path = spec.substr(scripted.size());
    const auto fixtures = with_file(path, [&] { return parse_json_document(read_input(path), path); });
    return make_mock(MockKind::kScripted, {}, fixtures);
  }
  return connect_endpoint(spec, opts);
}

inline unsigned default_jobs() {
  const auto n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Maps fn over [0, n) on `jobs` threads; results land in index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, Fn fn) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) out[i] = fn(i);
  };
  const auto threads = std::min<std::size_t>(std::max(1u, jobs), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace detail

// Parses and runs one command line (args exclude the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-answer reading comprehension toolkit.", "mamrc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // ingest
  std::string in_format = "unified", in_path, out_path, ann_path;
  auto* ingest = app.add_subcommand("ingest", "Convert a dataset file to unified JSONL");
  ingest->add_option("--format", in_format, "Source format")
      ->check(CLI::IsMember({"drop", "quoref", "multispanqa", "unified"}))
      ->capture_default_str();
  ingest->add_option("--input", in_path, "Input file ('-' for standard input)")->required();
  ingest->add_option("--out", out_path, "Output file (default: standard output)");
  ingest->add_option("--annotations", ann_path, "Taxonomy annotation JSONL to attach");

  // evaluate
  std::string gold_path, pred_path, by_type, lcs = "token";
  bool json_only = false, text_only = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions with EM and PM");
  evaluate_cmd->add_option("--gold", gold_path, "Gold corpus (unified JSONL)")->required();
  evaluate_cmd->add_option("--pred", pred_path, "Predictions JSONL")->required();
  evaluate_cmd->add_option("--by-type", by_type, "Annotation JSONL; adds a per-type breakdown");
  evaluate_cmd->add_option("--lcs", lcs, "Partial-match LCS unit")
      ->check(CLI::IsMember({"token", "char"}))
      ->capture_default_str();
  auto* json_flag = evaluate_cmd->add_flag("--json", json_only, "Emit only the JSON report");
  evaluate_cmd->add_flag("--text", text_only, "Emit only the text table")->excludes(json_flag);
  evaluate_cmd->add_option("--out", out_path, "Output file (default: standard output)");

  // classify
  std::string corpus_path, lexicon_path;
  auto* classify = app.add_subcommand("classify", "Detect clue words in questions");
  classify->add_option("--corpus", corpus_path, "Corpus (unified JSONL)")->required();
  classify->add_option("--lexicon", lexicon_path, "Clue lexicon TSV (default: built-in)");
  classify->add_option("--out", out_path, "Output file (default: standard output)");

  // decode
  std::string paradigm = "tagging", endpoint, nps = "none", backend = "extractor";
  double threshold = 0.5;
  int k_max = kMaxAnswers;
  unsigned jobs = detail::default_jobs();
  long timeout_ms = 30000;
  auto* decode = app.add_subcommand("decode", "Decode model outputs into predictions");
  decode->add_option("--corpus", corpus_path, "Corpus (unified JSONL)")->required();
  decode->add_option("--paradigm", paradigm, "Decoding paradigm")
      ->check(CLI::IsMember({"tagging", "numpred", "iterative", "generation"}))
      ->capture_default_str();
  decode->add_option("--model-endpoint", endpoint,
                     "http://HOST:PORT, exec:COMMAND, mock:oracle, mock:degenerate or "
                     "mock:scripted=FILE")
      ->required();
  decode->add_option("--threshold", threshold, "Tagging probability threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  decode->add_option("--k-max", k_max, "Largest answer count")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  decode->add_option("--nps", nps, "Answer-count sentences for generation")
      ->check(CLI::IsMember({"none", "multitask", "pipeline"}))
      ->capture_default_str();
  decode->add_option("--iterative-backend", backend, "Model queried by the iterative paradigm")
      ->check(CLI::IsMember({"extractor", "generator"}))
      ->capture_default_str();
  decode->add_option("--jobs", jobs, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  decode->add_option("--timeout-ms", timeout_ms, "Per-request model timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  decode->add_option("--out", out_path, "Output file (default: standard output)");

  // ensemble
  std::vector<std::string> pred_paths;
  auto* ensemble = app.add_subcommand("ensemble", "Vote over several prediction files");
  ensemble->add_option("--pred", pred_paths, "Predictions JSONL (repeat, at least two)")
      ->required()
      ->expected(1, -1)
      ->allow_extra_args(false);
  ensemble->add_option("--out", out_path, "Output file (default: standard output)");

  // report
  std::string what, report_format = "text";
  auto* report = app.add_subcommand("report", "Corpus distributions and statistics");
  report->add_option("--corpus", corpus_path, "Corpus (unified JSONL)")->required();
  report->add_option("--what", what, "Analysis to emit")
      ->check(CLI::IsMember({"types", "clues", "counts", "clue-counts", "stats", "breakdown"}))
      ->required();
  report->add_option("--annotations", ann_path, "Taxonomy annotation JSONL to attach");
  report->add_option("--pred", pred_path, "Predictions JSONL (breakdown only)");
  report->add_option("--format", report_format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  report->add_option("--out", out_path, "Output file (default: standard output)");

  // annotate-serve
  std::string log_path, host = "127.0.0.1", static_dir;
  int port = 8080;
  std::uint64_t seed = 0;
  auto* serve = app.add_subcommand("annotate-serve", "Serve the annotation workbench API");
  serve->add_option("--corpus", corpus_path, "Corpus (unified JSONL)")->required();
  serve->add_option("--log", log_path, "Append-only event log (replayed on start)")->required();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--seed", seed, "Task assignment seed")->capture_default_str();
  serve->add_option("--lexicon", lexicon_path, "Clue lexicon TSV (default: built-in)");
  serve->add_option("--static", static_dir, "UI bundle directory served at /");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (*report && !pred_path.empty() && what != "breakdown") {
    err << "mamrc report: --pred is only valid with --what breakdown\n";
    return 2;
  }
  if (*report && what == "breakdown" && pred_path.empty()) {
    err << "mamrc report: --what breakdown requires --pred\n";
    return 2;
  }
  if (*ensemble && pred_paths.size() < 2) {
    err << "mamrc ensemble: --pred must be given at least twice\n";
    return 2;
  }

  try {
    if (*ingest) {
      const auto format = *parse_source_format(in_format);
      auto result = detail::with_file(in_path, [&] { return load(format, detail::read_input(in_path)); });
      if (!ann_path.empty()) {
        const auto labels =
            detail::with_file(ann_path, [&] { return load_annotations(detail::read_input(ann_path)); });
        for (const auto& id : attach_annotations(&result.instances, labels))
          err << ann_path << ": no instance with id '" << id << "'\n";
      }
      detail::write_output(out_path, export_corpus(result.instances), out);
      const auto& r = result.report;
      ordered_json summary{{"source_format", source_format_name(r.source_format)},
                           {"loaded", r.loaded},
                           {"skipped_non_span", r.skipped_non_span},
                           {"skipped_malformed", r.skipped_malformed},
                           {"duplicate_spans_dropped", r.duplicate_spans_dropped}};
      err << summary.dump() << "\n";
      for (const auto& note : r.notes) err << in_path << ": " << note << "\n";
      return 0;
    }

    if (*evaluate_cmd) {
      const auto corpus = detail::read_corpus(gold_path, by_type);
      const auto preds = detail::read_predictions(pred_path);
      const auto unit = lcs == "char" ? LcsUnit::kChar : LcsUnit::kToken;
      const auto ev = evaluate(corpus, preds, unit);
      for (const auto& id : ev.unknown_ids)
        err << pred_path << ": prediction for unknown instance '" << id << "' ignored\n";
      const auto overall = corpus_report(ev.scores);
      std::string data;
      ordered_json j;
      j["overall"] = report_to_json(overall);
      std::vector<std::pair<std::string, ScoreReport>> rows = {{"Overall", overall}};
      if (!by_type.empty()) {
        const auto strata = breakdown_report(corpus, preds, unit);
        j["by_type"] = to_json(strata);
        for (const auto& s : strata)
          if (s.stratum != "all") rows.emplace_back(s.stratum + " (n=" + std::to_string(s.instances) + ")", s.report);
      }
      if (!text_only) data += j.dump(2) + "\n";
      if (!json_only) data += render_score_table(rows);
      detail::write_output(out_path, data, out);
      return 0;
    }

    if (*classify) {
      const auto corpus = detail::read_corpus(corpus_path);
      Lexicon custom;
      if (!lexicon_path.empty())
        custom = detail::with_file(lexicon_path, [&] { return Lexicon::parse(detail::read_input(lexicon_path)); });
      const Lexicon& lex = lexicon_path.empty() ? Lexicon::builtin() : custom;
      std::string data;
      for (const auto& inst : corpus) {
        ordered_json j;
        j["id"] = inst.id;
        j["question"] = inst.question.raw();
        j["clues"] = detail::clues_to_json(hits_to_clues(inst.question, detect_clue_words(inst.question, lex)));
        data += dump_line(j);
      }
      detail::write_output(out_path, data, out);
      return 0;
    }

    if (*decode) {
      const auto corpus = detail::read_corpus(corpus_path);
      TransportOptions topts;
      topts.timeout = std::chrono::milliseconds(timeout_ms);
      topts.max_in_flight = std::max<std::size_t>(1, jobs);
      auto client = detail::make_client(endpoint, corpus, topts);
      DecodeOptions opts;
      opts.threshold = threshold;
      opts.k_max = k_max;
      opts.nps = nps == "pipeline" ? GenerationNps::kPipeline
                                   : nps == "multitask" ? GenerationNps::kMultitask : GenerationNps::kNone;
      opts.iterative_backend =
          backend == "generator" ? IterativeBackend::kGenerator : IterativeBackend::kExtractor;
      const auto par = *parse_paradigm(paradigm);
      const auto results = detail::parallel_map<DecodeResult>(
          corpus.size(), jobs, [&](std::size_t i) { return decode_instance(*client, corpus[i], par, opts); });
      std::vector<PredictionSet> preds;
      std::size_t failed = 0;
      for (const auto& r : results) {
        preds.push_back(r.predictions);
        if (r.aborted) {
          ++failed;
          err << "decode: instance '" << r.predictions.instance_id << "': " << r.error << "\n";
        }
      }
      detail::write_output(out_path, export_predictions(preds), out);
      return failed ? 1 : 0;
    }

    if (*ensemble) {
      std::vector<std::vector<PredictionSet>> files;
      for (const auto& p : pred_paths) files.push_back(detail::read_predictions(p));
      // Instances in order of first appearance; a file without an instance
      // contributes an empty set.
      std::vector<std::string> ids;
      std::set<std::string> seen;
      for (const auto& f : files)
        for (const auto& s : f)
          if (seen.insert(s.instance_id).second) ids.push_back(s.instance_id);
      std::vector<PredictionSet> voted;
      for (const auto& id : ids) {
        std::vector<PredictionSet> sets;
        for (const auto& f : files) {
          const auto it = std::find_if(f.begin(), f.end(), [&](const PredictionSet& s) { return s.instance_id == id; });
          sets.push_back(it == f.end() ? PredictionSet{id, {}, {}} : *it);
        }
        voted.push_back(vote(sets, "ensemble"));
      }
      detail::write_output(out_path, export_predictions(voted), out);
      return 0;
    }

    if (*report) {
      const auto corpus = detail::read_corpus(corpus_path, ann_path);
      std::string data;
      if (what == "stats") {
        const auto s = corpus_stats(corpus);
        data = report_format == "json" ? to_json(s).dump(2) + "\n"
               : report_format == "csv" ? to_csv(s) : to_text(s);
      } else if (what == "breakdown") {
        const auto strata = breakdown_report(corpus, detail::read_predictions(pred_path));
        data = report_format == "json" ? to_json(strata).dump(2) + "\n"
               : report_format == "csv" ? to_csv(strata) : to_text(strata);
      } else {
        const auto dim = what == "types" ? Dimension::kTypes
                         : what == "clues" ? Dimension::kClues
                         : what == "counts" ? Dimension::kCounts : Dimension::kClueCounts;
        const auto t = distribution(corpus, dim);
        data = report_format == "json" ? to_json(t).dump(2) + "\n"
               : report_format == "csv" ? to_csv(t) : to_text(t);
      }
      detail::write_output(out_path, data, out);
      return 0;
    }

    if (*serve) {
      const auto corpus = detail::read_corpus(corpus_path);
      Lexicon custom;
      if (!lexicon_path.empty())
        custom = detail::with_file(lexicon_path, [&] { return Lexicon::parse(detail::read_input(lexicon_path)); });
      const Lexicon& lex = lexicon_path.empty() ? Lexicon::builtin() : custom;
      auto service = detail::with_file(log_path, [&] {
        return std::make_unique<AnnotationService>(corpus, log_path, seed, lex);
      });
      httplib::Server server;
      install_annotation_routes(server, *service, static_dir);
      err << "annotate-serve: listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) throw DataError("cannot listen on " + host + ":" + std::to_string(port));
      return 0;
    }
  } catch (const DataError& e) {
    err << "mamrc: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    err << "mamrc: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "mamrc: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace mamrc::cli

#endif  // MAMRC_CLI_HPP_
