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

#include <gtest/gtest.h>

#include <thread>

#include "annotation_sim.hpp"
#include "mamrc/annotation_server.hpp"

namespace mamrc {
namespace {

using testing::plain_corpus;

const TaxonomyLabel kP = TaxonomyLabel::passage_dependent();
const TaxonomyLabel kQ{TaxonomyKind::kQuestionDependent, {}};
const TaxonomyLabel kBad = TaxonomyLabel::bad_annotation();

TEST(Service, FreshInstanceIsOffered) {
  AnnotationService svc(plain_corpus(3));
  const auto t = svc.next_task("a", Stage::kFull);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->round, Round::kFirst);
  // The same open task comes back until it is submitted.
  EXPECT_EQ(svc.next_task("a", Stage::kFull)->instance_id, t->instance_id);
  EXPECT_EQ(svc.log_size(), 1u);
  EXPECT_FALSE(svc.next_task("a", Stage::kVerifyRecalled));
  EXPECT_THROW(svc.next_task("", Stage::kFull), InvalidArgument);
}

TEST(Service, AgreementFinalizesAndEmptiesQueue) {
  AnnotationService svc(plain_corpus(1));
  const auto a = svc.next_task("a", Stage::kFull);
  const auto b = svc.next_task("b", Stage::kFull);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(b->round, Round::kSecond);
  EXPECT_FALSE(svc.next_task("c", Stage::kFull));  // two initial annotators already
  EXPECT_FALSE(svc.submit_label("a", a->instance_id, kP).finalized);
  const auto r = svc.submit_label("b", b->instance_id, kP);
  EXPECT_TRUE(r.finalized);
  EXPECT_EQ(svc.final_label(a->instance_id), kP);
  EXPECT_FALSE(svc.next_task("c", Stage::kFull));
  EXPECT_FALSE(svc.next_task("c", Stage::kAdjudication));
  const auto stats = svc.agreement_stats();
  EXPECT_EQ(stats.kappa, 1.0);
  EXPECT_EQ(stats.label_counts.at("passage_dependent"), 1u);
}

TEST(Service, ConflictGoesToAdjudicator) {
  AnnotationService svc(plain_corpus(1));
  const auto id = svc.next_task("a", Stage::kFull)->instance_id;
  svc.next_task("b", Stage::kFull);
  svc.submit_label("a", id, kP);
  const auto r = svc.submit_label("b", id, kQ);
  EXPECT_TRUE(r.conflict);
  EXPECT_FALSE(r.finalized);
  ASSERT_EQ(svc.conflicts().size(), 1u);
  EXPECT_FALSE(svc.next_task("a", Stage::kAdjudication));  // not their own conflict
  const auto t = svc.next_task("c", Stage::kAdjudication);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->round, Round::kAdjudication);
  EXPECT_EQ(svc.task_payload(*t)["records"].size(), 2u);
  EXPECT_FALSE(svc.next_task("d", Stage::kAdjudication));
  EXPECT_TRUE(svc.submit_label("c", id, kQ).finalized);
  EXPECT_EQ(svc.final_label(id), kQ);
  EXPECT_TRUE(svc.conflicts().empty());
}

TEST(Service, BadAnnotationFinalizesImmediately) {
  AnnotationService svc(plain_corpus(1));
  const auto id = svc.next_task("a", Stage::kFull)->instance_id;
  EXPECT_TRUE(svc.submit_label("a", id, kBad).finalized);
  EXPECT_EQ(svc.final_label(id)->kind, TaxonomyKind::kBadAnnotation);
  EXPECT_FALSE(svc.next_task("b", Stage::kFull));
}

TEST(Service, SubmissionErrors) {
  AnnotationService svc(plain_corpus(2));
  const auto id = svc.next_task("a", Stage::kFull)->instance_id;
  EXPECT_EQ(svc.submit_label("a", "nope", kP).status, 400);
  EXPECT_EQ(svc.submit_label("z", id, kP).status, 403);
  TaxonomyLabel clued = kP;
  clued.clues.push_back({"Who", ClueType::kOtherSemantics, std::nullopt});
  EXPECT_EQ(svc.submit_label("a", id, clued).status, 400);
  EXPECT_EQ(svc.submit_label("a", id, kP).status, 200);
  EXPECT_EQ(svc.submit_label("a", id, kP).status, 409);
}

TEST(Service, RecalledQuestionsUseTheVerifyQueue) {
  std::vector<Instance> corpus = plain_corpus(1);
  corpus.push_back(make_instance("c", Dataset::kOther, "Which two players scored?", "Ann and Bob scored .", {"Ann", "Bob"}));
  AnnotationService svc(corpus);
  const auto t = svc.next_task("a", Stage::kVerifyRecalled);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->instance_id, "c");
  const auto payload = svc.task_payload(*t);
  EXPECT_FALSE(payload.contains("passage"));
  EXPECT_EQ(payload["detected_clues"][0]["text"], "two");
  EXPECT_EQ(payload["detected_clues"][0]["type"], "cardinal");
  EXPECT_EQ(svc.next_task("a", Stage::kFull)->instance_id, "s0");
}

TEST(Service, InsufficientDataWithoutPairs) {
  AnnotationService svc(plain_corpus(2));
  const auto s = svc.agreement_stats();
  EXPECT_FALSE(s.kappa);
  EXPECT_EQ(stats_to_json(s)["status"], "insufficient data");
  EXPECT_EQ(s.open_full, 2u);
}

TEST(Service, PlannedSessionReproducesFixtureKappa) {
  const auto plan = testing::kappa_fixture();
  AnnotationService svc(plain_corpus(plan.size()), {}, 99);
  testing::run_planned_session(svc, plan);
  const auto s = svc.agreement_stats();
  EXPECT_EQ(s.pairs, 20u);
  ASSERT_TRUE(s.kappa);
  EXPECT_NEAR(*s.kappa, 36.0 / 61.0, 1e-9);
}

TEST(Service, CrashReplay) {
  const auto dir = testing::scratch_dir("replay");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = testing::crash_replay_trial(seed, 400, (dir / "log.jsonl").string());
    EXPECT_TRUE(r.ok) << "seed " << seed << ": " << r.detail;
    EXPECT_GT(r.restarts, 0u);
  }
  std::filesystem::remove_all(dir);
}

TEST(Service, CorruptLogIsFatalWithLine) {
  const auto dir = testing::scratch_dir("corrupt");
  const auto log = (dir / "log.jsonl").string();
  testing::write_file(log, R"({"event":"assign","annotator":"a","instance":"s0","stage":"full","round":"first","ts":1})"
                           "\nnot json\n");
  try {
    AnnotationService svc(plain_corpus(1), log);
    ADD_FAILURE();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  testing::write_file(log, R"({"event":"label","annotator":"a","instance":"s0","round":"first","label":{"label":"bad_annotation"},"ts":1})"
                           "\n");
  EXPECT_THROW(AnnotationService(plain_corpus(1), log), ParseError);
  std::filesystem::remove_all(dir);
}

class Routes : public ::testing::Test {
 protected:
  void SetUp() override {
    install_annotation_routes(server_, svc_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  json get(const std::string& path, int* status = nullptr) {
    httplib::Client cli("127.0.0.1", port_);
    const auto res = cli.Get(path);
    if (status) *status = res->status;
    return json::parse(res->body);
  }
  json post(const json& body, int* status) {
    httplib::Client cli("127.0.0.1", port_);
    const auto res = cli.Post("/api/label", body.dump(), "application/json");
    *status = res->status;
    return json::parse(res->body);
  }

  AnnotationService svc_{plain_corpus(1)};
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(Routes, ConflictingSessionOverHttp) {
  int status = 0;
  get("/api/task", &status);
  EXPECT_EQ(status, 400);
  get("/api/task?annotator=a&stage=bogus", &status);
  EXPECT_EQ(status, 400);

  const auto task = get("/api/task?annotator=a");
  ASSERT_FALSE(task["task"].is_null());
  EXPECT_FALSE(task["task"].contains("passage"));
  const auto id = task["task"]["instance_id"].get<std::string>();
  get("/api/task?annotator=b&stage=full");

  auto r = post({{"annotator", "a"}, {"instance_id", id}, {"label", {{"label", "passage_dependent"}}}}, &status);
  EXPECT_EQ(status, 200);
  EXPECT_EQ(r["status"], "ok");
  post({{"annotator", "a"}, {"instance_id", id}, {"label", {{"label", "passage_dependent"}}}}, &status);
  EXPECT_EQ(status, 409);
  post({{"annotator", "x"}, {"instance_id", id}, {"label", {{"label", "passage_dependent"}}}}, &status);
  EXPECT_EQ(status, 403);
  post({{"annotator", "b"}, {"instance_id", id}, {"label", {{"label", "nonsense"}}}}, &status);
  EXPECT_EQ(status, 400);
  r = post({{"annotator", "b"},
            {"instance_id", id},
            {"label", {{"label", "question_dependent"}, {"clue", {{"spans", {"Who"}}, {"types", {"other_semantics"}}}}}}},
           &status);
  EXPECT_EQ(status, 200);
  EXPECT_TRUE(r["conflict"].get<bool>());

  const auto conflicts = get("/api/conflicts");
  ASSERT_EQ(conflicts["conflicts"].size(), 1u);
  EXPECT_EQ(conflicts["conflicts"][0]["records"].size(), 2u);
  const auto stats = get("/api/stats");
  EXPECT_EQ(stats["status"], "ok");
  EXPECT_EQ(stats["queues"]["adjudication"], 1);
  EXPECT_EQ(stats["kappa"].get<double>(), 0.0);
  const auto adj = get("/api/task?annotator=c&stage=adjudication");
  EXPECT_EQ(adj["task"]["records"].size(), 2u);
}

// Every key the API document marks required is present in live responses.
void expect_required(const json& schema, const json& value, const std::string& where) {
  ASSERT_TRUE(value.is_object()) << where;
  for (const auto& key : schema.at("required")) EXPECT_TRUE(value.contains(key.get<std::string>())) << where << ": " << key;
}

TEST_F(Routes, ResponsesMatchApiDocument) {
  const auto api = json::parse(testing::read_file(std::string(MAMRC_SOURCE_DIR) + "/api/annotation_api.json"));
  const auto& routes = api.at("routes");
  const auto& defs = api.at("$defs");

  const auto task = get("/api/task?annotator=a");
  expect_required(routes.at("GET /api/task").at("200"), task, "task");
  expect_required(defs.at("task"), task["task"], "task.task");
  get("/api/task?annotator=b");
  int status = 0;
  const auto r = post({{"annotator", "a"}, {"instance_id", task["task"]["instance_id"]},
                       {"label", {{"label", "passage_dependent"}}}},
                      &status);
  expect_required(defs.at("submit_result"), r, "label");
  expect_required(routes.at("GET /api/stats").at("200"), get("/api/stats"), "stats");
  expect_required(routes.at("GET /api/conflicts").at("200"), get("/api/conflicts"), "conflicts");
}

}  // namespace
}  // namespace mamrc
