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

// Stand-in model process speaking the wire protocol, backed by the oracle or
// degenerate mock. Reads requests on stdin (one JSON object per line) or, with
// --port, serves POST /infer. Fault-injection flags exist for transport tests.

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "mamrc/ingest.hpp"
#include "mamrc/mock_clients.hpp"
#include "mamrc/model_client.hpp"

namespace {

std::string answer(mamrc::ModelClient& client, const std::string& line) {
  std::string id;
  try {
    const auto req = mamrc::parse_request(line);
    id = req.request_id;
    return mamrc::serialize_response(client.query(req));
  } catch (const std::exception& e) {
    return mamrc::serialize_error(id, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock model server for transport tests.", "mock_model_server"};
  std::string corpus_path, mode = "oracle";
  int port = -1, delay_ms = 0, exit_after = -1;
  bool garbage = false, wrong_id = false;
  app.add_option("--corpus", corpus_path, "Corpus (unified JSONL) for the oracle");
  app.add_option("--mode", mode, "Backing mock")->check(CLI::IsMember({"oracle", "degenerate"}));
  app.add_option("--port", port, "Serve HTTP on this port instead of stdin/stdout");
  app.add_option("--delay-ms", delay_ms, "Sleep before each reply");
  app.add_option("--exit-after", exit_after, "Exit after this many requests");
  app.add_flag("--garbage", garbage, "Reply with a non-JSON line");
  app.add_flag("--wrong-id", wrong_id, "Echo a different request id");
  CLI11_PARSE(app, argc, argv);

  std::vector<mamrc::Instance> corpus;
  if (!corpus_path.empty()) {
    std::ifstream in(corpus_path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    corpus = mamrc::load(mamrc::SourceFormat::kUnified, bytes).instances;
  }
  auto client = mamrc::make_mock(mode == "oracle" ? mamrc::MockKind::kOracle : mamrc::MockKind::kDegenerate,
                                 std::move(corpus));

  auto reply = [&](const std::string& line) {
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    if (garbage) return std::string("this is not json");
    auto out = answer(*client, line);
    if (wrong_id) {
      auto j = mamrc::ordered_json::parse(out);
      j["id"] = "not-" + j.value("id", std::string());
      out = j.dump();
    }
    return out;
  };

  if (port >= 0) {
    httplib::Server server;
    server.Post("/infer", [&](const httplib::Request& req, httplib::Response& res) {
      res.set_content(reply(req.body), "application/json");
    });
    std::cerr << "mock_model_server: listening on 127.0.0.1:" << port << std::endl;
    return server.listen("127.0.0.1", port) ? 0 : 1;
  }

  std::string line;
  int served = 0;
  while (std::getline(std::cin, line)) {
    if (exit_after >= 0 && served >= exit_after) return 3;
    std::cout << reply(line) << "\n" << std::flush;
    ++served;
  }
  return 0;
}
