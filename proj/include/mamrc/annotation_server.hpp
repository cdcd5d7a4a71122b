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

// JSON API for the annotation workbench. Payloads are documented in
// api/annotation_api.json.
//
//   GET  /api/task?annotator=ID&stage=verify_recalled|full|adjudication
//   POST /api/label      {"annotator", "instance_id", "label": {"label", "clue"?}}
//   GET  /api/stats
//   GET  /api/conflicts

#ifndef MAMRC_ANNOTATION_SERVER_HPP_
#define MAMRC_ANNOTATION_SERVER_HPP_

#include <string>

#include "httplib.h"
#include "mamrc/annotation_service.hpp"

namespace mamrc {

namespace detail {

inline void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, ordered_json{{"error", message}});
}

}  // namespace detail

// Registers the API routes on `server`. `static_dir`, when nonempty, is
// mounted at "/" for the UI bundle.
inline void install_annotation_routes(httplib::Server& server, AnnotationService& service,
                                      const std::string& static_dir = {}) {
  server.Get("/api/task", [&service](const httplib::Request& req, httplib::Response& res) {
    const auto annotator = req.get_param_value("annotator");
    if (annotator.empty()) return detail::send_error(res, 400, "missing query parameter 'annotator'");
    const auto stage_param = req.has_param("stage") ? req.get_param_value("stage") : "full";
    const auto stage = parse_stage(stage_param);
    if (!stage) return detail::send_error(res, 400, "unknown stage '" + stage_param + "'");
    const auto task = service.next_task(annotator, *stage);
    if (!task) return detail::send_json(res, 200, ordered_json{{"task", nullptr}});
    detail::send_json(res, 200, ordered_json{{"task", service.task_payload(*task)}});
  });

  server.Post("/api/label", [&service](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return detail::send_error(res, 400, std::string("malformed JSON body: ") + e.what());
    }
    if (!body.is_object() || !body.contains("annotator") || !body["annotator"].is_string() ||
        !body.contains("instance_id") || !body["instance_id"].is_string() || !body.contains("label"))
      return detail::send_error(res, 400, "body needs string 'annotator', 'instance_id' and 'label'");
    TaxonomyLabel label;
    try {
      label = label_from_json(body["label"]);
    } catch (const Error& e) {
      return detail::send_error(res, 400, e.what());
    } catch (const json::exception& e) {
      return detail::send_error(res, 400, e.what());
    }
    const auto r = service.submit_label(body["annotator"].get<std::string>(),
                                        body["instance_id"].get<std::string>(), std::move(label));
    if (r.status != 200 && r.status != 409) return detail::send_error(res, r.status, r.message);
    ordered_json out;
    out["status"] = r.status == 200 ? "ok" : "duplicate";
    out["message"] = r.message;
    out["finalized"] = r.finalized;
    out["conflict"] = r.conflict;
    detail::send_json(res, r.status, out);
  });

  server.Get("/api/stats", [&service](const httplib::Request&, httplib::Response& res) {
    detail::send_json(res, 200, stats_to_json(service.agreement_stats()));
  });

  server.Get("/api/conflicts", [&service](const httplib::Request&, httplib::Response& res) {
    ordered_json list = ordered_json::array();
    for (const auto& [id, records] : service.conflicts()) {
      ordered_json recs = ordered_json::array();
      for (const auto& r : records)
        recs.push_back({{"annotator", r.annotator_id}, {"round", round_name(r.round)},
                        {"label", label_to_json(r.label)}});
      list.push_back({{"instance_id", id}, {"records", std::move(recs)}});
    }
    detail::send_json(res, 200, ordered_json{{"conflicts", std::move(list)}});
  });

  if (!static_dir.empty() && !server.set_mount_point("/", static_dir))
    throw InvalidArgument("static directory '" + static_dir + "' does not exist");
}

}  // namespace mamrc

#endif  // MAMRC_ANNOTATION_SERVER_HPP_
