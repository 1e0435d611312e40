#pragma once

// JSON-over-HTTP front end for AnnotationService.
//
//   GET  /healthz
//   GET  /batches/{id}/next?annotator=A
//   POST /batches                      {"id", "pair_ids", "required_annotators"?}
//   GET  /batches/{id}/agreement
//   POST /annotations                  {"pair_id", "annotator", "label", "rewrites"?, "note"?}
//   POST /pairs/{id}/edit              {"annotator", "text1"?, "text2"?}
//   GET  /export?format=jsonl|tsv[&batch=B]
//
// Failures answer {"error": {"code", "message", "violations"}}.

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "parannot/service.hpp"

namespace parannot {

int http_status(ServiceErrorCode code);

nlohmann::ordered_json pair_to_json(const CandidatePair& pair);
nlohmann::ordered_json assignment_to_json(const Assignment& assignment);
nlohmann::ordered_json annotation_to_json(const Annotation& annotation);
nlohmann::ordered_json error_to_json(ServiceErrorCode code, const std::string& message,
                                     const std::vector<std::string>& violations = {});

/// Installs every route on `server`. The service must outlive the server.
void mount_routes(httplib::Server& server, AnnotationService& service);

}  // namespace parannot
