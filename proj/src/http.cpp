#include "parannot/http.hpp"

namespace parannot {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, ServiceErrorCode code, const std::string& message,
                const std::vector<std::string>& violations = {}) {
    send(res, http_status(code), error_to_json(code, message, violations));
}

std::string bearer_token(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.rfind(prefix, 0) != 0) return {};
    return header.substr(prefix.size());
}

nlohmann::json parse_body(const httplib::Request& req) {
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw ServiceError(ServiceErrorCode::BadRequest, "request body must be a JSON object");
    }
    return body;
}

std::string required_string(const nlohmann::json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || !it->is_string()) {
        throw ServiceError(ServiceErrorCode::BadRequest, std::string("missing string field \"") + key + "\"");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ServiceError(ServiceErrorCode::BadRequest, std::string("\"") + key + "\" must be a string");
    return it->get<std::string>();
}

std::vector<RewritePair> parse_rewrites(const nlohmann::json& body) {
    std::vector<RewritePair> out;
    const auto it = body.find("rewrites");
    if (it == body.end() || it->is_null()) return out;
    if (!it->is_array()) throw ServiceError(ServiceErrorCode::BadRequest, "\"rewrites\" must be an array");
    for (const auto& r : *it) {
        if (r.is_array() && r.size() == 2 && r[0].is_string() && r[1].is_string()) {
            out.push_back({r[0].get<std::string>(), r[1].get<std::string>()});
        } else if (r.is_object() && r.contains("text1") && r.contains("text2") && r["text1"].is_string() &&
                   r["text2"].is_string()) {
            out.push_back({r["text1"].get<std::string>(), r["text2"].get<std::string>()});
        } else {
            throw ServiceError(ServiceErrorCode::BadRequest, "each rewrite is [text1, text2]");
        }
    }
    return out;
}

// Runs a handler, converting service errors into error responses.
template <class F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ServiceError& e) {
            send_error(res, e.code(), e.what(), e.violations());
        } catch (const nlohmann::json::exception& e) {
            send_error(res, ServiceErrorCode::BadRequest, e.what());
        }
    };
}

void authorize(const AnnotationService& service, const httplib::Request& req, std::string_view annotator = {}) {
    if (!service.authorized(bearer_token(req), annotator)) {
        throw ServiceError(ServiceErrorCode::Unauthorized, "missing or wrong bearer token");
    }
}

}  // namespace

int http_status(ServiceErrorCode code) {
    switch (code) {
        case ServiceErrorCode::BadRequest: return 400;
        case ServiceErrorCode::Unauthorized: return 401;
        case ServiceErrorCode::EditNotAllowed: return 403;
        case ServiceErrorCode::UnknownAnnotator:
        case ServiceErrorCode::UnknownBatch:
        case ServiceErrorCode::NotFound: return 404;
        case ServiceErrorCode::ExpiredClaim:
        case ServiceErrorCode::VersionConflict:
        case ServiceErrorCode::BatchFinalized:
        case ServiceErrorCode::InsufficientAnnotations: return 409;
        case ServiceErrorCode::LabelParseError:
        case ServiceErrorCode::InvalidRewrite:
        case ServiceErrorCode::SchemaViolation:
        case ServiceErrorCode::NotASegmentDeletion:
        case ServiceErrorCode::AllSegmentsDeleted: return 422;
    }
    return 500;
}

ojson pair_to_json(const CandidatePair& p) {
    ojson j;
    j["id"] = p.id;
    j["text1"] = p.text1;
    j["text2"] = p.text2;
    if (p.original_text1) j["original_text1"] = *p.original_text1;
    if (p.original_text2) j["original_text2"] = *p.original_text2;
    j["source"] = to_string(p.source);
    j["document_refs"] = p.document_refs;
    j["status"] = to_string(p.status);
    j["version"] = p.version;
    return j;
}

ojson assignment_to_json(const Assignment& a) {
    ojson j;
    j["status"] = "assigned";
    j["pair"] = pair_to_json(a.pair);
    j["ticket"] = {{"pair_id", a.ticket.pair_id},
                   {"annotator", a.ticket.annotator_id},
                   {"expires_at", format_timestamp(a.ticket.expires_at)}};
    ojson lints = ojson::array();
    for (const auto& f : a.lints) lints.push_back({{"kind", to_string(f.kind)}, {"detail", f.detail}});
    j["lints"] = std::move(lints);
    return j;
}

ojson annotation_to_json(const Annotation& a) {
    ojson j;
    j["pair_id"] = a.pair_id;
    j["annotator"] = a.annotator_id;
    j["label"] = format_label(a.label);
    ojson rewrites = ojson::array();
    for (const auto& r : a.rewrites) rewrites.push_back({r.text1, r.text2});
    j["rewrites"] = std::move(rewrites);
    if (a.note) j["note"] = *a.note;
    j["created_at"] = format_timestamp(a.created_at);
    return j;
}

ojson error_to_json(ServiceErrorCode code, const std::string& message, const std::vector<std::string>& violations) {
    ojson e;
    e["code"] = to_string(code);
    e["message"] = message;
    e["violations"] = violations;
    return {{"error", std::move(e)}};
}

void mount_routes(httplib::Server& server, AnnotationService& service) {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        send(res, 200, {{"status", "ok"}});
    });

    server.Get(R"(/batches/([^/]+)/next)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const auto annotator = req.get_param_value("annotator");
        if (annotator.empty()) throw ServiceError(ServiceErrorCode::BadRequest, "query parameter annotator is required");
        authorize(service, req, annotator);
        const auto assignment = service.next_candidate(annotator, req.matches[1].str());
        if (!assignment) {
            send(res, 200, {{"status", "no_work"}});
            return;
        }
        send(res, 200, assignment_to_json(*assignment));
    }));

    server.Post("/batches", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        authorize(service, req);
        const auto body = parse_body(req);
        const auto id = required_string(body, "id");
        std::vector<std::string> pair_ids;
        if (body.contains("pair_ids")) pair_ids = body["pair_ids"].get<std::vector<std::string>>();
        std::optional<int> required;
        if (body.contains("required_annotators")) required = body["required_annotators"].get<int>();
        const auto batch = service.create_batch(id, std::move(pair_ids), required);
        send(res, 201, {{"id", batch.id},
                        {"pair_ids", batch.pair_ids},
                        {"required_annotators", batch.required_annotators},
                        {"finalized", batch.finalized}});
    }));

    server.Get(R"(/batches/([^/]+)/agreement)",
               guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   authorize(service, req);
                   const auto report = service.batch_agreement(req.matches[1].str());
                   res.status = 200;
                   res.set_content(report_to_json(report), kJson);
               }));

    server.Post("/annotations", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        Submission s;
        s.pair_id = required_string(body, "pair_id");
        s.annotator_id = required_string(body, "annotator");
        authorize(service, req, s.annotator_id);
        s.label = required_string(body, "label");
        s.rewrites = parse_rewrites(body);
        s.note = optional_string(body, "note");
        const auto outcome = service.submit_annotation(s);
        auto j = annotation_to_json(outcome.annotation);
        j["replaced"] = outcome.replaced;
        send(res, 201, j);
    }));

    server.Post(R"(/pairs/([^/]+)/edit)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        EditRequest r;
        r.pair_id = req.matches[1].str();
        r.annotator_id = required_string(body, "annotator");
        authorize(service, req, r.annotator_id);
        r.text1 = optional_string(body, "text1");
        r.text2 = optional_string(body, "text2");
        if (!r.text1 && !r.text2) throw ServiceError(ServiceErrorCode::BadRequest, "supply text1, text2 or both");
        const auto result = service.edit_original(r);
        ojson j;
        j["pair"] = pair_to_json(result.pair);
        if (result.directive) {
            j["directive"] = to_string(*result.directive);
        } else {
            j["directive"] = nullptr;
        }
        send(res, 200, j);
    }));

    server.Get("/export", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        authorize(service, req);
        const auto name = req.has_param("format") ? req.get_param_value("format") : std::string("jsonl");
        const auto format = parse_format(name);
        if (!format) throw ServiceError(ServiceErrorCode::BadRequest, "format must be jsonl or tsv");
        std::optional<std::string> batch;
        if (req.has_param("batch")) batch = req.get_param_value("batch");
        res.status = 200;
        res.set_content(service.export_corpus(*format, batch),
                        *format == CorpusFormat::Jsonl ? "application/x-ndjson" : "text/tab-separated-values");
    }));
}

}  // namespace parannot
