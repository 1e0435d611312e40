#include "parannot/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

namespace parannot {

namespace {

bool parse_bool(std::string_view s) { return s == "1" || s == "true" || s == "yes" || s == "on"; }

void apply_listen(ServiceConfig& config, std::string_view listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string_view::npos) {
        config.host = std::string(listen);
        return;
    }
    config.host = std::string(listen.substr(0, colon));
    config.port = std::stoi(std::string(listen.substr(colon + 1)));
}

// FNV-1a; stable across runs, unlike std::hash.
std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ServiceErrorCode map_corpus_code(CorpusErrorCode code) {
    switch (code) {
        case CorpusErrorCode::NotFound: return ServiceErrorCode::NotFound;
        case CorpusErrorCode::VersionConflict: return ServiceErrorCode::VersionConflict;
        case CorpusErrorCode::LabelParseError: return ServiceErrorCode::LabelParseError;
        case CorpusErrorCode::InvalidRewrite: return ServiceErrorCode::InvalidRewrite;
        case CorpusErrorCode::BatchFinalized: return ServiceErrorCode::BatchFinalized;
        case CorpusErrorCode::SchemaViolation:
        case CorpusErrorCode::DecodeError:
        case CorpusErrorCode::DuplicateAnnotator: return ServiceErrorCode::SchemaViolation;
    }
    return ServiceErrorCode::SchemaViolation;
}

[[noreturn]] void rethrow(const CorpusError& e) {
    std::vector<std::string> violations;
    for (const auto& v : e.violations()) violations.push_back(std::string(to_string(v.code)) + ": " + v.message);
    throw ServiceError(map_corpus_code(e.code()), e.what(), std::move(violations));
}

}  // namespace

ServiceConfig load_config(const std::optional<std::filesystem::path>& file,
                          const std::function<const char*(const char*)>& getenv) {
    ServiceConfig config;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw std::runtime_error("cannot read config " + file->string());
        const auto j = nlohmann::json::parse(in);
        if (j.contains("listen")) apply_listen(config, j["listen"].get<std::string>());
        if (j.contains("data_dir")) config.data_dir = j["data_dir"].get<std::string>();
        if (j.contains("claim_lease_seconds")) config.claim_lease = std::chrono::seconds(j["claim_lease_seconds"].get<long>());
        if (j.contains("double_annotation")) config.double_annotation = j["double_annotation"].get<bool>();
        if (j.contains("shuffle_queue")) config.shuffle_queue = j["shuffle_queue"].get<bool>();
        if (j.contains("annotators")) {
            for (const auto& a : j["annotators"]) {
                config.annotators.push_back({a.at("id").get<std::string>(), a.value("token", std::string())});
            }
        }
    }
    if (const char* v = getenv("PARANNOT_LISTEN")) apply_listen(config, v);
    if (const char* v = getenv("PARANNOT_DATA_DIR")) config.data_dir = v;
    if (const char* v = getenv("PARANNOT_CLAIM_LEASE_SECONDS")) config.claim_lease = std::chrono::seconds(std::stol(v));
    if (const char* v = getenv("PARANNOT_DOUBLE_ANNOTATION")) config.double_annotation = parse_bool(v);
    if (const char* v = getenv("PARANNOT_SHUFFLE_QUEUE")) config.shuffle_queue = parse_bool(v);
    return config;
}

std::string_view to_string(ServiceErrorCode code) {
    switch (code) {
        case ServiceErrorCode::BadRequest: return "BadRequest";
        case ServiceErrorCode::Unauthorized: return "Unauthorized";
        case ServiceErrorCode::UnknownAnnotator: return "UnknownAnnotator";
        case ServiceErrorCode::UnknownBatch: return "UnknownBatch";
        case ServiceErrorCode::NotFound: return "NotFound";
        case ServiceErrorCode::ExpiredClaim: return "ExpiredClaim";
        case ServiceErrorCode::LabelParseError: return "LabelParseError";
        case ServiceErrorCode::InvalidRewrite: return "InvalidRewrite";
        case ServiceErrorCode::SchemaViolation: return "SchemaViolation";
        case ServiceErrorCode::EditNotAllowed: return "EditNotAllowed";
        case ServiceErrorCode::NotASegmentDeletion: return "NotASegmentDeletion";
        case ServiceErrorCode::AllSegmentsDeleted: return "AllSegmentsDeleted";
        case ServiceErrorCode::VersionConflict: return "VersionConflict";
        case ServiceErrorCode::BatchFinalized: return "BatchFinalized";
        case ServiceErrorCode::InsufficientAnnotations: return "InsufficientAnnotations";
    }
    return "?";
}

AnnotationService::AnnotationService(Store& store, ServiceConfig config, Clock clock)
    : store_(store), config_(std::move(config)), clock_(std::move(clock)) {
    for (const auto& a : config_.annotators) store_.put_annotator(a);
}

bool AnnotationService::authorized(std::string_view token, std::string_view annotator_id) const {
    const auto annotators = store_.list_annotators();
    const bool any_token = std::any_of(annotators.begin(), annotators.end(),
                                       [](const Annotator& a) { return !a.token.empty(); });
    if (!any_token) return true;
    if (token.empty()) return false;
    return std::any_of(annotators.begin(), annotators.end(), [&](const Annotator& a) {
        return a.token == token && (annotator_id.empty() || a.id == annotator_id);
    });
}

void AnnotationService::require_annotator(std::string_view annotator_id) const {
    if (!store_.find_annotator(annotator_id)) {
        throw ServiceError(ServiceErrorCode::UnknownAnnotator, "unknown annotator " + std::string(annotator_id));
    }
}

void AnnotationService::purge_expired_locked(std::string_view pair_id, Timestamp now) {
    const auto it = claims_.find(pair_id);
    if (it == claims_.end()) return;
    std::erase_if(it->second, [&](const ClaimTicket& t) { return t.expires_at <= now; });
    if (it->second.empty()) {
        claims_.erase(it);
        store_.set_claimed(pair_id, false);
    }
}

const ClaimTicket* AnnotationService::live_claim_locked(std::string_view pair_id, std::string_view annotator_id,
                                                        Timestamp now) {
    purge_expired_locked(pair_id, now);
    const auto it = claims_.find(pair_id);
    if (it == claims_.end()) return nullptr;
    for (const auto& t : it->second) {
        if (t.annotator_id == annotator_id) return &t;
    }
    return nullptr;
}

void AnnotationService::release_locked(std::string_view pair_id, std::string_view annotator_id) {
    const auto it = claims_.find(pair_id);
    if (it == claims_.end()) return;
    std::erase_if(it->second, [&](const ClaimTicket& t) { return t.annotator_id == annotator_id; });
    if (it->second.empty()) {
        claims_.erase(it);
        store_.set_claimed(pair_id, false);
    }
}

std::optional<Assignment> AnnotationService::next_candidate(std::string_view annotator_id,
                                                            std::string_view batch_id) {
    require_annotator(annotator_id);
    Batch batch;
    try {
        batch = store_.get_batch(batch_id);
    } catch (const CorpusError&) {
        throw ServiceError(ServiceErrorCode::UnknownBatch, "unknown batch " + std::string(batch_id));
    }

    auto order = batch.pair_ids;
    if (config_.shuffle_queue) {
        std::mt19937_64 rng(stable_hash(annotator_id) ^ stable_hash(batch_id));
        std::shuffle(order.begin(), order.end(), rng);
    }

    std::lock_guard lock(claims_mutex_);
    const Timestamp now = clock_();

    const auto assign = [&](const std::string& pair_id, ClaimTicket ticket) {
        auto pair = store_.get_pair(pair_id);
        auto lints = lint_pair(pair.text1, pair.text2);
        return Assignment{std::move(pair), std::move(ticket), std::move(lints)};
    };

    // A live claim of our own comes first so a reconnecting client resumes.
    for (const auto& pair_id : order) {
        if (const auto* own = live_claim_locked(pair_id, annotator_id, now)) return assign(pair_id, *own);
    }

    for (const auto& pair_id : order) {
        const auto annotations = store_.annotations_for(pair_id);
        std::set<std::string, std::less<>> holders;
        for (const auto& a : annotations) holders.insert(a.annotator_id);
        if (holders.count(annotator_id)) continue;

        if (const auto it = claims_.find(pair_id); it != claims_.end()) {
            for (const auto& t : it->second) holders.insert(t.annotator_id);
        }
        if (static_cast<int>(holders.size()) >= store_.required_annotators(pair_id)) continue;

        ClaimTicket ticket{pair_id, std::string(annotator_id), now + config_.claim_lease};
        claims_[pair_id].push_back(ticket);
        store_.set_claimed(pair_id, true);
        return assign(pair_id, std::move(ticket));
    }
    return std::nullopt;
}

RecordOutcome AnnotationService::submit_annotation(const Submission& s) {
    require_annotator(s.annotator_id);
    std::lock_guard lock(claims_mutex_);
    if (!live_claim_locked(s.pair_id, s.annotator_id, clock_())) {
        throw ServiceError(ServiceErrorCode::ExpiredClaim,
                           s.annotator_id + " holds no live claim on pair " + s.pair_id);
    }

    std::optional<AnnotatedLabel> label;
    try {
        label = parse_label(s.label);
    } catch (const LabelError& e) {
        std::vector<std::string> violations;
        for (auto v : e.violations()) violations.emplace_back(to_string(v));
        throw ServiceError(ServiceErrorCode::LabelParseError, e.what(), std::move(violations));
    }

    try {
        auto outcome = store_.record_annotation(Annotation{s.pair_id, s.annotator_id, *label, s.rewrites, s.note, clock_()});
        release_locked(s.pair_id, s.annotator_id);
        return outcome;
    } catch (const CorpusError& e) {
        rethrow(e);
    }
}

EditResult AnnotationService::edit_original(const EditRequest& r) {
    require_annotator(r.annotator_id);
    std::lock_guard lock(claims_mutex_);
    if (!live_claim_locked(r.pair_id, r.annotator_id, clock_())) {
        throw ServiceError(ServiceErrorCode::ExpiredClaim,
                           r.annotator_id + " holds no live claim on pair " + r.pair_id);
    }

    CandidatePair pair;
    try {
        pair = store_.get_pair(r.pair_id);
    } catch (const CorpusError& e) {
        rethrow(e);
    }
    if (pair.source != PairSource::AutoHeading) {
        throw ServiceError(ServiceErrorCode::EditNotAllowed,
                           "pair " + r.pair_id + " was extracted manually; only automatic heading candidates are editable");
    }

    const auto apply = [&](const std::optional<std::string>& edited, std::string& text,
                           std::optional<std::string>& original) {
        if (!edited) return;
        const std::string base = original.value_or(text);
        const auto verdict = validate_edit(base, *edited);
        if (verdict == EditVerdict::NotASegmentDeletion) {
            throw ServiceError(ServiceErrorCode::NotASegmentDeletion,
                               "edit is not a deletion of whole heading segments: \"" + *edited + "\"");
        }
        if (verdict == EditVerdict::AllSegmentsDeleted) {
            throw ServiceError(ServiceErrorCode::AllSegmentsDeleted, "an edit must keep at least one segment");
        }
        text = *edited;
        if (verdict == EditVerdict::Identity) {
            original.reset();
        } else {
            original = base;
        }
    };
    apply(r.text1, pair.text1, pair.original_text1);
    apply(r.text2, pair.text2, pair.original_text2);

    try {
        pair = store_.put_pair(pair);
    } catch (const CorpusError& e) {
        rethrow(e);
    }
    return EditResult{pair, check_post_edit_pair(pair.text1, pair.text2)};
}

AgreementReport AnnotationService::batch_agreement(std::string_view batch_id) {
    Batch batch;
    try {
        batch = store_.get_batch(batch_id);
    } catch (const CorpusError&) {
        throw ServiceError(ServiceErrorCode::UnknownBatch, "unknown batch " + std::string(batch_id));
    }
    if (batch.required_annotators < 2) {
        throw ServiceError(ServiceErrorCode::InsufficientAnnotations,
                           "batch " + batch.id + " is single-annotated; agreement needs two annotators per pair");
    }

    std::vector<LabelPair> items;
    for (const auto& pid : batch.pair_ids) {
        auto annotations = store_.annotations_for(pid);
        if (annotations.size() < 2) continue;
        // Role order by annotator id keeps the report independent of submission timing.
        std::sort(annotations.begin(), annotations.end(),
                  [](const Annotation& a, const Annotation& b) { return a.annotator_id < b.annotator_id; });
        items.emplace_back(annotations[0].label, annotations[1].label);
    }
    if (items.empty()) {
        throw ServiceError(ServiceErrorCode::InsufficientAnnotations,
                           "batch " + batch.id + " has no doubly annotated pair yet");
    }
    try {
        return compute_agreement(items);
    } catch (const AgreementError& e) {
        throw ServiceError(ServiceErrorCode::InsufficientAnnotations, e.what());
    }
}

Batch AnnotationService::create_batch(std::string id, std::vector<std::string> pair_ids,
                                      std::optional<int> required_annotators) {
    Batch batch;
    batch.id = std::move(id);
    batch.pair_ids = std::move(pair_ids);
    batch.required_annotators = required_annotators.value_or(config_.double_annotation ? 2 : 1);
    try {
        return store_.put_batch(std::move(batch));
    } catch (const CorpusError& e) {
        rethrow(e);
    }
}

std::string AnnotationService::export_corpus(CorpusFormat format, std::optional<std::string> batch_id) {
    try {
        return store_.export_corpus(ExportScope{std::move(batch_id)}, format);
    } catch (const CorpusError& e) {
        if (e.code() == CorpusErrorCode::NotFound) throw ServiceError(ServiceErrorCode::UnknownBatch, e.what());
        rethrow(e);
    }
}

std::vector<ClaimTicket> AnnotationService::active_claims(std::string_view pair_id) {
    std::lock_guard lock(claims_mutex_);
    purge_expired_locked(pair_id, clock_());
    const auto it = claims_.find(pair_id);
    if (it == claims_.end()) return {};
    return it->second;
}

}  // namespace parannot
