#pragma once

// Annotation workflow on top of the store: work-queue claiming with leases,
// label submission, heading edits, batch agreement and export.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parannot/agreement.hpp"
#include "parannot/guideline.hpp"
#include "parannot/heading.hpp"
#include "parannot/store.hpp"

namespace parannot {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir;  // memory-only store when empty
    std::chrono::seconds claim_lease{30 * 60};
    bool double_annotation = true;  // default required_annotators for new batches: 2, else 1
    bool shuffle_queue = false;     // per-annotator deterministic shuffle of batch order
    std::vector<Annotator> annotators;
};

/// Reads a JSON config file (when given) and then applies PARANNOT_*
/// environment overrides through `getenv`.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file,
                          const std::function<const char*(const char*)>& getenv = std::getenv);

enum class ServiceErrorCode {
    BadRequest,
    Unauthorized,
    UnknownAnnotator,
    UnknownBatch,
    NotFound,
    ExpiredClaim,
    LabelParseError,
    InvalidRewrite,
    SchemaViolation,
    EditNotAllowed,
    NotASegmentDeletion,
    AllSegmentsDeleted,
    VersionConflict,
    BatchFinalized,
    InsufficientAnnotations,
};

std::string_view to_string(ServiceErrorCode code);

class ServiceError : public std::runtime_error {
public:
    ServiceError(ServiceErrorCode code, const std::string& what, std::vector<std::string> violations = {})
        : std::runtime_error(what), code_(code), violations_(std::move(violations)) {}

    ServiceErrorCode code() const { return code_; }
    const std::vector<std::string>& violations() const { return violations_; }

private:
    ServiceErrorCode code_;
    std::vector<std::string> violations_;
};

struct ClaimTicket {
    std::string pair_id;
    std::string annotator_id;
    Timestamp expires_at;
};

struct Assignment {
    CandidatePair pair;
    ClaimTicket ticket;
    std::vector<LintFinding> lints;
};

struct Submission {
    std::string pair_id;
    std::string annotator_id;
    std::string label;
    std::vector<RewritePair> rewrites;
    std::optional<std::string> note;
};

struct EditRequest {
    std::string pair_id;
    std::string annotator_id;
    std::optional<std::string> text1;
    std::optional<std::string> text2;
};

struct EditResult {
    CandidatePair pair;
    std::optional<PostEditDirective> directive;
};

class AnnotationService {
public:
    using Clock = std::function<Timestamp()>;

    AnnotationService(Store& store, ServiceConfig config, Clock clock = now_seconds);

    const ServiceConfig& config() const { return config_; }
    Store& store() { return store_; }

    /// Claims the first pair in batch order that the annotator has not
    /// labeled and that is not already held by enough distinct annotators.
    /// An annotator's own live claim is handed back first. nullopt = no work.
    std::optional<Assignment> next_candidate(std::string_view annotator_id, std::string_view batch_id);

    RecordOutcome submit_annotation(const Submission& submission);

    EditResult edit_original(const EditRequest& request);

    AgreementReport batch_agreement(std::string_view batch_id);

    Batch create_batch(std::string id, std::vector<std::string> pair_ids, std::optional<int> required_annotators = {});

    std::string export_corpus(CorpusFormat format, std::optional<std::string> batch_id = {});

    /// Live claims on a pair, for diagnostics and tests.
    std::vector<ClaimTicket> active_claims(std::string_view pair_id);

    /// Token check: true when no annotator has a token configured, or when
    /// the token belongs to `annotator_id` (any annotator if empty).
    bool authorized(std::string_view token, std::string_view annotator_id = {}) const;

private:
    void require_annotator(std::string_view annotator_id) const;
    // Callers hold claims_mutex_.
    void purge_expired_locked(std::string_view pair_id, Timestamp now);
    const ClaimTicket* live_claim_locked(std::string_view pair_id, std::string_view annotator_id, Timestamp now);
    void release_locked(std::string_view pair_id, std::string_view annotator_id);

    Store& store_;
    ServiceConfig config_;
    Clock clock_;
    std::mutex claims_mutex_;
    std::map<std::string, std::vector<ClaimTicket>, std::less<>> claims_;
};

}  // namespace parannot
