#pragma once

// Data model for candidate pairs, annotations, rewrites and batches.

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parannot/label.hpp"

namespace parannot {

using Timestamp = std::chrono::sys_seconds;

Timestamp now_seconds();
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view s);

enum class PairSource { ManualExtraction, AutoHeading };
enum class PairStatus { Pending, Claimed, Annotated };

std::string_view to_string(PairSource source);
std::string_view to_string(PairStatus status);
std::optional<PairSource> parse_source(std::string_view s);
std::optional<PairStatus> parse_status(std::string_view s);

struct CandidatePair {
    std::string id;
    std::string text1;
    std::string text2;
    // Pre-edit forms; present only once an edit changed the text.
    std::optional<std::string> original_text1;
    std::optional<std::string> original_text2;
    PairSource source = PairSource::ManualExtraction;
    std::vector<std::string> document_refs;
    PairStatus status = PairStatus::Pending;
    std::uint64_t version = 0;

    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

/// A rewritten variant of a candidate. It is a flag-free 4 by construction,
/// so it carries no label of its own.
struct RewritePair {
    std::string text1;
    std::string text2;

    friend bool operator==(const RewritePair&, const RewritePair&) = default;
};

struct Annotation {
    std::string pair_id;
    std::string annotator_id;
    AnnotatedLabel label;
    std::vector<RewritePair> rewrites;
    std::optional<std::string> note;
    Timestamp created_at{};

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Batch {
    std::string id;
    std::vector<std::string> pair_ids;
    int required_annotators = 1;
    bool finalized = false;

    friend bool operator==(const Batch&, const Batch&) = default;
};

struct Annotator {
    std::string id;
    std::string token;
};

enum class CorpusErrorCode {
    NotFound,
    VersionConflict,
    SchemaViolation,
    LabelParseError,
    InvalidRewrite,
    DecodeError,
    DuplicateAnnotator,
    BatchFinalized,
};

std::string_view to_string(CorpusErrorCode code);

/// One broken constraint, attributed to a field.
struct Violation {
    CorpusErrorCode code;
    std::string field;
    std::string message;
};

class CorpusError : public std::runtime_error {
public:
    CorpusError(CorpusErrorCode code, const std::string& what, std::vector<Violation> violations = {});

    CorpusErrorCode code() const { return code_; }
    const std::vector<Violation>& violations() const { return violations_; }

private:
    CorpusErrorCode code_;
    std::vector<Violation> violations_;
};

std::vector<Violation> check_pair(const CandidatePair& pair);

/// Rewrite rules: only labels other than a flag-free 4 may carry rewrites,
/// each rewrite needs two distinct non-empty texts, and a rewrite may not
/// restate the candidate it belongs to.
std::vector<Violation> check_rewrites(const AnnotatedLabel& label, const std::vector<RewritePair>& rewrites,
                                      std::string_view pair_text1, std::string_view pair_text2);

std::vector<Violation> check_batch(const Batch& batch);

}  // namespace parannot
