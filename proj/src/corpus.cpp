#include "parannot/corpus.hpp"

#include <cstdio>
#include <ctime>
#include <unordered_set>

#include "parannot/text.hpp"

namespace parannot {

Timestamp now_seconds() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

std::string format_timestamp(Timestamp t) {
    const std::time_t tt = t.time_since_epoch().count();
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    if (s.size() != 20 || s[19] != 'Z') return std::nullopt;
    const std::string str(s);
    std::tm tm{};
    char sep = 0;
    if (std::sscanf(str.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &sep,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec) != 7 ||
        sep != 'T') {
        return std::nullopt;
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    const std::time_t tt = timegm(&tm);
    if (tt == static_cast<std::time_t>(-1)) return std::nullopt;
    return Timestamp(std::chrono::seconds(tt));
}

std::string_view to_string(PairSource source) {
    return source == PairSource::AutoHeading ? "auto_heading" : "manual_extraction";
}

std::string_view to_string(PairStatus status) {
    switch (status) {
        case PairStatus::Pending: return "pending";
        case PairStatus::Claimed: return "claimed";
        case PairStatus::Annotated: return "annotated";
    }
    return "?";
}

std::optional<PairSource> parse_source(std::string_view s) {
    if (s == "manual_extraction") return PairSource::ManualExtraction;
    if (s == "auto_heading") return PairSource::AutoHeading;
    return std::nullopt;
}

std::optional<PairStatus> parse_status(std::string_view s) {
    if (s == "pending") return PairStatus::Pending;
    if (s == "claimed") return PairStatus::Claimed;
    if (s == "annotated") return PairStatus::Annotated;
    return std::nullopt;
}

std::string_view to_string(CorpusErrorCode code) {
    switch (code) {
        case CorpusErrorCode::NotFound: return "NotFound";
        case CorpusErrorCode::VersionConflict: return "VersionConflict";
        case CorpusErrorCode::SchemaViolation: return "SchemaViolation";
        case CorpusErrorCode::LabelParseError: return "LabelParseError";
        case CorpusErrorCode::InvalidRewrite: return "InvalidRewrite";
        case CorpusErrorCode::DecodeError: return "DecodeError";
        case CorpusErrorCode::DuplicateAnnotator: return "DuplicateAnnotator";
        case CorpusErrorCode::BatchFinalized: return "BatchFinalized";
    }
    return "?";
}

CorpusError::CorpusError(CorpusErrorCode code, const std::string& what, std::vector<Violation> violations)
    : std::runtime_error(what), code_(code), violations_(std::move(violations)) {}

std::vector<Violation> check_pair(const CandidatePair& pair) {
    std::vector<Violation> out;
    if (pair.text1.empty()) out.push_back({CorpusErrorCode::SchemaViolation, "text1", "text1 is empty"});
    if (pair.text2.empty()) out.push_back({CorpusErrorCode::SchemaViolation, "text2", "text2 is empty"});
    if (pair.source != PairSource::AutoHeading) {
        if (pair.original_text1) {
            out.push_back({CorpusErrorCode::SchemaViolation, "original_text1",
                           "only auto_heading candidates may be edited"});
        }
        if (pair.original_text2) {
            out.push_back({CorpusErrorCode::SchemaViolation, "original_text2",
                           "only auto_heading candidates may be edited"});
        }
    }
    if (pair.original_text1 && pair.original_text1->empty()) {
        out.push_back({CorpusErrorCode::SchemaViolation, "original_text1", "original_text1 is empty"});
    }
    if (pair.original_text2 && pair.original_text2->empty()) {
        out.push_back({CorpusErrorCode::SchemaViolation, "original_text2", "original_text2 is empty"});
    }
    return out;
}

std::vector<Violation> check_rewrites(const AnnotatedLabel& label, const std::vector<RewritePair>& rewrites,
                                      std::string_view pair_text1, std::string_view pair_text2) {
    std::vector<Violation> out;
    if (rewrites.empty()) return out;
    if (label == AnnotatedLabel::universal()) {
        out.push_back({CorpusErrorCode::InvalidRewrite, "rewrites",
                       "a flag-free 4 is already a universal paraphrase and takes no rewrites"});
    }
    for (std::size_t i = 0; i < rewrites.size(); ++i) {
        const auto& rw = rewrites[i];
        const std::string field = "rewrites[" + std::to_string(i) + "]";
        if (rw.text1.empty() || rw.text2.empty()) {
            out.push_back({CorpusErrorCode::InvalidRewrite, field, "rewrite texts must be non-empty"});
        } else if (rw.text1 == rw.text2) {
            out.push_back({CorpusErrorCode::InvalidRewrite, field, "rewrite texts are identical"});
        } else if (rw.text1 == pair_text1 && rw.text2 == pair_text2) {
            out.push_back({CorpusErrorCode::InvalidRewrite, field, "rewrite repeats the candidate unchanged"});
        }
    }
    return out;
}

std::vector<Violation> check_batch(const Batch& batch) {
    std::vector<Violation> out;
    if (batch.id.empty()) out.push_back({CorpusErrorCode::SchemaViolation, "id", "batch id is empty"});
    if (batch.required_annotators < 1) {
        out.push_back({CorpusErrorCode::SchemaViolation, "required_annotators", "must be positive"});
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& id : batch.pair_ids) {
        if (!seen.insert(id).second) {
            out.push_back({CorpusErrorCode::SchemaViolation, "pair_ids", "duplicate pair id " + id});
        }
    }
    return out;
}

}  // namespace parannot
