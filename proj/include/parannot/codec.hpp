#pragma once

// Interchange formats for annotated corpora.
//
// JSONL, one record per annotation, keys in this order:
//   id, text1, text2, label, source, original_text1?, original_text2?,
//   annotator, rewrites, note?
//
// TSV, with a header row: id, annotator, label, text1, text2. Each rewrite
// becomes an extra row with id "<id>_rew<N>" (N from 1) and label "4".
// Backslash, tab, newline and carriage return in texts are escaped as
// \\, \t, \n and \r.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parannot/corpus.hpp"

namespace parannot {

enum class CorpusFormat { Jsonl, Tsv };

std::optional<CorpusFormat> parse_format(std::string_view s);
std::string_view to_string(CorpusFormat format);

struct CorpusRecord {
    std::string id;
    std::string text1;
    std::string text2;
    std::optional<AnnotatedLabel> label;  // absent only for bare candidate records
    PairSource source = PairSource::ManualExtraction;
    std::optional<std::string> original_text1;
    std::optional<std::string> original_text2;
    std::string annotator;
    std::vector<RewritePair> rewrites;
    std::optional<std::string> note;

    friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct Diagnostic {
    std::size_t line = 0;  // 1-based
    std::string field;
    CorpusErrorCode code = CorpusErrorCode::SchemaViolation;
    std::string message;
    bool warning = false;
};

std::string format_diagnostic(const Diagnostic& d);

struct DecodeOptions {
    // Accept records that have neither "label" nor "annotator" (bare
    // candidates waiting to be annotated).
    bool allow_unlabeled = false;
};

struct DecodedRecord {
    std::size_t line = 0;
    std::optional<CorpusRecord> record;
    std::vector<Diagnostic> diagnostics;
};

std::string encode_jsonl(const CorpusRecord& record);
std::vector<std::string> encode_tsv_rows(const CorpusRecord& record);
inline constexpr std::string_view kTsvHeader = "id\tannotator\tlabel\ttext1\ttext2";

std::string tsv_escape(std::string_view s);
std::optional<std::string> tsv_unescape(std::string_view s);

/// Decode one JSONL line and check every record-level invariant.
DecodedRecord decode_jsonl_line(std::string_view line, std::size_t line_no, const DecodeOptions& options = {});

/// Decode a whole stream. Blank lines are ignored.
std::vector<DecodedRecord> decode_corpus(std::string_view data, CorpusFormat format,
                                         const DecodeOptions& options = {});

struct CorpusCheck {
    std::vector<DecodedRecord> records;  // all decoded lines, valid or not
    std::vector<Diagnostic> diagnostics;  // errors and warnings, in line order
    std::size_t error_count = 0;
    std::size_t warning_count = 0;

    /// True when there are no errors (and no warnings if strict).
    bool ok(bool strict) const { return error_count == 0 && (!strict || warning_count == 0); }
};

/// Record-level checks plus cross-record consistency: records sharing an id
/// must agree on the pair data, and a repeated (id, annotator) is a warning.
CorpusCheck check_corpus(std::string_view data, CorpusFormat format, const DecodeOptions& options = {});

}  // namespace parannot
