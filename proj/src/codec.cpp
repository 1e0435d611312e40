#include "parannot/codec.hpp"

#include <charconv>
#include <map>
#include <set>

#include <json.hpp>

#include "parannot/guideline.hpp"
#include "parannot/text.hpp"

namespace parannot {

using ordered_json = nlohmann::ordered_json;

std::optional<CorpusFormat> parse_format(std::string_view s) {
    if (s == "jsonl") return CorpusFormat::Jsonl;
    if (s == "tsv") return CorpusFormat::Tsv;
    return std::nullopt;
}

std::string_view to_string(CorpusFormat format) { return format == CorpusFormat::Tsv ? "tsv" : "jsonl"; }

std::string format_diagnostic(const Diagnostic& d) {
    std::string out = "line " + std::to_string(d.line);
    if (!d.field.empty()) out += ", field " + d.field;
    out += d.warning ? ": warning " : ": ";
    out += to_string(d.code);
    out += ": ";
    out += d.message;
    return out;
}

std::string encode_jsonl(const CorpusRecord& r) {
    if (!r.label) throw CorpusError(CorpusErrorCode::SchemaViolation, "cannot export an unlabeled record " + r.id);
    ordered_json j;
    j["id"] = r.id;
    j["text1"] = r.text1;
    j["text2"] = r.text2;
    j["label"] = format_label(*r.label);
    j["source"] = to_string(r.source);
    if (r.original_text1) j["original_text1"] = *r.original_text1;
    if (r.original_text2) j["original_text2"] = *r.original_text2;
    j["annotator"] = r.annotator;
    j["rewrites"] = ordered_json::array();
    for (const auto& rw : r.rewrites) j["rewrites"].push_back(ordered_json::array({rw.text1, rw.text2}));
    if (r.note) j["note"] = *r.note;
    return j.dump();
}

std::string tsv_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::optional<std::string> tsv_unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size()) return std::nullopt;
        switch (s[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: return std::nullopt;
        }
    }
    return out;
}

std::vector<std::string> encode_tsv_rows(const CorpusRecord& r) {
    if (!r.label) throw CorpusError(CorpusErrorCode::SchemaViolation, "cannot export an unlabeled record " + r.id);
    std::vector<std::string> rows;
    const std::string annotator = tsv_escape(r.annotator);
    rows.push_back(tsv_escape(r.id) + '\t' + annotator + '\t' + format_label(*r.label) + '\t' + tsv_escape(r.text1) +
                   '\t' + tsv_escape(r.text2));
    for (std::size_t i = 0; i < r.rewrites.size(); ++i) {
        rows.push_back(tsv_escape(r.id) + "_rew" + std::to_string(i + 1) + '\t' + annotator + "\t4\t" +
                       tsv_escape(r.rewrites[i].text1) + '\t' + tsv_escape(r.rewrites[i].text2));
    }
    return rows;
}

namespace {

void add(DecodedRecord& out, std::string field, CorpusErrorCode code, std::string message) {
    out.diagnostics.push_back({out.line, std::move(field), code, std::move(message), false});
}

void warn(DecodedRecord& out, std::string field, std::string message) {
    out.diagnostics.push_back({out.line, std::move(field), CorpusErrorCode::SchemaViolation, std::move(message), true});
}

bool has_errors(const DecodedRecord& out) {
    for (const auto& d : out.diagnostics) {
        if (!d.warning) return true;
    }
    return false;
}

std::string label_violation_text(const LabelError& e) {
    std::string out;
    for (auto v : e.violations()) {
        if (!out.empty()) out += ", ";
        out += to_string(v);
    }
    return out + " (" + e.what() + ")";
}

// Pair and rewrite invariants on a fully decoded record.
void check_record(DecodedRecord& out, const CorpusRecord& r) {
    CandidatePair pair;
    pair.id = r.id;
    pair.text1 = r.text1;
    pair.text2 = r.text2;
    pair.original_text1 = r.original_text1;
    pair.original_text2 = r.original_text2;
    pair.source = r.source;
    for (auto& v : check_pair(pair)) add(out, v.field, v.code, v.message);
    if (r.label) {
        for (auto& v : check_rewrites(*r.label, r.rewrites, r.text1, r.text2)) add(out, v.field, v.code, v.message);
    } else if (!r.rewrites.empty()) {
        add(out, "rewrites", CorpusErrorCode::SchemaViolation, "an unlabeled candidate cannot carry rewrites");
    }
}

std::optional<std::string> get_string(DecodedRecord& out, const ordered_json& j, const char* key, bool required,
                                      bool non_empty) {
    const auto it = j.find(key);
    if (it == j.end()) {
        if (required) add(out, key, CorpusErrorCode::SchemaViolation, std::string("missing field \"") + key + "\"");
        return std::nullopt;
    }
    if (!it->is_string()) {
        add(out, key, CorpusErrorCode::SchemaViolation, std::string("field \"") + key + "\" must be a string");
        return std::nullopt;
    }
    auto value = it->get<std::string>();
    if (non_empty && value.empty()) {
        add(out, key, CorpusErrorCode::SchemaViolation, std::string("field \"") + key + "\" is empty");
    }
    return value;
}

}  // namespace

DecodedRecord decode_jsonl_line(std::string_view line, std::size_t line_no, const DecodeOptions& options) {
    DecodedRecord out;
    out.line = line_no;
    if (!text::is_valid_utf8(line)) {
        add(out, "", CorpusErrorCode::DecodeError, "line is not valid UTF-8");
        return out;
    }
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        add(out, "", CorpusErrorCode::DecodeError, e.what());
        return out;
    }
    if (!j.is_object()) {
        add(out, "", CorpusErrorCode::SchemaViolation, "record is not a JSON object");
        return out;
    }

    static const std::set<std::string> known = {"id",        "text1",          "text2",          "label",
                                                "source",    "original_text1", "original_text2", "annotator",
                                                "rewrites",  "note"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) add(out, key, CorpusErrorCode::SchemaViolation, "unknown field \"" + key + "\"");
    }

    CorpusRecord r;
    const bool unlabeled = options.allow_unlabeled && !j.contains("label") && !j.contains("annotator");

    const auto id = get_string(out, j, "id", true, true);
    const auto t1 = get_string(out, j, "text1", true, true);
    const auto t2 = get_string(out, j, "text2", true, true);
    const auto label = get_string(out, j, "label", !unlabeled, false);
    const auto source = get_string(out, j, "source", true, false);
    const auto o1 = get_string(out, j, "original_text1", false, true);
    const auto o2 = get_string(out, j, "original_text2", false, true);
    const auto annotator = get_string(out, j, "annotator", !unlabeled, true);
    const auto note = get_string(out, j, "note", false, false);

    if (id) r.id = *id;
    if (t1) r.text1 = *t1;
    if (t2) r.text2 = *t2;
    r.original_text1 = o1;
    r.original_text2 = o2;
    if (annotator) r.annotator = *annotator;
    r.note = note;

    if (source) {
        if (const auto s = parse_source(*source)) {
            r.source = *s;
        } else {
            add(out, "source", CorpusErrorCode::SchemaViolation, "unknown source \"" + *source + "\"");
        }
    }

    if (label) {
        try {
            r.label = parse_label(*label);
            if (format_label(*r.label) != *label) {
                warn(out, "label",
                     "label \"" + *label + "\" is not canonical (expected \"" + format_label(*r.label) + "\")");
            }
        } catch (const LabelError& e) {
            add(out, "label", CorpusErrorCode::LabelParseError, label_violation_text(e));
        }
    }

    const auto rw = j.find("rewrites");
    if (rw == j.end()) {
        if (!unlabeled) add(out, "rewrites", CorpusErrorCode::SchemaViolation, "missing field \"rewrites\"");
    } else if (!rw->is_array()) {
        add(out, "rewrites", CorpusErrorCode::SchemaViolation, "field \"rewrites\" must be an array");
    } else {
        for (std::size_t i = 0; i < rw->size(); ++i) {
            const auto& item = (*rw)[i];
            if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
                add(out, "rewrites[" + std::to_string(i) + "]", CorpusErrorCode::SchemaViolation,
                    "a rewrite must be a [text1, text2] array of strings");
                continue;
            }
            r.rewrites.push_back({item[0].get<std::string>(), item[1].get<std::string>()});
        }
    }

    if (!has_errors(out)) check_record(out, r);
    if (!has_errors(out)) out.record = std::move(r);
    return out;
}

namespace {

std::vector<std::pair<std::size_t, std::string_view>> split_lines(std::string_view data) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    while (!data.empty()) {
        ++line_no;
        const auto nl = data.find('\n');
        std::string_view line = data.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line_no, line);
        if (nl == std::string_view::npos) break;
        data.remove_prefix(nl + 1);
    }
    return lines;
}

// Splits "<base>_rew<N>" into base and N.
std::optional<std::pair<std::string, std::size_t>> rewrite_row_id(std::string_view id) {
    const auto pos = id.rfind("_rew");
    if (pos == std::string_view::npos) return std::nullopt;
    const std::string_view digits = id.substr(pos + 4);
    if (digits.empty()) return std::nullopt;
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
    return std::make_pair(std::string(id.substr(0, pos)), n);
}

std::vector<DecodedRecord> decode_tsv(std::string_view data, const DecodeOptions&) {
    std::vector<DecodedRecord> out;
    bool header_seen = false;
    std::optional<DecodedRecord> open;

    const auto close = [&] {
        if (!open) return;
        if (open->record && !has_errors(*open)) {
            check_record(*open, *open->record);
            if (has_errors(*open)) open->record.reset();
        }
        out.push_back(std::move(*open));
        open.reset();
    };

    for (const auto& [line_no, line] : split_lines(data)) {
        if (text::is_blank(line)) continue;
        if (!header_seen) {
            header_seen = true;
            if (line != kTsvHeader) {
                DecodedRecord bad;
                bad.line = line_no;
                add(bad, "", CorpusErrorCode::SchemaViolation, "missing TSV header row");
                out.push_back(std::move(bad));
            }
            continue;
        }

        DecodedRecord row;
        row.line = line_no;
        if (!text::is_valid_utf8(line)) {
            close();
            add(row, "", CorpusErrorCode::DecodeError, "line is not valid UTF-8");
            out.push_back(std::move(row));
            continue;
        }

        std::vector<std::string> cols;
        bool bad_escape = false;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            const auto raw = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
            auto value = tsv_unescape(raw);
            if (!value) bad_escape = true;
            cols.push_back(value.value_or(""));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (bad_escape) {
            close();
            add(row, "", CorpusErrorCode::DecodeError, "invalid escape sequence");
            out.push_back(std::move(row));
            continue;
        }
        if (cols.size() != 5) {
            close();
            add(row, "", CorpusErrorCode::SchemaViolation,
                "expected 5 tab-separated columns, found " + std::to_string(cols.size()));
            out.push_back(std::move(row));
            continue;
        }

        // Rewrite rows attach to the record immediately above them.
        if (const auto rew = rewrite_row_id(cols[0]);
            rew && open && open->record && open->record->id == rew->first && open->record->annotator == cols[1]) {
            if (cols[2] != "4") {
                add(*open, "label", CorpusErrorCode::SchemaViolation,
                    "rewrite row " + cols[0] + " must carry label 4");
                open->diagnostics.back().line = line_no;
                open->record.reset();
            } else if (rew->second != open->record->rewrites.size() + 1) {
                add(*open, "id", CorpusErrorCode::SchemaViolation, "rewrite rows out of sequence at " + cols[0]);
                open->diagnostics.back().line = line_no;
                open->record.reset();
            } else {
                open->record->rewrites.push_back({cols[3], cols[4]});
            }
            continue;
        }

        close();
        CorpusRecord r;
        r.id = cols[0];
        r.annotator = cols[1];
        r.text1 = cols[3];
        r.text2 = cols[4];
        if (r.id.empty()) add(row, "id", CorpusErrorCode::SchemaViolation, "field \"id\" is empty");
        if (r.annotator.empty()) add(row, "annotator", CorpusErrorCode::SchemaViolation, "field \"annotator\" is empty");
        try {
            r.label = parse_label(cols[2]);
            if (format_label(*r.label) != cols[2]) {
                warn(row, "label", "label \"" + cols[2] + "\" is not canonical");
            }
        } catch (const LabelError& e) {
            add(row, "label", CorpusErrorCode::LabelParseError, label_violation_text(e));
        }
        if (!has_errors(row)) row.record = std::move(r);
        open = std::move(row);
    }
    close();
    return out;
}

}  // namespace

std::vector<DecodedRecord> decode_corpus(std::string_view data, CorpusFormat format, const DecodeOptions& options) {
    if (format == CorpusFormat::Tsv) return decode_tsv(data, options);
    std::vector<DecodedRecord> out;
    for (const auto& [line_no, line] : split_lines(data)) {
        if (text::is_blank(line)) continue;
        out.push_back(decode_jsonl_line(line, line_no, options));
    }
    return out;
}

CorpusCheck check_corpus(std::string_view data, CorpusFormat format, const DecodeOptions& options) {
    CorpusCheck check;
    check.records = decode_corpus(data, format, options);

    struct Seen {
        std::size_t line;
        const CorpusRecord* record;
    };
    std::map<std::string, Seen> pairs;
    std::set<std::pair<std::string, std::string>> judged;

    for (auto& decoded : check.records) {
        for (const auto& d : decoded.diagnostics) check.diagnostics.push_back(d);
        if (!decoded.record) continue;
        const auto& r = *decoded.record;

        auto [it, inserted] = pairs.try_emplace(r.id, Seen{decoded.line, &r});
        if (!inserted) {
            const auto& first = *it->second.record;
            if (first.text1 != r.text1 || first.text2 != r.text2 || first.source != r.source ||
                first.original_text1 != r.original_text1 || first.original_text2 != r.original_text2) {
                check.diagnostics.push_back({decoded.line, "id", CorpusErrorCode::SchemaViolation,
                                             "pair data for id " + r.id + " conflicts with line " +
                                                 std::to_string(it->second.line),
                                             false});
            }
        }
        if (r.label && !judged.insert({r.id, r.annotator}).second) {
            check.diagnostics.push_back({decoded.line, "annotator", CorpusErrorCode::DuplicateAnnotator,
                                         "annotator " + r.annotator + " labels " + r.id + " more than once; the last "
                                                                                          "record wins",
                                         true});
        }
        if (r.label && r.label->base() != BaseLabel::Skip) {
            for (const auto& finding : lint_pair(r.text1, r.text2)) {
                if (finding.kind != LintKind::IdenticalPair) continue;
                check.diagnostics.push_back({decoded.line, "label", CorpusErrorCode::SchemaViolation,
                                             "texts are identical but the label is " + format_label(*r.label) +
                                                 " rather than x",
                                             true});
            }
        }
    }

    for (const auto& d : check.diagnostics) (d.warning ? check.warning_count : check.error_count)++;
    return check;
}

}  // namespace parannot
