#include "parannot/store.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace parannot {

using nlohmann::json;

namespace {

json to_json(const CandidatePair& p) {
    json j = {{"id", p.id},
              {"text1", p.text1},
              {"text2", p.text2},
              {"source", to_string(p.source)},
              {"document_refs", p.document_refs},
              {"status", to_string(p.status)},
              {"version", p.version}};
    if (p.original_text1) j["original_text1"] = *p.original_text1;
    if (p.original_text2) j["original_text2"] = *p.original_text2;
    return j;
}

CandidatePair pair_from_json(const json& j) {
    CandidatePair p;
    p.id = j.at("id").get<std::string>();
    p.text1 = j.at("text1").get<std::string>();
    p.text2 = j.at("text2").get<std::string>();
    p.source = parse_source(j.at("source").get<std::string>()).value();
    p.document_refs = j.at("document_refs").get<std::vector<std::string>>();
    p.status = parse_status(j.at("status").get<std::string>()).value();
    p.version = j.at("version").get<std::uint64_t>();
    if (j.contains("original_text1")) p.original_text1 = j["original_text1"].get<std::string>();
    if (j.contains("original_text2")) p.original_text2 = j["original_text2"].get<std::string>();
    return p;
}

json to_json(const Annotation& a) {
    json rewrites = json::array();
    for (const auto& rw : a.rewrites) rewrites.push_back({rw.text1, rw.text2});
    json j = {{"pair_id", a.pair_id},
              {"annotator_id", a.annotator_id},
              {"label", format_label(a.label)},
              {"rewrites", rewrites},
              {"created_at", format_timestamp(a.created_at)}};
    if (a.note) j["note"] = *a.note;
    return j;
}

Annotation annotation_from_json(const json& j) {
    Annotation a{j.at("pair_id").get<std::string>(), j.at("annotator_id").get<std::string>(),
                 parse_label(j.at("label").get<std::string>()), {}, std::nullopt,
                 parse_timestamp(j.at("created_at").get<std::string>()).value()};
    for (const auto& rw : j.at("rewrites")) a.rewrites.push_back({rw.at(0).get<std::string>(), rw.at(1).get<std::string>()});
    if (j.contains("note")) a.note = j["note"].get<std::string>();
    return a;
}

json to_json(const Batch& b) {
    return {{"id", b.id},
            {"pair_ids", b.pair_ids},
            {"required_annotators", b.required_annotators},
            {"finalized", b.finalized}};
}

Batch batch_from_json(const json& j) {
    return {j.at("id").get<std::string>(), j.at("pair_ids").get<std::vector<std::string>>(),
            j.at("required_annotators").get<int>(), j.at("finalized").get<bool>()};
}

[[noreturn]] void throw_violations(std::string_view what, std::vector<Violation> violations) {
    std::string msg(what);
    for (const auto& v : violations) msg += "; " + v.field + ": " + v.message;
    const auto code = violations.front().code;
    throw CorpusError(code, msg, std::move(violations));
}

CorpusRecord to_record(const CandidatePair& p, const Annotation& a) {
    CorpusRecord r;
    r.id = p.id;
    r.text1 = p.text1;
    r.text2 = p.text2;
    r.label = a.label;
    r.source = p.source;
    r.original_text1 = p.original_text1;
    r.original_text2 = p.original_text2;
    r.annotator = a.annotator_id;
    r.rewrites = a.rewrites;
    r.note = a.note;
    return r;
}

}  // namespace

Store::Store() = default;

Store::Store(std::filesystem::path data_dir) {
    std::filesystem::create_directories(data_dir);
    journal_path_ = data_dir / "journal.jsonl";
    replay();
}

void Store::replay() {
    std::ifstream in(*journal_path_);
    if (!in) return;
    std::unique_lock lock(mutex_);
    replaying_ = true;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json entry;
        try {
            entry = json::parse(line);
        } catch (const json::parse_error&) {
            // A torn final write is dropped; anything earlier is corruption.
            if (in.peek() == std::char_traits<char>::eof()) break;
            replaying_ = false;
            throw CorpusError(CorpusErrorCode::DecodeError,
                              "corrupt journal " + journal_path_->string() + " at line " + std::to_string(line_no));
        }
        const auto kind = entry.at("kind").get<std::string>();
        const auto& data = entry.at("data");
        if (kind == "pair") {
            auto pair = pair_from_json(data);
            auto [it, inserted] = pairs_.try_emplace(pair.id);
            if (inserted) pair_order_.push_back(pair.id);
            it->second.pair = std::move(pair);
        } else if (kind == "annotation") {
            auto a = annotation_from_json(data);
            auto& list = pairs_.at(a.pair_id).annotations;
            const auto it = std::find_if(list.begin(), list.end(),
                                         [&](const Annotation& x) { return x.annotator_id == a.annotator_id; });
            if (it != list.end()) {
                *it = std::move(a);
            } else {
                list.push_back(std::move(a));
                ++annotation_total_;
            }
        } else if (kind == "batch") {
            auto batch = batch_from_json(data);
            auto [it, inserted] = batches_.try_emplace(batch.id);
            if (inserted) batch_order_.push_back(batch.id);
            for (const auto& pid : batch.pair_ids) {
                auto& owners = pairs_.at(pid).batches;
                if (std::find(owners.begin(), owners.end(), batch.id) == owners.end()) owners.push_back(batch.id);
            }
            it->second = std::move(batch);
        } else if (kind == "annotator") {
            Annotator a{data.at("id").get<std::string>(), data.at("token").get<std::string>()};
            if (!annotators_.count(a.id)) annotator_order_.push_back(a.id);
            annotators_[a.id] = std::move(a);
        } else if (kind == "next_id") {
            next_id_ = data.get<std::size_t>();
        }
    }
    replaying_ = false;
}

void Store::journal(std::string_view kind, const std::string& payload_json) {
    if (!journal_path_ || replaying_) return;
    std::ofstream out(*journal_path_, std::ios::app | std::ios::binary);
    out << R"({"kind":")" << kind << R"(","data":)" << payload_json << "}\n";
    out.flush();
    if (!out) throw CorpusError(CorpusErrorCode::DecodeError, "cannot append to " + journal_path_->string());
}

std::string Store::mint_id_locked() {
    std::string id;
    do {
        std::ostringstream os;
        os << "pair-" << std::setw(6) << std::setfill('0') << next_id_++;
        id = os.str();
    } while (pairs_.count(id));
    journal("next_id", std::to_string(next_id_));
    return id;
}

int Store::required_locked(const PairEntry& entry) const {
    int required = 1;
    for (const auto& bid : entry.batches) required = std::max(required, batches_.at(bid).required_annotators);
    return required;
}

void Store::refresh_status_locked(PairEntry& entry) {
    const auto distinct = entry.annotations.size();  // one annotation per annotator
    PairStatus next = entry.pair.status;
    if (static_cast<int>(distinct) >= required_locked(entry)) {
        next = PairStatus::Annotated;
    } else if (entry.pair.status == PairStatus::Annotated) {
        next = PairStatus::Pending;
    }
    if (next != entry.pair.status) {
        entry.pair.status = next;
        ++entry.pair.version;
        journal("pair", to_json(entry.pair).dump());
    }
}

CandidatePair Store::put_pair(CandidatePair pair) {
    std::unique_lock lock(mutex_);
    return put_pair_locked(std::move(pair));
}

CandidatePair Store::put_pair_locked(CandidatePair pair) {
    if (auto v = check_pair(pair); !v.empty()) throw_violations("invalid pair " + pair.id, std::move(v));

    if (pair.id.empty()) {
        if (pair.version != 0) throw CorpusError(CorpusErrorCode::VersionConflict, "new pair must have version 0");
        pair.id = mint_id_locked();
    }

    auto it = pairs_.find(pair.id);
    if (it == pairs_.end()) {
        if (pair.version != 0) {
            throw CorpusError(CorpusErrorCode::VersionConflict,
                              "pair " + pair.id + " does not exist; a new pair must have version 0");
        }
        pair.status = PairStatus::Pending;
        pair.version = 1;
        it = pairs_.emplace(pair.id, PairEntry{pair, {}, {}}).first;
        pair_order_.push_back(pair.id);
    } else {
        auto& stored = it->second.pair;
        if (pair.version != stored.version) {
            throw CorpusError(CorpusErrorCode::VersionConflict,
                              "stale version " + std::to_string(pair.version) + " for pair " + pair.id +
                                  " (stored " + std::to_string(stored.version) + ")");
        }
        pair.status = stored.status;
        pair.version = stored.version + 1;
        stored = pair;
    }
    journal("pair", to_json(it->second.pair).dump());
    return it->second.pair;
}

CandidatePair Store::get_pair(std::string_view id) const {
    std::shared_lock lock(mutex_);
    const auto it = pairs_.find(std::string(id));
    if (it == pairs_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no pair " + std::string(id));
    return it->second.pair;
}

std::vector<CandidatePair> Store::list_pairs(const PairFilter& filter) const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> ids;
    if (filter.batch_id) {
        const auto b = batches_.find(*filter.batch_id);
        if (b == batches_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no batch " + *filter.batch_id);
        ids = b->second.pair_ids;
    } else {
        ids = pair_order_;
    }
    std::vector<CandidatePair> out;
    for (const auto& id : ids) {
        const auto& p = pairs_.at(id).pair;
        if (filter.status && p.status != *filter.status) continue;
        if (filter.source && p.source != *filter.source) continue;
        out.push_back(p);
    }
    return out;
}

std::size_t Store::pair_count() const {
    std::shared_lock lock(mutex_);
    return pairs_.size();
}

void Store::set_claimed(std::string_view pair_id, bool claimed) {
    std::unique_lock lock(mutex_);
    const auto it = pairs_.find(std::string(pair_id));
    if (it == pairs_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no pair " + std::string(pair_id));
    auto& p = it->second.pair;
    if (p.status == PairStatus::Annotated) return;
    const auto next = claimed ? PairStatus::Claimed : PairStatus::Pending;
    if (p.status == next) return;
    p.status = next;
    ++p.version;
    journal("pair", to_json(p).dump());
}

Batch Store::put_batch(Batch batch) {
    std::unique_lock lock(mutex_);
    return put_batch_locked(std::move(batch));
}

Batch Store::put_batch_locked(Batch batch) {
    if (auto v = check_batch(batch); !v.empty()) throw_violations("invalid batch " + batch.id, std::move(v));
    for (const auto& pid : batch.pair_ids) {
        if (!pairs_.count(pid)) throw CorpusError(CorpusErrorCode::NotFound, "batch refers to unknown pair " + pid);
    }
    auto [it, inserted] = batches_.try_emplace(batch.id);
    if (inserted) batch_order_.push_back(batch.id);
    // Membership only grows; pairs dropped from a batch keep their history.
    it->second = batch;
    journal("batch", to_json(batch).dump());
    for (const auto& pid : batch.pair_ids) {
        auto& entry = pairs_.at(pid);
        if (std::find(entry.batches.begin(), entry.batches.end(), batch.id) == entry.batches.end()) {
            entry.batches.push_back(batch.id);
        }
        refresh_status_locked(entry);
    }
    return batch;
}

Batch Store::get_batch(std::string_view id) const {
    std::shared_lock lock(mutex_);
    const auto it = batches_.find(std::string(id));
    if (it == batches_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no batch " + std::string(id));
    return it->second;
}

std::vector<Batch> Store::list_batches() const {
    std::shared_lock lock(mutex_);
    std::vector<Batch> out;
    for (const auto& id : batch_order_) out.push_back(batches_.at(id));
    return out;
}

void Store::finalize_batch(std::string_view id) {
    std::unique_lock lock(mutex_);
    const auto it = batches_.find(std::string(id));
    if (it == batches_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no batch " + std::string(id));
    it->second.finalized = true;
    journal("batch", to_json(it->second).dump());
}

void Store::put_annotator(Annotator annotator) {
    if (annotator.id.empty()) throw CorpusError(CorpusErrorCode::SchemaViolation, "annotator id is empty");
    std::unique_lock lock(mutex_);
    if (!annotators_.count(annotator.id)) annotator_order_.push_back(annotator.id);
    journal("annotator", json{{"id", annotator.id}, {"token", annotator.token}}.dump());
    annotators_[annotator.id] = std::move(annotator);
}

std::optional<Annotator> Store::find_annotator(std::string_view id) const {
    std::shared_lock lock(mutex_);
    const auto it = annotators_.find(std::string(id));
    if (it == annotators_.end()) return std::nullopt;
    return it->second;
}

std::vector<Annotator> Store::list_annotators() const {
    std::shared_lock lock(mutex_);
    std::vector<Annotator> out;
    for (const auto& id : annotator_order_) out.push_back(annotators_.at(id));
    return out;
}

RecordOutcome Store::record_annotation(Annotation annotation) {
    std::unique_lock lock(mutex_);
    return record_annotation_locked(std::move(annotation));
}

RecordOutcome Store::record_annotation_locked(Annotation annotation) {
    const auto it = pairs_.find(annotation.pair_id);
    if (it == pairs_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no pair " + annotation.pair_id);
    auto& entry = it->second;
    if (annotation.annotator_id.empty()) {
        throw CorpusError(CorpusErrorCode::SchemaViolation, "annotation without annotator id");
    }
    if (auto v = check_rewrites(annotation.label, annotation.rewrites, entry.pair.text1, entry.pair.text2);
        !v.empty()) {
        throw_violations("invalid rewrite for pair " + annotation.pair_id, std::move(v));
    }
    if (annotation.created_at == Timestamp{}) annotation.created_at = now_seconds();

    auto& list = entry.annotations;
    const auto existing = std::find_if(list.begin(), list.end(), [&](const Annotation& a) {
        return a.annotator_id == annotation.annotator_id;
    });
    RecordOutcome outcome{annotation, existing != list.end()};
    if (outcome.replaced) {
        for (const auto& bid : entry.batches) {
            if (batches_.at(bid).finalized) {
                throw CorpusError(CorpusErrorCode::BatchFinalized,
                                  "batch " + bid + " is finalized; " + annotation.annotator_id +
                                      " can no longer replace the annotation of " + annotation.pair_id);
            }
        }
        *existing = annotation;
    } else {
        list.push_back(annotation);
        ++annotation_total_;
    }
    journal("annotation", to_json(annotation).dump());
    refresh_status_locked(entry);
    return outcome;
}

std::vector<Annotation> Store::annotations_for(std::string_view pair_id) const {
    std::shared_lock lock(mutex_);
    const auto it = pairs_.find(std::string(pair_id));
    if (it == pairs_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no pair " + std::string(pair_id));
    return it->second.annotations;
}

std::size_t Store::annotation_count() const {
    std::shared_lock lock(mutex_);
    return annotation_total_;
}

int Store::required_annotators(std::string_view pair_id) const {
    std::shared_lock lock(mutex_);
    const auto it = pairs_.find(std::string(pair_id));
    if (it == pairs_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no pair " + std::string(pair_id));
    return required_locked(it->second);
}

std::string Store::export_corpus(const ExportScope& scope, CorpusFormat format) const {
    std::shared_lock lock(mutex_);
    const std::vector<std::string>* ids = &pair_order_;
    if (scope.batch_id) {
        const auto b = batches_.find(*scope.batch_id);
        if (b == batches_.end()) throw CorpusError(CorpusErrorCode::NotFound, "no batch " + *scope.batch_id);
        ids = &b->second.pair_ids;
    }
    std::string out;
    if (format == CorpusFormat::Tsv) {
        out += kTsvHeader;
        out += '\n';
    }
    for (const auto& id : *ids) {
        const auto& entry = pairs_.at(id);
        for (const auto& a : entry.annotations) {
            const auto record = to_record(entry.pair, a);
            if (format == CorpusFormat::Jsonl) {
                out += encode_jsonl(record);
                out += '\n';
            } else {
                for (const auto& row : encode_tsv_rows(record)) {
                    out += row;
                    out += '\n';
                }
            }
        }
    }
    return out;
}

ImportReport Store::import_corpus(std::string_view data, CorpusFormat format, const ImportOptions& options) {
    ImportReport report;
    auto check = check_corpus(data, format, DecodeOptions{options.allow_unlabeled});
    report.diagnostics = check.diagnostics;

    std::unique_lock lock(mutex_);

    // Records whose pair already exists must agree with the stored pair.
    std::set<std::size_t> bad_lines;
    for (const auto& d : report.diagnostics) {
        if (!d.warning) bad_lines.insert(d.line);
    }
    report.records = check.records.size();
    for (const auto& decoded : check.records) {
        if (!decoded.record) continue;
        const auto& r = *decoded.record;
        const auto it = pairs_.find(r.id);
        if (it == pairs_.end()) continue;
        const auto& p = it->second.pair;
        if (p.text1 != r.text1 || p.text2 != r.text2 || p.source != r.source || p.original_text1 != r.original_text1 ||
            p.original_text2 != r.original_text2) {
            report.diagnostics.push_back({decoded.line, "id", CorpusErrorCode::SchemaViolation,
                                          "pair " + r.id + " already exists with different data", false});
            bad_lines.insert(decoded.line);
        }
    }
    std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });

    if (options.strict && !bad_lines.empty()) {
        report.skipped = report.records;
        return report;
    }

    std::vector<std::string> batch_ids;
    std::set<std::string> in_batch;
    for (const auto& decoded : check.records) {
        if (!decoded.record || bad_lines.count(decoded.line)) {
            ++report.skipped;
            continue;
        }
        const auto& r = *decoded.record;
        if (!pairs_.count(r.id)) {
            CandidatePair p;
            p.id = r.id;
            p.text1 = r.text1;
            p.text2 = r.text2;
            p.original_text1 = r.original_text1;
            p.original_text2 = r.original_text2;
            p.source = r.source;
            put_pair_locked(std::move(p));
            ++report.pairs_created;
        }
        if (in_batch.insert(r.id).second) batch_ids.push_back(r.id);
        if (!r.label) continue;
        try {
            record_annotation_locked(Annotation{r.id, r.annotator, *r.label, r.rewrites, r.note, {}});
            ++report.annotations_recorded;
        } catch (const CorpusError& e) {
            report.diagnostics.push_back({decoded.line, "", e.code(), e.what(), false});
            ++report.skipped;
        }
    }

    if (options.batch_id) {
        Batch batch;
        batch.id = *options.batch_id;
        batch.required_annotators = options.required_annotators;
        if (const auto existing = batches_.find(batch.id); existing != batches_.end()) {
            batch.pair_ids = existing->second.pair_ids;
            batch.finalized = existing->second.finalized;
        }
        for (const auto& id : batch_ids) {
            if (std::find(batch.pair_ids.begin(), batch.pair_ids.end(), id) == batch.pair_ids.end()) {
                batch.pair_ids.push_back(id);
            }
        }
        put_batch_locked(std::move(batch));
    }
    report.applied = true;
    return report;
}

}  // namespace parannot
