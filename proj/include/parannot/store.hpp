#pragma once

// Embedded single-writer document store for pairs, annotations, batches and
// annotators. With a data directory, every mutation is appended to a JSONL
// journal that is replayed on open; without one the store is memory-only.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "parannot/codec.hpp"
#include "parannot/corpus.hpp"

namespace parannot {

struct PairFilter {
    std::optional<PairStatus> status;
    std::optional<PairSource> source;
    std::optional<std::string> batch_id;
};

struct RecordOutcome {
    Annotation annotation;
    bool replaced = false;  // the annotator had already labeled this pair
};

struct ImportOptions {
    bool strict = true;            // reject the whole stream on any error
    bool allow_unlabeled = false;  // accept bare candidate records
    std::optional<std::string> batch_id;  // collect imported pair ids into this batch
    int required_annotators = 1;
};

struct ImportReport {
    std::size_t records = 0;  // decoded non-blank records
    std::size_t pairs_created = 0;
    std::size_t annotations_recorded = 0;
    std::size_t skipped = 0;
    bool applied = false;
    std::vector<Diagnostic> diagnostics;
};

struct ExportScope {
    std::optional<std::string> batch_id;  // all pairs when empty
};

class Store {
public:
    Store();
    explicit Store(std::filesystem::path data_dir);

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Upsert keyed by id. A new pair must come with version 0 and gets a
    /// minted id when none is given; an update must carry the stored
    /// version. The stored version is the incoming one plus one. Status is
    /// owned by the store and ignored on input.
    CandidatePair put_pair(CandidatePair pair);
    CandidatePair get_pair(std::string_view id) const;
    std::vector<CandidatePair> list_pairs(const PairFilter& filter = {}) const;
    std::size_t pair_count() const;

    /// Marks a pending pair claimed or a claimed pair pending again. No-op on
    /// annotated pairs.
    void set_claimed(std::string_view pair_id, bool claimed);

    Batch put_batch(Batch batch);
    Batch get_batch(std::string_view id) const;
    std::vector<Batch> list_batches() const;
    void finalize_batch(std::string_view id);

    void put_annotator(Annotator annotator);
    std::optional<Annotator> find_annotator(std::string_view id) const;
    std::vector<Annotator> list_annotators() const;

    /// Appends, or replaces the annotator's earlier annotation of the pair.
    /// The pair becomes annotated once the required number of distinct
    /// annotators have submitted.
    RecordOutcome record_annotation(Annotation annotation);
    std::vector<Annotation> annotations_for(std::string_view pair_id) const;
    std::size_t annotation_count() const;

    /// Largest required_annotators among the batches holding the pair, or 1.
    int required_annotators(std::string_view pair_id) const;

    std::string export_corpus(const ExportScope& scope, CorpusFormat format) const;
    ImportReport import_corpus(std::string_view data, CorpusFormat format, const ImportOptions& options = {});

private:
    struct PairEntry {
        CandidatePair pair;
        std::vector<Annotation> annotations;
        std::vector<std::string> batches;
    };

    void replay();
    void journal(std::string_view kind, const std::string& payload_json);

    // The *_locked helpers expect the caller to hold mutex_ exclusively.
    CandidatePair put_pair_locked(CandidatePair pair);
    RecordOutcome record_annotation_locked(Annotation annotation);
    Batch put_batch_locked(Batch batch);
    void refresh_status_locked(PairEntry& entry);
    int required_locked(const PairEntry& entry) const;
    std::string mint_id_locked();

    std::optional<std::filesystem::path> journal_path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, PairEntry> pairs_;
    std::vector<std::string> pair_order_;
    std::unordered_map<std::string, Batch> batches_;
    std::vector<std::string> batch_order_;
    std::unordered_map<std::string, Annotator> annotators_;
    std::vector<std::string> annotator_order_;
    std::size_t annotation_total_ = 0;
    std::size_t next_id_ = 1;
    bool replaying_ = false;
};

}  // namespace parannot
