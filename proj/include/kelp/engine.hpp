#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kelp/evolution.hpp"
#include "kelp/freq_map.hpp"
#include "kelp/interner.hpp"
#include "kelp/tokenizer.hpp"
#include "kelp/tree.hpp"

namespace kelp {

struct EngineConfig {
    TokenizerConfig tokenizer;
    EvolutionConfig evolution;
    SlopeMode slope_mode = SlopeMode::LnFrequency;
    bool trim_enabled = true;
};

struct BatchStats {
    std::uint64_t lines_in = 0;
    std::uint64_t accepted = 0;
    std::uint64_t skipped_blank = 0;
    std::uint64_t new_buckets = 0;
    std::uint64_t validations_changed = 0;
    std::uint64_t reeval_passes = 0;
    std::uint64_t rows_trimmed = 0;
    std::uint64_t folds = 0;
};

struct EngineTotals {
    std::uint64_t lines_in = 0;
    std::uint64_t accepted = 0;
    std::uint64_t skipped_blank = 0;
    std::uint64_t validations_changed = 0;
    std::uint64_t reeval_passes = 0;
    std::uint64_t rows_trimmed = 0;
};

struct AuditReport {
    std::uint64_t live_tokens = 0;    // interner live_count
    std::uint64_t expected_live = 0;  // |frequency-map tokens ∪ structure-held tokens|
    std::uint64_t fm_distinct = 0;    // tokens with nonzero frequency in some map
    std::uint64_t structure_only = 0; // held only by static tree structure
    bool refcounts_ok = true;         // per-token refcount matches its sources

    bool ok() const { return refcounts_ok && live_tokens == expected_live; }
};

struct EngineMatch {
    bool matched_shape = false;
    bool exact = false;
    std::uint64_t event_id = 0;
    std::string template_str;
    std::vector<std::string> variables;
};

struct Bucket {
    ColumnFrequencyMap fm;
    RootNode root;
    std::uint64_t lines = 0;
    std::uint64_t lines_since_reeval = 0;
    bool dirty = false;

    Bucket(std::uint32_t width, Interner& interner) : fm(width, interner), root(width) {}
};

// Single-pass pipeline: tokenize, segregate by token count, update the
// bucket's frequency map, push into its tree; per batch: validate roots,
// re-evaluate on cadence (or when flagged), trim. Single-writer.
class Engine {
public:
    explicit Engine(EngineConfig cfg = {});
    ~Engine();

    // One call = one batch: root validation runs at its end.
    BatchStats ingest_batch(std::span<const std::string> lines);

    // Settles every bucket (final validation + re-evaluation) and freezes
    // the template index used by match().
    void finalize();

    const Interner& interner() const { return interner_; }
    const std::map<std::uint32_t, Bucket>& buckets() const { return buckets_; }
    std::map<std::uint32_t, Bucket>& buckets() { return buckets_; }
    const EngineTotals& totals() const { return totals_; }
    const EngineConfig& config() const { return cfg_; }

    std::uint64_t represented_total() const;

    std::vector<ParsedTemplate> raw_templates() const;
    // Per-path templates merged by event id, sorted by count desc / text asc.
    std::vector<ParsedTemplate> aggregated_templates() const;

    // event_id <TAB> [count <TAB>] template, one per line, stable order.
    void dump_templates(std::ostream& os, bool with_counts = true) const;
    void dump_freqmaps(std::ostream& os) const;

    // Per-line matching against the finalized tree.
    EngineMatch match(std::string_view line) const;

    AuditReport audit() const;

private:
    void process_line(std::string_view raw);
    void end_batch(BatchStats& st, bool force_reeval);

    EngineConfig cfg_;
    Interner interner_;
    std::map<std::uint32_t, Bucket> buckets_;
    std::map<std::uint32_t, TemplateIndex> indexes_;
    EngineTotals totals_;
    TokenizedLine scratch_;
    std::uint64_t line_no_ = 0;
    bool finalized_ = false;
};

} // namespace kelp
