#pragma once

#include <cstdint>
#include <vector>

#include "kelp/freq_map.hpp"
#include "kelp/tree.hpp"

namespace kelp {

struct EvolutionConfig {
    // Max distinct values a column may show and still become static branches.
    std::uint64_t branch_threshold = 8;
    // Raw rows a dynamic leaf may buffer before the oldest are rolled over.
    std::uint64_t trim_capacity = 4096;
    // Lines between re-evaluation passes (root validation runs every batch).
    std::uint64_t reeval_interval = 10000;

    void validate() const;
};

// Split operation: extracts `col` into one StaticNode per distinct value,
// each carrying exactly the rows that held that value (col removed from
// their stores). Pulling from nested static structure bubbles the column up,
// pushing the current level's constraints into the pulled nodes' children.
// Pulling the column a branch level already constrains is the identity.
std::vector<StaticNode> pull(ChildSet children, std::uint32_t col, Interner& interner);

struct ValidationOutcome {
    bool changed = false;
    std::vector<std::uint32_t> promoted;
    std::vector<std::uint32_t> demoted;
    ThresholdReport report;
};

// Re-selects the static backbone from the frequency map. When the eligible
// set differs from the current constraints the bucket tree is flattened and
// re-split around the new backbone (counts preserved; learned structure is
// re-derived by the next re-evaluation) and the reeval flag is set.
ValidationOutcome validate_root(RootNode& root, const ColumnFrequencyMap& fm,
                                Interner& interner,
                                SlopeMode mode = SlopeMode::LnFrequency);

// Recursive restructuring. Per region it finds the unconstrained column with
// the lowest distinct-value cardinality; a column qualifies only when it
// shows repetition (cardinality < represented rows) and stays within
// branch_threshold. The best qualifier is pulled to the front; regions with
// variance but no qualifier collapse back into a single dynamic leaf.
ChildSet reeval(ChildSet cs, const EvolutionConfig& cfg, Interner& interner);

struct TrimStats {
    std::uint64_t leaves_trimmed = 0;
    std::uint64_t rows_discarded = 0;
    std::uint64_t folds = 0;
};

// Bounded-memory rollover: leaves over capacity discard their oldest rows
// (frequency map and interner references decremented to match); leaves whose
// every column is single-valued fold into a static chain ending in a bare
// counter instead, preserving their counts. The extracted template set is
// unchanged by trimming.
TrimStats trim(RootNode& root, ColumnFrequencyMap& fm, Interner& interner,
               const EvolutionConfig& cfg);

} // namespace kelp
