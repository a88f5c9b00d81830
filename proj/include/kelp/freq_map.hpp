#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "kelp/interner.hpp"
#include "kelp/tokenizer.hpp"

namespace kelp {

// How the decay slope feeding the branching threshold is computed.
//   LnFrequency  (default): least-squares slope of ln(frequency) vs rank
//                over the top-3 per-column maxima. Magnitudes stay small,
//                so e^|slope| is usable directly.
//   RawFrequency (alternative reading): least-squares slope of the raw
//                frequencies vs rank; the exponent is clamped to avoid
//                overflow. Kept selectable for experimentation.
enum class SlopeMode { LnFrequency, RawFrequency };

struct ThresholdReport {
    std::array<std::uint64_t, 3> top3{0, 0, 0}; // descending, padded by repetition
    double slope = 0.0;                         // least-squares, <= 0
    std::uint64_t threshold = 1;                // T >= 1
    std::uint64_t global_max = 0;
};

// Pure helper: threshold from the three largest per-column maxima.
ThresholdReport threshold_from_top3(std::array<double, 3> top3,
                                    SlopeMode mode = SlopeMode::LnFrequency);

// Per-bucket column-wise token statistics. Owns the interner refcounts for
// every recorded occurrence: record retains, decrement releases.
class ColumnFrequencyMap {
public:
    ColumnFrequencyMap(std::size_t width, Interner& interner)
        : cols_(width), interner_(&interner) {}

    std::size_t width() const { return cols_.size(); }
    std::uint64_t total_lines() const { return total_lines_; }

    void record(const TokenizedLine& line);

    // Subtracts n occurrences of token at column; removes zero entries and
    // releases the matching interner references. Underflow is an invariant
    // violation, never a clamp.
    void decrement(std::size_t column, TokenHandle token, std::uint64_t n);

    // Called once per discarded line after its per-column decrements.
    void note_discarded_lines(std::uint64_t n);

    ThresholdReport compute_threshold(SlopeMode mode = SlopeMode::LnFrequency) const;

    // Columns whose dominant token frequency f satisfies f * T >= global_max,
    // paired with that dominant token, ordered by column index.
    std::vector<std::pair<std::uint32_t, TokenHandle>>
    root_eligible_columns(const ThresholdReport& report) const;

    std::uint64_t count(std::size_t column, TokenHandle token) const;
    std::uint64_t column_sum(std::size_t column) const;
    const std::unordered_map<std::uint64_t, std::uint64_t>& column(std::size_t c) const {
        return cols_[c];
    }

    // Dominant token of a column: highest count, ties broken by lowest
    // handle id so results never depend on hash iteration order.
    std::pair<TokenHandle, std::uint64_t> column_max(std::size_t column) const;

    // TSV dump: col <TAB> token <TAB> count, columns ascending, counts
    // descending, ties by first interning order.
    void dump_tsv(std::ostream& os) const;

private:
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> cols_;
    Interner* interner_;
    std::uint64_t total_lines_ = 0;
};

} // namespace kelp
