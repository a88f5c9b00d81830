#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <doctest.h>

#include "kelp/engine.hpp"
#include "kelp/evolution.hpp"
#include "kelp/rng.hpp"
#include "kelp/tokenizer.hpp"
#include "kelp/tree.hpp"

namespace kelp::test {

// One bucket with its own interner for direct tree/evolution tests.
struct TestBucket {
    Interner interner;
    ColumnFrequencyMap fm;
    RootNode root;
    TokenizerConfig tok;

    explicit TestBucket(std::uint32_t width) : fm(width, interner), root(width) {}

    TokenizedLine line(const std::string& s) {
        auto tl = tokenize(s, tok, interner);
        REQUIRE(tl.has_value());
        REQUIRE(tl->tokens.size() == root.width);
        return *tl;
    }

    void push(const std::string& s) {
        auto tl = line(s);
        fm.record(tl);
        push_line(root, tl, interner);
    }

    ValidationOutcome validate() { return validate_root(root, fm, interner); }

    void reeval_all(const EvolutionConfig& cfg) {
        root.trunk = reeval(std::move(root.trunk), cfg, interner);
        root.rest = reeval(std::move(root.rest), cfg, interner);
        root.reeval_flag = false;
    }

    std::vector<std::string> rendered_templates() const {
        std::vector<std::string> out;
        for (const auto& t : extract_templates(root, interner)) out.push_back(t.render());
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Random store over `cols`, values drawn from per-column pools.
inline RowStore random_store(Rng& rng, Interner& interner,
                             const std::vector<std::uint32_t>& cols, std::uint64_t rows,
                             std::uint64_t pool_size) {
    RowStore store(cols);
    std::vector<TokenHandle> row(cols.size());
    for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::string tok =
                "v" + std::to_string(cols[c]) + "_" + std::to_string(rng.below(pool_size));
            row[c] = interner.intern(tok);
        }
        store.append_row(row);
    }
    return store;
}

// Synthetic mini-corpus: `n_templates` templates of the given width; each
// column is either a per-template literal or a slot filled from a pool of
// `slot_pool` values. Lines are deterministic in rng.
struct MiniCorpus {
    std::vector<std::string> lines;
};

inline MiniCorpus make_corpus(Rng& rng, std::uint32_t width, std::uint32_t n_templates,
                              std::uint64_t n_lines, std::uint64_t slot_pool) {
    // Per template: pick slot positions.
    std::vector<std::vector<bool>> is_slot(n_templates, std::vector<bool>(width, false));
    for (std::uint32_t t = 0; t < n_templates; ++t)
        for (std::uint32_t c = 1; c < width; ++c) // col 0 stays literal
            is_slot[t][c] = rng.below(3) == 0;

    MiniCorpus corpus;
    corpus.lines.reserve(n_lines);
    for (std::uint64_t i = 0; i < n_lines; ++i) {
        std::uint32_t t = static_cast<std::uint32_t>(rng.below(n_templates));
        std::string line;
        for (std::uint32_t c = 0; c < width; ++c) {
            if (c) line.push_back(' ');
            if (is_slot[t][c])
                line += "s" + std::to_string(rng.below(slot_pool));
            else
                line += "t" + std::to_string(t) + "c" + std::to_string(c);
        }
        corpus.lines.push_back(std::move(line));
    }
    return corpus;
}

// Builds a bucket tree from random pushes with interleaved restructuring.
inline void churn(TestBucket& bucket, Rng& rng, const MiniCorpus& corpus,
                  const EvolutionConfig& cfg) {
    std::uint64_t batch = 0;
    for (const auto& l : corpus.lines) {
        bucket.push(l);
        if (++batch % 64 == 0) {
            bucket.validate();
            if (rng.below(2) == 0) bucket.reeval_all(cfg);
        }
    }
    bucket.validate();
}

} // namespace kelp::test
