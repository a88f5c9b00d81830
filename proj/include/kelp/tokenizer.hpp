#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kelp/interner.hpp"

namespace kelp {

struct TokenizerConfig {
    // Characters treated as separators (and dropped) in addition to
    // whitespace runs. Opt-in: format-aware splitting is deliberately not
    // the default.
    std::string extra_delimiters;
};

struct TokenizedLine {
    std::vector<TokenHandle> tokens;
    std::uint64_t source_line_no = 0;

    std::size_t width() const { return tokens.size(); }
};

// Splits on whitespace runs (plus configured delimiters) and interns each
// token in order. Returns nullopt for a blank line: callers count those as
// skipped, never as errors. The input must already have its EOL stripped.
std::optional<TokenizedLine> tokenize(std::string_view line, const TokenizerConfig& cfg,
                                      Interner& interner, std::uint64_t line_no = 0);

// Same splitting rule without interning; shared by the generator and the
// evaluation harness so all components agree on token boundaries.
std::vector<std::string_view> split_tokens(std::string_view line, const TokenizerConfig& cfg);

} // namespace kelp
