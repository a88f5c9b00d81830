#include "kelp/tokenizer.hpp"

#include "kelp/util.hpp"

namespace kelp {

static bool is_sep(char c, const TokenizerConfig& cfg) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') return true;
    return cfg.extra_delimiters.find(c) != std::string::npos;
}

std::vector<std::string_view> split_tokens(std::string_view line, const TokenizerConfig& cfg) {
    std::vector<std::string_view> out;
    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        while (i < n && is_sep(line[i], cfg)) ++i;
        size_t start = i;
        while (i < n && !is_sep(line[i], cfg)) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<TokenizedLine> tokenize(std::string_view line, const TokenizerConfig& cfg,
                                      Interner& interner, std::uint64_t line_no) {
    line = strip_eol(line);
    TokenizedLine out;
    out.source_line_no = line_no;

    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        while (i < n && is_sep(line[i], cfg)) ++i;
        size_t start = i;
        while (i < n && !is_sep(line[i], cfg)) ++i;
        if (i > start) out.tokens.push_back(interner.intern(line.substr(start, i - start)));
    }
    if (out.tokens.empty()) return std::nullopt;
    return out;
}

} // namespace kelp
