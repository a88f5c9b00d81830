#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kelp {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64_byte(unsigned char c, std::uint64_t seed) {
    seed ^= c;
    seed *= kFnvPrime;
    return seed;
}

std::string to_hex16(std::uint64_t v);

// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string_view> split_whitespace(std::string_view line);

// Strips one trailing "\n" or "\r\n".
std::string_view strip_eol(std::string_view line);

bool is_blank(std::string_view line);

// Replaces invalid UTF-8 byte sequences with U+FFFD. Returns the input
// unchanged (no copy) when it is already valid.
std::string utf8_sanitize(std::string_view in);
bool utf8_valid(std::string_view in);

// Minimal CSV: quotes a field iff it contains a comma, quote, or newline.
std::string csv_quote(std::string_view field);
// Parses one CSV record (no embedded newlines in our files).
std::vector<std::string> csv_split(std::string_view record);

} // namespace kelp
