#include "kelp/util.hpp"

namespace kelp {

std::string to_hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

static bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        while (i < n && is_ws(line[i])) ++i;
        size_t start = i;
        while (i < n && !is_ws(line[i])) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::string_view strip_eol(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

bool is_blank(std::string_view line) {
    for (char c : line)
        if (!is_ws(c)) return false;
    return true;
}

bool utf8_valid(std::string_view in) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(in.data());
    size_t n = in.size();
    size_t i = 0;
    while (i < n) {
        unsigned char c = p[i];
        if (c < 0x80) {
            ++i;
        } else if ((c & 0xe0) == 0xc0) {
            if (c < 0xc2 || i + 1 >= n || (p[i + 1] & 0xc0) != 0x80) return false;
            i += 2;
        } else if ((c & 0xf0) == 0xe0) {
            if (i + 2 >= n || (p[i + 1] & 0xc0) != 0x80 || (p[i + 2] & 0xc0) != 0x80) return false;
            if (c == 0xe0 && p[i + 1] < 0xa0) return false;
            if (c == 0xed && p[i + 1] >= 0xa0) return false;
            i += 3;
        } else if ((c & 0xf8) == 0xf0) {
            if (c > 0xf4 || i + 3 >= n) return false;
            for (int k = 1; k <= 3; ++k)
                if ((p[i + static_cast<size_t>(k)] & 0xc0) != 0x80) return false;
            if (c == 0xf0 && p[i + 1] < 0x90) return false;
            if (c == 0xf4 && p[i + 1] >= 0x90) return false;
            i += 4;
        } else {
            return false;
        }
    }
    return true;
}

std::string utf8_sanitize(std::string_view in) {
    if (utf8_valid(in)) return std::string(in);
    static const char* replacement = "\xef\xbf\xbd"; // U+FFFD
    std::string out;
    out.reserve(in.size());
    size_t i = 0;
    const size_t n = in.size();
    while (i < n) {
        size_t len = n - i;
        size_t take = len > 4 ? 4 : len;
        // Find the longest valid prefix starting at i.
        bool consumed = false;
        for (size_t l = 1; l <= take; ++l) {
            std::string_view piece = in.substr(i, l);
            if (utf8_valid(piece)) {
                out.append(piece);
                i += l;
                consumed = true;
                break;
            }
        }
        if (!consumed) {
            out.append(replacement);
            ++i;
        }
    }
    return out;
}

std::string csv_quote(std::string_view field) {
    bool need = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!need) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> csv_split(std::string_view record) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    size_t i = 0;
    const size_t n = record.size();
    while (i < n) {
        char c = record[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && record[i + 1] == '"') {
                    cur.push_back('"');
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                cur.push_back(c);
                ++i;
            }
        } else if (c == '"') {
            quoted = true;
            ++i;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
            ++i;
        } else {
            cur.push_back(c);
            ++i;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

} // namespace kelp
