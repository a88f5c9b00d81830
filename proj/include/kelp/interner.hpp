#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kelp {

// Opaque identity for an interned token. Two live handles compare equal iff
// their source strings are byte-identical; all hot-path comparisons are
// integer comparisons on this id.
struct TokenHandle {
    std::uint64_t id = 0;

    friend bool operator==(TokenHandle a, TokenHandle b) { return a.id == b.id; }
    friend bool operator!=(TokenHandle a, TokenHandle b) { return a.id != b.id; }
    friend bool operator<(TokenHandle a, TokenHandle b) { return a.id < b.id; }
};

struct TokenHandleHash {
    std::size_t operator()(TokenHandle h) const noexcept {
        std::uint64_t z = h.id + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

// Bidirectional string <-> handle table with reference-counted reclamation
// and LIFO slot reuse. Externally synchronized: callers guarantee mutually
// exclusive mutation.
class Interner {
public:
    TokenHandle intern(std::string_view text);

    const std::string& resolve(TokenHandle h) const;

    void retain(TokenHandle h, std::uint64_t n = 1);

    // Returns true iff the refcount hit zero; the slot is then reclaimed.
    bool release(TokenHandle h, std::uint64_t n = 1);

    std::uint64_t refcount(TokenHandle h) const;

    std::size_t live_count() const { return live_; }

    bool is_live(TokenHandle h) const {
        return h.id < slots_.size() && slots_[h.id].live;
    }

    // Looks up without interning; returns false if the text is not live.
    bool find(std::string_view text, TokenHandle& out) const;

private:
    struct Slot {
        std::string text;
        std::uint64_t refs = 0;
        bool live = false;
    };

    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
        std::size_t operator()(const std::string& s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };

    const Slot& live_slot(TokenHandle h, const char* op) const;

    std::vector<Slot> slots_;
    std::vector<std::uint64_t> free_slots_; // LIFO
    std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>> forward_;
    std::size_t live_ = 0;
};

} // namespace kelp
