#include "kelp/interner.hpp"

#include "kelp/error.hpp"

namespace kelp {

TokenHandle Interner::intern(std::string_view text) {
    if (text.empty())
        throw InvariantError("intern: empty token (tokenization bug upstream)");
    auto it = forward_.find(text);
    if (it != forward_.end()) return TokenHandle{it->second};

    std::uint64_t id;
    if (!free_slots_.empty()) {
        id = free_slots_.back();
        free_slots_.pop_back();
    } else {
        id = slots_.size();
        slots_.emplace_back();
    }
    Slot& slot = slots_[id];
    slot.text.assign(text);
    slot.refs = 0;
    slot.live = true;
    forward_.emplace(slot.text, id);
    ++live_;
    return TokenHandle{id};
}

const Interner::Slot& Interner::live_slot(TokenHandle h, const char* op) const {
    if (h.id >= slots_.size() || !slots_[h.id].live)
        throw InvariantError(std::string(op) + ": stale or reclaimed token handle");
    return slots_[h.id];
}

const std::string& Interner::resolve(TokenHandle h) const {
    return live_slot(h, "resolve").text;
}

void Interner::retain(TokenHandle h, std::uint64_t n) {
    Slot& slot = const_cast<Slot&>(live_slot(h, "retain"));
    slot.refs += n;
}

bool Interner::release(TokenHandle h, std::uint64_t n) {
    Slot& slot = const_cast<Slot&>(live_slot(h, "release"));
    if (slot.refs < n)
        throw InvariantError("release: refcount underflow for token '" + slot.text + "'");
    slot.refs -= n;
    if (slot.refs > 0) return false;
    forward_.erase(slot.text);
    slot.text.clear();
    slot.text.shrink_to_fit();
    slot.live = false;
    free_slots_.push_back(h.id);
    --live_;
    return true;
}

std::uint64_t Interner::refcount(TokenHandle h) const {
    return live_slot(h, "refcount").refs;
}

bool Interner::find(std::string_view text, TokenHandle& out) const {
    auto it = forward_.find(text);
    if (it == forward_.end()) return false;
    out = TokenHandle{it->second};
    return true;
}

} // namespace kelp
