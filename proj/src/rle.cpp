#include "kelp/rle.hpp"

#include <unordered_set>

namespace kelp {

std::vector<TokenHandle> RleColumn::materialize() const {
    std::vector<TokenHandle> out;
    out.reserve(size_);
    for (const auto& run : runs_)
        out.insert(out.end(), run.len, run.value);
    return out;
}

std::vector<TokenHandle> RleColumn::distinct_values() const {
    std::vector<TokenHandle> out;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& run : runs_)
        if (seen.insert(run.value.id).second) out.push_back(run.value);
    return out;
}

std::size_t RleColumn::distinct_count() const {
    std::unordered_set<std::uint64_t> seen;
    for (const auto& run : runs_) seen.insert(run.value.id);
    return seen.size();
}

RleColumn RleColumn::select(const std::vector<std::uint64_t>& rows) const {
    RleColumn out;
    std::size_t ri = 0;
    std::uint64_t run_start = 0;
    for (const auto& run : runs_) {
        std::uint64_t run_end = run_start + run.len;
        while (ri < rows.size() && rows[ri] < run_end) {
            // Count how many selected rows fall inside this run.
            std::uint64_t n = 0;
            while (ri < rows.size() && rows[ri] < run_end) {
                ++n;
                ++ri;
            }
            out.push_run(run.value, n);
        }
        run_start = run_end;
    }
    return out;
}

void RleColumn::drop_front(std::uint64_t n) {
    if (n == 0) return;
    if (n >= size_) {
        runs_.clear();
        size_ = 0;
        return;
    }
    std::size_t i = 0;
    std::uint64_t remaining = n;
    while (remaining > 0 && i < runs_.size()) {
        if (runs_[i].len <= remaining) {
            remaining -= runs_[i].len;
            ++i;
        } else {
            runs_[i].len -= remaining;
            remaining = 0;
        }
    }
    runs_.erase(runs_.begin(), runs_.begin() + static_cast<std::ptrdiff_t>(i));
    size_ -= n;
}

void RleColumn::append(const RleColumn& other) {
    for (const auto& run : other.runs_) push_run(run.value, run.len);
}

} // namespace kelp
