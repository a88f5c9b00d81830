#pragma once

#include <cstdint>
#include <vector>

#include "kelp/interner.hpp"

namespace kelp {

struct RleRun {
    std::uint64_t len;
    TokenHandle value;

    friend bool operator==(const RleRun& a, const RleRun& b) {
        return a.len == b.len && a.value == b.value;
    }
};

// Run-length encoded column. Adjacent runs never share a value (maximal
// runs), and logical_len is always the sum of run lengths.
class RleColumn {
public:
    void push(TokenHandle value) {
        if (!runs_.empty() && runs_.back().value == value) {
            ++runs_.back().len;
        } else {
            runs_.push_back(RleRun{1, value});
        }
        ++size_;
    }

    void push_run(TokenHandle value, std::uint64_t n) {
        if (n == 0) return;
        if (!runs_.empty() && runs_.back().value == value) {
            runs_.back().len += n;
        } else {
            runs_.push_back(RleRun{n, value});
        }
        size_ += n;
    }

    std::uint64_t size() const { return size_; }
    const std::vector<RleRun>& runs() const { return runs_; }
    bool empty() const { return size_ == 0; }

    std::vector<TokenHandle> materialize() const;

    // Distinct values in first-appearance order.
    std::vector<TokenHandle> distinct_values() const;
    std::size_t distinct_count() const;

    // Keeps only the rows whose indices appear in `rows` (sorted ascending).
    RleColumn select(const std::vector<std::uint64_t>& rows) const;

    // Drops the first n rows.
    void drop_front(std::uint64_t n);

    // Appends another column's rows after this one's.
    void append(const RleColumn& other);

    // Invokes fn(value, run_len) over the first n rows.
    template <typename Fn>
    void for_each_prefix(std::uint64_t n, Fn&& fn) const {
        for (const auto& run : runs_) {
            if (n == 0) break;
            std::uint64_t take = run.len < n ? run.len : n;
            fn(run.value, take);
            n -= take;
        }
    }

    friend bool operator==(const RleColumn& a, const RleColumn& b) {
        return a.size_ == b.size_ && a.runs_ == b.runs_;
    }

private:
    std::vector<RleRun> runs_;
    std::uint64_t size_ = 0;
};

} // namespace kelp
