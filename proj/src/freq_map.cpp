#include "kelp/freq_map.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kelp/error.hpp"

namespace kelp {

ThresholdReport threshold_from_top3(std::array<double, 3> top3, SlopeMode mode) {
    ThresholdReport rep;
    for (int i = 0; i < 3; ++i)
        rep.top3[static_cast<size_t>(i)] = static_cast<std::uint64_t>(top3[static_cast<size_t>(i)]);
    rep.global_max = rep.top3[0];

    // Least squares over three equally spaced ranks reduces to (y2 - y0) / 2.
    double y0, y2;
    if (mode == SlopeMode::LnFrequency) {
        y0 = std::log(top3[0]);
        y2 = std::log(top3[2]);
    } else {
        y0 = top3[0];
        y2 = top3[2];
    }
    rep.slope = (y2 - y0) / 2.0;

    double mag = std::fabs(rep.slope);
    if (mag > 40.0) mag = 40.0; // exp() guard for the raw-frequency reading
    double t = std::floor((std::exp(mag) + 1.0) / 2.0);
    rep.threshold = t < 1.0 ? 1 : static_cast<std::uint64_t>(t);
    return rep;
}

void ColumnFrequencyMap::record(const TokenizedLine& line) {
    if (line.tokens.size() != cols_.size())
        throw InvariantError("freqmap record: line width mismatch (routing bug)");
    for (std::size_t c = 0; c < cols_.size(); ++c) {
        TokenHandle h = line.tokens[c];
        ++cols_[c][h.id];
        interner_->retain(h, 1);
    }
    ++total_lines_;
}

void ColumnFrequencyMap::decrement(std::size_t column, TokenHandle token, std::uint64_t n) {
    if (n == 0) return;
    if (column >= cols_.size())
        throw InvariantError("freqmap decrement: column out of range");
    auto& col = cols_[column];
    auto it = col.find(token.id);
    if (it == col.end() || it->second < n)
        throw InvariantError("freqmap decrement: count underflow");
    it->second -= n;
    if (it->second == 0) col.erase(it);
    interner_->release(token, n);
}

void ColumnFrequencyMap::note_discarded_lines(std::uint64_t n) {
    if (n > total_lines_)
        throw InvariantError("freqmap: discarded more lines than recorded");
    total_lines_ -= n;
}

std::pair<TokenHandle, std::uint64_t> ColumnFrequencyMap::column_max(std::size_t column) const {
    const auto& col = cols_[column];
    TokenHandle best{0};
    std::uint64_t best_count = 0;
    bool found = false;
    for (const auto& [id, count] : col) {
        if (!found || count > best_count || (count == best_count && id < best.id)) {
            best = TokenHandle{id};
            best_count = count;
            found = true;
        }
    }
    return {best, best_count};
}

ThresholdReport ColumnFrequencyMap::compute_threshold(SlopeMode mode) const {
    if (total_lines_ == 0)
        throw InvariantError("compute_threshold: no recorded lines");
    std::vector<std::uint64_t> maxima;
    maxima.reserve(cols_.size());
    for (std::size_t c = 0; c < cols_.size(); ++c)
        maxima.push_back(column_max(c).second);
    std::sort(maxima.begin(), maxima.end(), std::greater<>());

    std::array<double, 3> top3;
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t j = i < maxima.size() ? i : maxima.size() - 1; // pad by repetition
        top3[i] = static_cast<double>(maxima[j]);
    }
    return threshold_from_top3(top3, mode);
}

std::vector<std::pair<std::uint32_t, TokenHandle>>
ColumnFrequencyMap::root_eligible_columns(const ThresholdReport& report) const {
    std::vector<std::pair<std::uint32_t, TokenHandle>> out;
    for (std::size_t c = 0; c < cols_.size(); ++c) {
        auto [tok, count] = column_max(c);
        if (count == 0) continue;
        // Ratio gate f >= global_max / T, kept in integer arithmetic.
        if (count * report.threshold >= report.global_max)
            out.emplace_back(static_cast<std::uint32_t>(c), tok);
    }
    return out;
}

std::uint64_t ColumnFrequencyMap::count(std::size_t column, TokenHandle token) const {
    const auto& col = cols_[column];
    auto it = col.find(token.id);
    return it == col.end() ? 0 : it->second;
}

std::uint64_t ColumnFrequencyMap::column_sum(std::size_t column) const {
    std::uint64_t sum = 0;
    for (const auto& [id, count] : cols_[column]) sum += count;
    return sum;
}

void ColumnFrequencyMap::dump_tsv(std::ostream& os) const {
    os << "col\ttoken\tcount\n";
    for (std::size_t c = 0; c < cols_.size(); ++c) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> entries(cols_[c].begin(),
                                                                     cols_[c].end());
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first; // handle ids follow first-interning order
        });
        for (const auto& [id, count] : entries)
            os << c << '\t' << interner_->resolve(TokenHandle{id}) << '\t' << count << '\n';
    }
}

} // namespace kelp
