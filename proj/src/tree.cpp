#include "kelp/tree.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "kelp/error.hpp"
#include "kelp/util.hpp"

namespace kelp {

// ---- RowStore ----

RowStore::RowStore(std::vector<std::uint32_t> col_ids) : col_ids_(std::move(col_ids)) {
    std::sort(col_ids_.begin(), col_ids_.end());
    cols_.resize(col_ids_.size());
    sticky_.assign(col_ids_.size(), 0);
}

bool RowStore::has_col(std::uint32_t col) const {
    return std::binary_search(col_ids_.begin(), col_ids_.end(), col);
}

std::size_t RowStore::col_pos(std::uint32_t col) const {
    auto it = std::lower_bound(col_ids_.begin(), col_ids_.end(), col);
    if (it == col_ids_.end() || *it != col)
        throw InvariantError("row store: column " + std::to_string(col) + " not present");
    return static_cast<std::size_t>(it - col_ids_.begin());
}

void RowStore::append_line(std::span<const TokenHandle> full_line) {
    for (std::size_t i = 0; i < col_ids_.size(); ++i)
        cols_[i].push(full_line[col_ids_[i]]);
    ++rows_;
}

void RowStore::append_row(std::span<const TokenHandle> values) {
    for (std::size_t i = 0; i < col_ids_.size(); ++i) cols_[i].push(values[i]);
    ++rows_;
}

void RowStore::add_constant_column(std::uint32_t col, TokenHandle value) {
    auto it = std::lower_bound(col_ids_.begin(), col_ids_.end(), col);
    if (it != col_ids_.end() && *it == col)
        throw InvariantError("row store: constant column already present");
    std::size_t pos = static_cast<std::size_t>(it - col_ids_.begin());
    col_ids_.insert(it, col);
    RleColumn c;
    c.push_run(value, rows_);
    cols_.insert(cols_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(c));
    sticky_.insert(sticky_.begin() + static_cast<std::ptrdiff_t>(pos), 0);
}

void RowStore::append_store(const RowStore& other) {
    if (other.col_ids_ != col_ids_)
        throw InvariantError("row store: append over mismatched column sets");
    for (std::size_t i = 0; i < cols_.size(); ++i) {
        cols_[i].append(other.cols_[i]);
        if (other.sticky_[i]) sticky_[i] = 1;
    }
    rows_ += other.rows_;
}

void RowStore::drop_front_rows(std::uint64_t n) {
    for (auto& c : cols_) c.drop_front(n);
    rows_ -= n;
}

std::vector<TokenHandle> RowStore::materialize_row(std::uint64_t row) const {
    std::vector<TokenHandle> out(col_ids_.size());
    for (std::size_t i = 0; i < cols_.size(); ++i) {
        std::uint64_t at = 0;
        for (const auto& run : cols_[i].runs()) {
            if (row < at + run.len) {
                out[i] = run.value;
                break;
            }
            at += run.len;
        }
    }
    return out;
}

bool operator==(const RowStore& a, const RowStore& b) {
    return a.col_ids_ == b.col_ids_ && a.rows_ == b.rows_ && a.sticky_ == b.sticky_ &&
           a.cols_ == b.cols_;
}

std::vector<std::pair<TokenHandle, std::vector<std::uint64_t>>>
rle_partition(const RowStore& store, std::uint32_t col) {
    const RleColumn& c = store.column(col);
    std::vector<std::pair<TokenHandle, std::vector<std::uint64_t>>> out;
    std::unordered_map<std::uint64_t, std::size_t> slot;
    std::uint64_t row = 0;
    for (const auto& run : c.runs()) {
        auto [it, fresh] = slot.try_emplace(run.value.id, out.size());
        if (fresh) out.emplace_back(run.value, std::vector<std::uint64_t>{});
        auto& rows = out[it->second].second;
        for (std::uint64_t i = 0; i < run.len; ++i) rows.push_back(row + i);
        row += run.len;
    }
    return out;
}

// ---- construction helpers ----

ChildSet make_region(std::vector<std::uint32_t> cols) {
    if (cols.empty()) return ChildSet(CountOnly{0});
    return ChildSet(RowStore(std::move(cols)));
}

StaticNode make_static_node(std::uint32_t col, TokenHandle value, ChildSet child,
                            Interner& interner) {
    interner.retain(value);
    return StaticNode(col, value, std::move(child));
}

RootNode::RootNode(std::uint32_t w) : width(w) {
    std::vector<std::uint32_t> all(w);
    for (std::uint32_t c = 0; c < w; ++c) all[c] = c;
    trunk = make_region(all);
    rest = make_region(std::move(all));
    if (w == 0) {
        trunk = ChildSet(RowStore{});
        rest = ChildSet(RowStore{});
    }
}

// ---- structure queries ----

std::uint64_t represented_rows(const ChildSet& cs) {
    if (cs.is_count()) return cs.count().count;
    if (cs.is_leaf()) return cs.store().rows();
    std::uint64_t total = 0;
    for (const auto& b : cs.branches()) total += represented_rows(b.child);
    return total;
}

std::uint64_t represented_rows(const RootNode& root) {
    return represented_rows(root.trunk) + represented_rows(root.rest);
}

std::vector<std::uint32_t> region_columns(const ChildSet& cs) {
    if (cs.is_count()) return {};
    if (cs.is_leaf()) return cs.store().col_ids();
    const auto& branches = cs.branches();
    if (branches.empty()) throw InvariantError("region_columns: empty branch set");
    std::vector<std::uint32_t> cols = region_columns(branches.front().child);
    cols.push_back(branches.front().col);
    std::sort(cols.begin(), cols.end());
    return cols;
}

static void collect_region_values(const ChildSet& cs, std::uint32_t col,
                                  std::unordered_set<std::uint64_t>& values, bool& sticky) {
    if (cs.is_count()) {
        throw InvariantError("region cardinality: column not present in region");
    } else if (cs.is_leaf()) {
        const RowStore& s = cs.store();
        if (s.rows() == 0) return;
        std::size_t pos = s.col_pos(col);
        for (const auto& run : s.column_at(pos).runs()) values.insert(run.value.id);
        if (s.sticky_at(pos)) sticky = true;
    } else {
        const auto& branches = cs.branches();
        if (!branches.empty() && branches.front().col == col) {
            for (const auto& b : branches)
                if (represented_rows(b.child) > 0) values.insert(b.value.id);
            return;
        }
        for (const auto& b : branches) collect_region_values(b.child, col, values, sticky);
    }
}

RegionColumnStats region_column_stats(const ChildSet& cs, std::uint32_t col) {
    std::unordered_set<std::uint64_t> values;
    bool sticky = false;
    collect_region_values(cs, col, values, sticky);
    return RegionColumnStats{values.size(), sticky};
}

std::size_t region_cardinality(const ChildSet& cs, std::uint32_t col) {
    return region_column_stats(cs, col).cardinality;
}

// ---- push ----

static void push_into(ChildSet& cs, const TokenizedLine& line, Interner& interner) {
    ChildSet* cur = &cs;
    for (;;) {
        if (cur->is_count()) {
            ++cur->count().count;
            return;
        }
        if (cur->is_leaf()) {
            cur->store().append_line(line.tokens);
            return;
        }
        auto& branches = cur->branches();
        if (branches.empty()) throw InvariantError("push: empty branch set");
        std::uint32_t col = branches.front().col;
        TokenHandle want = line.tokens[col];
        StaticNode* hit = nullptr;
        for (auto& b : branches) {
            if (b.value == want) {
                hit = &b;
                break;
            }
        }
        if (hit) {
            cur = &hit->child;
            continue;
        }
        // Static mismatch: open a sibling branch with a fresh leaf.
        ChildSet child = make_region(region_columns(branches.front().child));
        branches.push_back(make_static_node(col, want, std::move(child), interner));
        cur = &branches.back().child;
    }
}

void push_line(RootNode& root, const TokenizedLine& line, Interner& interner) {
    if (line.tokens.size() != root.width)
        throw InvariantError("push: line width does not match bucket");
    for (const auto& [col, value] : root.constraints) {
        if (line.tokens[col] != value) {
            push_into(root.rest, line, interner);
            return;
        }
    }
    push_into(root.trunk, line, interner);
}

// ---- collapse / release / clone / equality ----

static void collapse_walk(ChildSet& cs, Interner& interner, RowStore& target,
                          std::vector<std::pair<std::uint32_t, TokenHandle>>& stack) {
    if (cs.is_count()) {
        std::uint64_t n = cs.count().count;
        if (n == 0) return;
        for (const auto& [col, value] : stack)
            target.column_mut_at(target.col_pos(col)).push_run(value, n);
        // Constraint columns cover everything a counter represents.
        if (stack.size() != target.col_ids().size())
            throw InvariantError("collapse: counter under incomplete constraints");
        target.note_rows(n);
        return;
    }
    if (cs.is_leaf()) {
        RowStore& s = cs.store();
        if (s.rows() == 0) return;
        for (const auto& [col, value] : stack)
            target.column_mut_at(target.col_pos(col)).push_run(value, s.rows());
        for (std::size_t i = 0; i < s.col_ids().size(); ++i) {
            std::size_t tp = target.col_pos(s.col_ids()[i]);
            target.column_mut_at(tp).append(s.column_at(i));
            if (s.sticky_at(i)) target.set_sticky_at(tp);
        }
        target.note_rows(s.rows());
        return;
    }
    for (auto& b : cs.branches()) {
        stack.emplace_back(b.col, b.value);
        collapse_walk(b.child, interner, target, stack);
        stack.pop_back();
        interner.release(b.value);
    }
}

RowStore collapse_to_store(ChildSet cs, Interner& interner) {
    RowStore target(region_columns(cs));
    std::vector<std::pair<std::uint32_t, TokenHandle>> stack;
    collapse_walk(cs, interner, target, stack);
    return target;
}

void release_structure(ChildSet& cs, Interner& interner) {
    if (!cs.is_branches()) return;
    for (auto& b : cs.branches()) {
        release_structure(b.child, interner);
        interner.release(b.value);
    }
}

void release_root(RootNode& root, Interner& interner) {
    release_structure(root.trunk, interner);
    release_structure(root.rest, interner);
    for (const auto& [col, value] : root.constraints) interner.release(value);
    root.constraints.clear();
    root.trunk = ChildSet(RowStore{});
    root.rest = ChildSet(RowStore{});
}

ChildSet clone_structure(const ChildSet& cs, Interner& interner) {
    if (cs.is_count()) return ChildSet(cs.count());
    if (cs.is_leaf()) return ChildSet(RowStore(cs.store()));
    std::vector<StaticNode> out;
    out.reserve(cs.branches().size());
    for (const auto& b : cs.branches())
        out.push_back(make_static_node(b.col, b.value, clone_structure(b.child, interner),
                                       interner));
    return ChildSet(std::move(out));
}

bool structurally_equal(const ChildSet& a, const ChildSet& b) {
    if (a.node.index() != b.node.index()) return false;
    if (a.is_count()) return a.count().count == b.count().count;
    if (a.is_leaf()) return a.store() == b.store();
    const auto& ba = a.branches();
    const auto& bb = b.branches();
    if (ba.size() != bb.size()) return false;
    for (std::size_t i = 0; i < ba.size(); ++i) {
        if (ba[i].col != bb[i].col || ba[i].value != bb[i].value) return false;
        if (!structurally_equal(ba[i].child, bb[i].child)) return false;
    }
    return true;
}

// ---- templates ----

std::uint64_t template_event_id(const std::vector<std::string>& parts) {
    std::uint64_t h = kFnvOffset;
    for (const auto& p : parts) {
        h = fnv1a64(p, h);
        h = fnv1a64_byte(0x1f, h);
    }
    return h;
}

std::string ParsedTemplate::render() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(' ');
        out += parts[i];
    }
    return out;
}

std::vector<std::uint32_t> ParsedTemplate::wildcard_positions() const {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i] == kWildcard) out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

namespace {

struct ExtractSink {
    const Interner* interner;
    std::uint32_t width;
    std::vector<ParsedTemplate>* out;
    std::unordered_map<const void*, std::size_t>* terminals; // optional

    void emit(const ChildSet& terminal, std::vector<std::string>& parts, std::uint64_t count) {
        if (count == 0) return;
        ParsedTemplate tpl;
        tpl.parts = parts;
        tpl.count = count;
        tpl.event_id = template_event_id(tpl.parts);
        if (terminals) (*terminals)[static_cast<const void*>(&terminal)] = out->size();
        out->push_back(std::move(tpl));
    }
};

void extract_walk(const ChildSet& cs, std::vector<std::string>& parts, ExtractSink& sink) {
    if (cs.is_count()) {
        sink.emit(cs, parts, cs.count().count);
        return;
    }
    if (cs.is_leaf()) {
        const RowStore& s = cs.store();
        if (s.rows() == 0) return;
        for (std::size_t i = 0; i < s.col_ids().size(); ++i) {
            const RleColumn& col = s.column_at(i);
            if (!s.sticky_at(i) && col.distinct_count() == 1)
                parts[s.col_ids()[i]] = sink.interner->resolve(col.runs().front().value);
            else
                parts[s.col_ids()[i]] = kWildcard;
        }
        sink.emit(cs, parts, s.rows());
        for (std::uint32_t c : s.col_ids()) parts[c].clear();
        return;
    }
    for (const auto& b : cs.branches()) {
        parts[b.col] = sink.interner->resolve(b.value);
        extract_walk(b.child, parts, sink);
        parts[b.col].clear();
    }
}

void extract_root(const RootNode& root, ExtractSink& sink) {
    std::vector<std::string> parts(root.width);
    for (const auto& [col, value] : root.constraints)
        parts[col] = sink.interner->resolve(value);
    extract_walk(root.trunk, parts, sink);
    for (auto& p : parts) p.clear();
    extract_walk(root.rest, parts, sink);
}

} // namespace

std::vector<ParsedTemplate> extract_templates(const RootNode& root, const Interner& interner) {
    std::vector<ParsedTemplate> out;
    ExtractSink sink{&interner, root.width, &out, nullptr};
    extract_root(root, sink);
    return out;
}

// ---- matching ----

void TemplateIndex::build(const RootNode& root, const Interner& interner) {
    templates_.clear();
    by_terminal_.clear();
    ExtractSink sink{&interner, root.width, &templates_, &by_terminal_};
    extract_root(root, sink);
}

const ParsedTemplate* TemplateIndex::lookup(const void* terminal) const {
    auto it = by_terminal_.find(terminal);
    if (it == by_terminal_.end()) return nullptr;
    return &templates_[it->second];
}

// Breadth-first search for the nearest terminal, preferring a dynamic
// container over a bare counter at equal depth.
static const ChildSet* nearest_terminal(const ChildSet* cs) {
    std::deque<const ChildSet*> queue{cs};
    const ChildSet* count_fallback = nullptr;
    while (!queue.empty()) {
        const ChildSet* cur = queue.front();
        queue.pop_front();
        if (cur->is_leaf()) {
            if (cur->store().rows() > 0) return cur;
            continue;
        }
        if (cur->is_count()) {
            if (!count_fallback && cur->count().count > 0) count_fallback = cur;
            continue;
        }
        for (const auto& b : cur->branches()) queue.push_back(&b.child);
    }
    return count_fallback;
}

MatchResult match_line(const RootNode& root, const TemplateIndex& index,
                       std::span<const TokenHandle> tokens) {
    MatchResult res;
    if (tokens.size() != root.width) return res;
    res.matched_shape = true;
    res.exact = true;

    const ChildSet* cur = &root.trunk;
    for (const auto& [col, value] : root.constraints) {
        if (tokens[col] != value) {
            cur = &root.rest;
            break;
        }
    }
    while (cur) {
        if (cur->is_leaf() || cur->is_count()) break;
        const auto& branches = cur->branches();
        std::uint32_t col = branches.front().col;
        const ChildSet* next = nullptr;
        for (const auto& b : branches) {
            if (b.value == tokens[col]) {
                next = &b.child;
                break;
            }
        }
        if (!next) {
            res.exact = false;
            cur = nearest_terminal(cur);
            break;
        }
        cur = next;
    }
    const ParsedTemplate* tpl = cur ? index.lookup(static_cast<const void*>(cur)) : nullptr;
    if (!tpl) {
        // Empty region (no represented rows): classify by shape only.
        res.exact = false;
        res.event_id = fnv1a64("unfilled-region");
        return res;
    }
    res.tpl = tpl;
    res.event_id = tpl->event_id;
    return res;
}

} // namespace kelp
