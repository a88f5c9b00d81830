#include "kelp/evolution.hpp"

#include <algorithm>
#include <unordered_map>

#include "kelp/error.hpp"

namespace kelp {

void EvolutionConfig::validate() const {
    if (branch_threshold < 1 || trim_capacity < 1 || reeval_interval < 1)
        throw ConfigError("evolution config fields must all be >= 1");
}

// ---- pull ----

static std::vector<StaticNode> pull_from_store(RowStore store, std::uint32_t col,
                                               Interner& interner) {
    auto groups = rle_partition(store, col);
    std::vector<std::uint32_t> child_cols;
    for (std::uint32_t c : store.col_ids())
        if (c != col) child_cols.push_back(c);

    std::vector<StaticNode> out;
    out.reserve(groups.size());
    for (auto& [value, rows] : groups) {
        ChildSet child{CountOnly{rows.size()}};
        if (!child_cols.empty()) {
            RowStore sub(child_cols);
            for (std::uint32_t c : child_cols) {
                std::size_t from = store.col_pos(c);
                std::size_t to = sub.col_pos(c);
                sub.column_mut_at(to) = store.column_at(from).select(rows);
                if (store.sticky_at(from)) sub.set_sticky_at(to);
            }
            sub.note_rows(rows.size());
            child = ChildSet(std::move(sub));
        }
        out.push_back(make_static_node(col, value, std::move(child), interner));
    }
    return out;
}

std::vector<StaticNode> pull(ChildSet children, std::uint32_t col, Interner& interner) {
    if (children.is_count())
        throw InvariantError("pull: column " + std::to_string(col) + " absent (counter region)");
    if (children.is_leaf()) {
        if (!children.store().has_col(col))
            throw InvariantError("pull: column " + std::to_string(col) + " absent from store");
        return pull_from_store(std::move(children.store()), col, interner);
    }

    auto& branches = children.branches();
    if (branches.empty()) throw InvariantError("pull: empty branch set");
    std::uint32_t level_col = branches.front().col;
    if (level_col == col) return std::move(branches); // Already constrained here.

    // Bubble up: pull from every branch child, then regroup by pulled value,
    // pushing this level's (col, value) constraint under each pulled node.
    std::vector<std::pair<TokenHandle, std::vector<StaticNode>>> groups;
    std::unordered_map<std::uint64_t, std::size_t> slot;
    for (auto& b : branches) {
        auto subs = pull(std::move(b.child), col, interner);
        for (auto& sub : subs) {
            auto [it, fresh] = slot.try_emplace(sub.value.id, groups.size());
            if (fresh) {
                groups.emplace_back(sub.value, std::vector<StaticNode>{});
                interner.retain(sub.value); // group key keeps one reference
            }
            groups[it->second].second.push_back(
                make_static_node(level_col, b.value, std::move(sub.child), interner));
            interner.release(sub.value); // dismantled pulled node
        }
        interner.release(b.value); // consumed source branch
    }

    std::vector<StaticNode> out;
    out.reserve(groups.size());
    for (auto& [value, kids] : groups) {
        // The group key's reference transfers to the new node.
        out.push_back(StaticNode(col, value, ChildSet(std::move(kids))));
    }
    return out;
}

// ---- re-evaluation ----

namespace {

struct Candidate {
    bool found = false;
    std::size_t card = 0;
    std::uint32_t col = 0;
};

} // namespace

ChildSet reeval(ChildSet cs, const EvolutionConfig& cfg, Interner& interner) {
    if (cs.is_count()) return cs;

    if (cs.is_leaf()) {
        RowStore& s = cs.store();
        if (s.rows() == 0 || s.col_count() == 0) return cs;
        Candidate best;
        for (std::size_t i = 0; i < s.col_ids().size(); ++i) {
            if (s.sticky_at(i)) continue;
            std::size_t d = s.column_at(i).distinct_count();
            if (d < 2 || d > cfg.branch_threshold || d >= s.rows()) continue;
            if (!best.found || d < best.card) best = {true, d, s.col_ids()[i]};
        }
        if (!best.found) return cs;
        auto branches = pull(std::move(cs), best.col, interner);
        for (auto& b : branches) b.child = reeval(std::move(b.child), cfg, interner);
        return ChildSet(std::move(branches));
    }

    const std::uint64_t rows = represented_rows(cs);
    const std::uint32_t level_col = cs.branches().front().col;
    Candidate best;
    bool any_variance = false;
    for (std::uint32_t c : region_columns(cs)) {
        RegionColumnStats st = region_column_stats(cs, c);
        if (st.cardinality >= 2) any_variance = true;
        if (st.sticky) continue;
        if (st.cardinality < 2 || st.cardinality > cfg.branch_threshold ||
            st.cardinality >= rows)
            continue;
        if (!best.found || st.cardinality < best.card) best = {true, st.cardinality, c};
    }

    if (!best.found) {
        if (any_variance) {
            // Variance with no usable structure: generalize to a wildcard region.
            return ChildSet(collapse_to_store(std::move(cs), interner));
        }
        for (auto& b : cs.branches()) b.child = reeval(std::move(b.child), cfg, interner);
        return cs;
    }
    if (best.col == level_col) {
        for (auto& b : cs.branches()) b.child = reeval(std::move(b.child), cfg, interner);
        return cs;
    }
    auto branches = pull(std::move(cs), best.col, interner);
    for (auto& b : branches) b.child = reeval(std::move(b.child), cfg, interner);
    return ChildSet(std::move(branches));
}

// ---- root validation ----

static std::pair<RowStore, RowStore> split_store(RowStore store, std::uint32_t col,
                                                 TokenHandle value) {
    std::vector<std::uint64_t> pass_rows, fail_rows;
    std::uint64_t row = 0;
    for (const auto& run : store.column(col).runs()) {
        auto& sink = run.value == value ? pass_rows : fail_rows;
        for (std::uint64_t i = 0; i < run.len; ++i) sink.push_back(row + i);
        row += run.len;
    }

    std::vector<std::uint32_t> pass_cols;
    for (std::uint32_t c : store.col_ids())
        if (c != col) pass_cols.push_back(c);

    RowStore pass(pass_cols);
    RowStore fail(store.col_ids());
    for (std::uint32_t c : store.col_ids()) {
        std::size_t from = store.col_pos(c);
        std::size_t fto = fail.col_pos(c);
        fail.column_mut_at(fto) = store.column_at(from).select(fail_rows);
        if (store.sticky_at(from)) fail.set_sticky_at(fto);
        if (c != col) {
            std::size_t pto = pass.col_pos(c);
            pass.column_mut_at(pto) = store.column_at(from).select(pass_rows);
            if (store.sticky_at(from)) pass.set_sticky_at(pto);
        }
    }
    pass.note_rows(pass_rows.size());
    fail.note_rows(fail_rows.size());
    return {std::move(pass), std::move(fail)};
}

ValidationOutcome validate_root(RootNode& root, const ColumnFrequencyMap& fm,
                                Interner& interner, SlopeMode mode) {
    ValidationOutcome out;
    out.report = fm.compute_threshold(mode);
    auto eligible = fm.root_eligible_columns(out.report);
    if (eligible == root.constraints) return out;

    for (const auto& [c, v] : eligible) {
        auto it = std::find(root.constraints.begin(), root.constraints.end(),
                            std::make_pair(c, v));
        if (it == root.constraints.end()) out.promoted.push_back(c);
    }
    for (const auto& [c, v] : root.constraints) {
        auto it = std::find(eligible.begin(), eligible.end(), std::make_pair(c, v));
        if (it == eligible.end()) out.demoted.push_back(c);
    }

    // Flatten the whole bucket back to full-width rows, dissolving the old
    // backbone, then carve out the new one. Counts survive via run
    // reconstruction; finer structure is re-derived by the next reeval.
    RowStore full = collapse_to_store(std::move(root.trunk), interner);
    for (const auto& [c, v] : root.constraints) full.add_constant_column(c, v);
    RowStore rest_store = collapse_to_store(std::move(root.rest), interner);
    full.append_store(rest_store);
    for (const auto& [c, v] : root.constraints) interner.release(v);

    std::vector<std::uint32_t> all_cols(root.width);
    for (std::uint32_t c = 0; c < root.width; ++c) all_cols[c] = c;
    RowStore rest_acc(all_cols);

    RowStore pass = std::move(full);
    std::vector<std::pair<std::uint32_t, TokenHandle>> done;
    for (const auto& [c, v] : eligible) {
        auto [p, f] = split_store(std::move(pass), c, v);
        for (const auto& [dc, dv] : done) f.add_constant_column(dc, dv);
        rest_acc.append_store(f);
        pass = std::move(p);
        done.emplace_back(c, v);
    }

    root.constraints = eligible;
    for (const auto& [c, v] : root.constraints) interner.retain(v);
    root.trunk = pass.col_count() == 0 ? ChildSet(CountOnly{pass.rows()})
                                       : ChildSet(std::move(pass));
    root.rest = ChildSet(std::move(rest_acc));
    root.reeval_flag = true;
    out.changed = true;
    return out;
}

// ---- trimming ----

static void trim_walk(ChildSet& cs, std::vector<std::pair<std::uint32_t, TokenHandle>>& stack,
                      ColumnFrequencyMap& fm, Interner& interner, const EvolutionConfig& cfg,
                      TrimStats& st) {
    if (cs.is_count()) return;
    if (cs.is_branches()) {
        for (auto& b : cs.branches()) {
            stack.emplace_back(b.col, b.value);
            trim_walk(b.child, stack, fm, interner, cfg, st);
            stack.pop_back();
        }
        return;
    }
    RowStore& s = cs.store();
    if (s.rows() <= cfg.trim_capacity) return;

    bool all_single = true;
    for (std::size_t i = 0; i < s.col_ids().size() && all_single; ++i)
        if (s.sticky_at(i) || s.column_at(i).distinct_count() != 1) all_single = false;

    if (all_single) {
        // Perfectly matched region: fold the buffer into a static chain and
        // a bare counter. Counts and frequency statistics are retained.
        std::uint64_t n = s.rows();
        ChildSet chain{CountOnly{n}};
        for (std::size_t i = s.col_ids().size(); i-- > 0;) {
            TokenHandle v = s.column_at(i).runs().front().value;
            std::vector<StaticNode> level;
            level.push_back(make_static_node(s.col_ids()[i], v, std::move(chain), interner));
            chain = ChildSet(std::move(level));
        }
        cs = std::move(chain);
        ++st.folds;
        return;
    }

    std::uint64_t n = s.rows() - cfg.trim_capacity;
    for (std::size_t i = 0; i < s.col_ids().size(); ++i) {
        if (s.column_at(i).distinct_count() >= 2) s.set_sticky_at(i);
        s.column_at(i).for_each_prefix(n, [&](TokenHandle v, std::uint64_t len) {
            fm.decrement(s.col_ids()[i], v, len);
        });
    }
    for (const auto& [c, v] : stack) fm.decrement(c, v, n);
    s.drop_front_rows(n);
    fm.note_discarded_lines(n);
    st.rows_discarded += n;
    ++st.leaves_trimmed;
}

TrimStats trim(RootNode& root, ColumnFrequencyMap& fm, Interner& interner,
               const EvolutionConfig& cfg) {
    TrimStats st;
    std::vector<std::pair<std::uint32_t, TokenHandle>> stack(root.constraints.begin(),
                                                             root.constraints.end());
    trim_walk(root.trunk, stack, fm, interner, cfg, st);
    stack.clear();
    trim_walk(root.rest, stack, fm, interner, cfg, st);
    return st;
}

} // namespace kelp
