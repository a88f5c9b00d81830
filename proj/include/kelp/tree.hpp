#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "kelp/interner.hpp"
#include "kelp/rle.hpp"
#include "kelp/tokenizer.hpp"

namespace kelp {

inline constexpr const char* kWildcard = "<*>";

// Columnar buffer behind a dynamic leaf. Column ids are absolute column
// indices of the bucket, kept sorted; every column holds exactly `rows`
// values. `sticky_wildcard` pins a column as a wildcard once trimming has
// discarded rows that proved it multi-valued, so templates never flip back
// to static just because the evidence was rolled over.
class RowStore {
public:
    RowStore() = default;
    explicit RowStore(std::vector<std::uint32_t> col_ids);

    std::uint64_t rows() const { return rows_; }
    const std::vector<std::uint32_t>& col_ids() const { return col_ids_; }
    std::size_t col_count() const { return col_ids_.size(); }

    bool has_col(std::uint32_t col) const;
    std::size_t col_pos(std::uint32_t col) const; // throws if absent

    const RleColumn& column(std::uint32_t col) const { return cols_[col_pos(col)]; }
    const RleColumn& column_at(std::size_t pos) const { return cols_[pos]; }
    RleColumn& column_mut_at(std::size_t pos) { return cols_[pos]; }

    bool sticky(std::uint32_t col) const { return sticky_[col_pos(col)]; }
    bool sticky_at(std::size_t pos) const { return sticky_[pos]; }
    void set_sticky_at(std::size_t pos) { sticky_[pos] = true; }

    // Appends the store-relevant columns of a full-width line.
    void append_line(std::span<const TokenHandle> full_line);

    // Appends one value per store column (aligned with col_ids()).
    void append_row(std::span<const TokenHandle> values);

    // Appends n identical rows of a single-column extension or widens the
    // store with a constant column (used when constraints re-materialize).
    void add_constant_column(std::uint32_t col, TokenHandle value);

    // Column-wise append of another store over the same column set.
    void append_store(const RowStore& other);

    void note_rows(std::uint64_t n) { rows_ += n; }
    void drop_front_rows(std::uint64_t n);

    std::vector<TokenHandle> materialize_row(std::uint64_t row) const;

    friend bool operator==(const RowStore& a, const RowStore& b);

private:
    std::vector<std::uint32_t> col_ids_;
    std::vector<RleColumn> cols_;
    std::vector<char> sticky_;
    std::uint64_t rows_ = 0;
};

// Groups row indices by distinct value at `col`, values in first-appearance
// order; the index sets are a disjoint cover of [0, rows).
std::vector<std::pair<TokenHandle, std::vector<std::uint64_t>>>
rle_partition(const RowStore& store, std::uint32_t col);

struct StaticNode;

struct CountOnly {
    std::uint64_t count = 0;
};

// Lifecycle of a cluster region: a bare counter once every column is pinned,
// explicit branches once variance is confirmed, or a raw-row buffer while
// the data is still ambiguous.
struct ChildSet {
    std::variant<CountOnly, std::vector<StaticNode>, RowStore> node;

    ChildSet() : node(RowStore{}) {}
    explicit ChildSet(CountOnly c) : node(c) {}
    explicit ChildSet(std::vector<StaticNode> b) : node(std::move(b)) {}
    explicit ChildSet(RowStore s) : node(std::move(s)) {}

    ChildSet(ChildSet&&) = default;
    ChildSet& operator=(ChildSet&&) = default;
    ChildSet(const ChildSet&) = delete;
    ChildSet& operator=(const ChildSet&) = delete;

    bool is_count() const { return std::holds_alternative<CountOnly>(node); }
    bool is_branches() const { return std::holds_alternative<std::vector<StaticNode>>(node); }
    bool is_leaf() const { return std::holds_alternative<RowStore>(node); }

    CountOnly& count() { return std::get<CountOnly>(node); }
    const CountOnly& count() const { return std::get<CountOnly>(node); }
    std::vector<StaticNode>& branches() { return std::get<std::vector<StaticNode>>(node); }
    const std::vector<StaticNode>& branches() const {
        return std::get<std::vector<StaticNode>>(node);
    }
    RowStore& store() { return std::get<RowStore>(node); }
    const RowStore& store() const { return std::get<RowStore>(node); }
};

struct StaticNode {
    std::uint32_t col = 0;
    TokenHandle value{};
    ChildSet child;

    StaticNode(std::uint32_t c, TokenHandle v, ChildSet ch)
        : col(c), value(v), child(std::move(ch)) {}
    StaticNode(StaticNode&&) = default;
    StaticNode& operator=(StaticNode&&) = default;
    StaticNode(const StaticNode&) = delete;
    StaticNode& operator=(const StaticNode&) = delete;
};

// Per-bucket tree root. `constraints` is the static backbone selected by
// root validation (ascending column order, each entry holding one interner
// reference). `trunk` holds rows matching every constraint, over the
// remaining columns. `rest` holds rows that failed a constraint, over all
// columns, and evolves like any other region.
struct RootNode {
    std::uint32_t width = 0;
    std::vector<std::pair<std::uint32_t, TokenHandle>> constraints;
    ChildSet trunk;
    ChildSet rest;
    bool reeval_flag = false;

    explicit RootNode(std::uint32_t w = 0);
};

struct ParsedTemplate {
    std::vector<std::string> parts; // kWildcard marks a variable slot
    std::uint64_t count = 0;
    std::uint64_t event_id = 0;

    std::string render() const;
    std::vector<std::uint32_t> wildcard_positions() const;
};

std::uint64_t template_event_id(const std::vector<std::string>& parts);

// ---- tree operations ----

// Creates a leaf (or counter when no columns remain) over the given columns.
ChildSet make_region(std::vector<std::uint32_t> cols);

StaticNode make_static_node(std::uint32_t col, TokenHandle value, ChildSet child,
                            Interner& interner);

// Total lines represented beneath a child set (leaf rows + counters).
std::uint64_t represented_rows(const ChildSet& cs);
std::uint64_t represented_rows(const RootNode& root);

// Columns not yet constrained within this region, ascending.
std::vector<std::uint32_t> region_columns(const ChildSet& cs);

// Distinct values of `col` across every line represented in the region.
struct RegionColumnStats {
    std::size_t cardinality = 0;
    bool sticky = false;
};
RegionColumnStats region_column_stats(const ChildSet& cs, std::uint32_t col);
std::size_t region_cardinality(const ChildSet& cs, std::uint32_t col);

// Blind push: descends matching branches, starts a sibling with a fresh
// leaf on a static mismatch, appends at leaves, bumps counters. Total.
void push_line(RootNode& root, const TokenizedLine& line, Interner& interner);

// Flattens a region back into raw rows, re-materializing constrained
// columns and releasing the structural token references it consumes.
RowStore collapse_to_store(ChildSet cs, Interner& interner);

// Releases every structural token reference held below cs (used before
// dropping a subtree outright, e.g. in tests).
void release_structure(ChildSet& cs, Interner& interner);
void release_root(RootNode& root, Interner& interner);

ChildSet clone_structure(const ChildSet& cs, Interner& interner);

bool structurally_equal(const ChildSet& a, const ChildSet& b);

// One template per root-to-terminal path; a leaf column with exactly one
// distinct value (and no sticky mark) is emitted as that static token.
std::vector<ParsedTemplate> extract_templates(const RootNode& root, const Interner& interner);

// ---- matching ----

struct MatchResult {
    bool matched_shape = false; // false: no bucket for this token count
    bool exact = false;         // false when the static path needed a fallback
    std::uint64_t event_id = 0;
    const ParsedTemplate* tpl = nullptr;
};

// Immutable view of an evolved tree for per-line matching; build once after
// restructuring settles, then match any number of lines.
class TemplateIndex {
public:
    void build(const RootNode& root, const Interner& interner);
    const ParsedTemplate* lookup(const void* terminal) const;
    const std::vector<ParsedTemplate>& templates() const { return templates_; }

private:
    std::vector<ParsedTemplate> templates_;
    std::unordered_map<const void*, std::size_t> by_terminal_;
};

MatchResult match_line(const RootNode& root, const TemplateIndex& index,
                       std::span<const TokenHandle> tokens);

} // namespace kelp
