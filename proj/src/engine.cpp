#include "kelp/engine.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "kelp/error.hpp"
#include "kelp/util.hpp"

namespace kelp {

Engine::Engine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.evolution.validate();
}

Engine::~Engine() = default;

void Engine::process_line(std::string_view raw) {
    ++totals_.lines_in;
    ++line_no_;
    std::string_view line = strip_eol(raw);
    if (is_blank(line)) {
        ++totals_.skipped_blank;
        return;
    }
    std::string sanitized;
    if (!utf8_valid(line)) {
        sanitized = utf8_sanitize(line);
        line = sanitized;
    }

    scratch_.tokens.clear();
    scratch_.source_line_no = line_no_;
    const std::string& delims = cfg_.tokenizer.extra_delimiters;
    size_t i = 0;
    const size_t n = line.size();
    auto is_sep = [&](char c) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v')
            return true;
        return delims.find(c) != std::string::npos;
    };
    while (i < n) {
        while (i < n && is_sep(line[i])) ++i;
        size_t start = i;
        while (i < n && !is_sep(line[i])) ++i;
        if (i > start) scratch_.tokens.push_back(interner_.intern(line.substr(start, i - start)));
    }
    if (scratch_.tokens.empty()) {
        ++totals_.skipped_blank;
        return;
    }
    ++totals_.accepted;

    auto width = static_cast<std::uint32_t>(scratch_.tokens.size());
    auto it = buckets_.find(width);
    if (it == buckets_.end()) {
        it = buckets_.emplace(std::piecewise_construct, std::forward_as_tuple(width),
                              std::forward_as_tuple(width, interner_))
                 .first;
    }
    Bucket& bucket = it->second;
    bucket.fm.record(scratch_);
    push_line(bucket.root, scratch_, interner_);
    ++bucket.lines;
    ++bucket.lines_since_reeval;
    bucket.dirty = true;
}

void Engine::end_batch(BatchStats& st, bool force_reeval) {
    for (auto& [width, bucket] : buckets_) {
        if (!bucket.dirty && !force_reeval) continue;
        if (bucket.lines == 0) continue;

        ValidationOutcome v = validate_root(bucket.root, bucket.fm, interner_, cfg_.slope_mode);
        if (v.changed) ++st.validations_changed;

        if (bucket.root.reeval_flag ||
            bucket.lines_since_reeval >= cfg_.evolution.reeval_interval || force_reeval) {
            bucket.root.trunk = reeval(std::move(bucket.root.trunk), cfg_.evolution, interner_);
            bucket.root.rest = reeval(std::move(bucket.root.rest), cfg_.evolution, interner_);
            bucket.root.reeval_flag = false;
            bucket.lines_since_reeval = 0;
            ++st.reeval_passes;
        }
        if (cfg_.trim_enabled && !force_reeval) {
            TrimStats t = trim(bucket.root, bucket.fm, interner_, cfg_.evolution);
            st.rows_trimmed += t.rows_discarded;
            st.folds += t.folds;
        }
        bucket.dirty = false;
    }
    totals_.validations_changed += st.validations_changed;
    totals_.reeval_passes += st.reeval_passes;
    totals_.rows_trimmed += st.rows_trimmed;
}

BatchStats Engine::ingest_batch(std::span<const std::string> lines) {
    finalized_ = false;
    indexes_.clear();
    BatchStats st;
    std::uint64_t before_buckets = buckets_.size();
    std::uint64_t before_in = totals_.lines_in;
    std::uint64_t before_acc = totals_.accepted;
    std::uint64_t before_blank = totals_.skipped_blank;
    for (const auto& line : lines) process_line(line);
    st.lines_in = totals_.lines_in - before_in;
    st.accepted = totals_.accepted - before_acc;
    st.skipped_blank = totals_.skipped_blank - before_blank;
    st.new_buckets = buckets_.size() - before_buckets;
    end_batch(st, false);
    return st;
}

void Engine::finalize() {
    if (finalized_) return;
    BatchStats st;
    end_batch(st, true);
    indexes_.clear();
    for (auto& [width, bucket] : buckets_) {
        if (bucket.lines == 0) continue;
        indexes_[width].build(bucket.root, interner_);
    }
    finalized_ = true;
}

std::uint64_t Engine::represented_total() const {
    std::uint64_t total = 0;
    for (const auto& [width, bucket] : buckets_) total += represented_rows(bucket.root);
    return total;
}

std::vector<ParsedTemplate> Engine::raw_templates() const {
    std::vector<ParsedTemplate> out;
    for (const auto& [width, bucket] : buckets_) {
        auto tpls = extract_templates(bucket.root, interner_);
        for (auto& t : tpls) out.push_back(std::move(t));
    }
    return out;
}

std::vector<ParsedTemplate> Engine::aggregated_templates() const {
    std::vector<ParsedTemplate> raw = raw_templates();
    std::unordered_map<std::uint64_t, std::size_t> by_id;
    std::vector<ParsedTemplate> out;
    for (auto& t : raw) {
        auto [it, fresh] = by_id.try_emplace(t.event_id, out.size());
        if (fresh)
            out.push_back(std::move(t));
        else
            out[it->second].count += t.count;
    }
    std::sort(out.begin(), out.end(), [](const ParsedTemplate& a, const ParsedTemplate& b) {
        if (a.count != b.count) return a.count > b.count;
        auto ra = a.render();
        auto rb = b.render();
        if (ra != rb) return ra < rb;
        return a.event_id < b.event_id;
    });
    return out;
}

void Engine::dump_templates(std::ostream& os, bool with_counts) const {
    for (const auto& t : aggregated_templates()) {
        os << to_hex16(t.event_id) << '\t';
        if (with_counts) os << t.count << '\t';
        os << t.render() << '\n';
    }
}

void Engine::dump_freqmaps(std::ostream& os) const {
    for (const auto& [width, bucket] : buckets_) {
        os << "# bucket width=" << width << " lines=" << bucket.fm.total_lines() << '\n';
        bucket.fm.dump_tsv(os);
    }
}

EngineMatch Engine::match(std::string_view line) const {
    if (!finalized_)
        throw InvariantError("match: engine not finalized (templates not extracted)");
    EngineMatch out;
    line = strip_eol(line);
    std::string sanitized;
    if (!utf8_valid(line)) {
        sanitized = utf8_sanitize(line);
        line = sanitized;
    }
    auto views = split_tokens(line, cfg_.tokenizer);
    if (views.empty()) {
        out.event_id = fnv1a64("unseen-shape:blank");
        return out;
    }
    auto width = static_cast<std::uint32_t>(views.size());
    auto bit = buckets_.find(width);
    auto iit = indexes_.find(width);
    if (bit == buckets_.end() || iit == indexes_.end()) {
        out.event_id = fnv1a64("unseen-shape:" + std::to_string(width));
        return out;
    }

    // Read-only token lookup; tokens never seen by the parser map to a
    // sentinel id that matches no live handle.
    std::vector<TokenHandle> tokens(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        TokenHandle h{~std::uint64_t{0}};
        interner_.find(views[i], h);
        tokens[i] = h;
    }
    MatchResult res = match_line(bit->second.root, iit->second, tokens);
    out.matched_shape = res.matched_shape;
    out.exact = res.exact;
    out.event_id = res.event_id;
    if (res.tpl) {
        out.template_str = res.tpl->render();
        for (std::uint32_t pos : res.tpl->wildcard_positions())
            out.variables.emplace_back(views[pos]);
    }
    return out;
}

AuditReport Engine::audit() const {
    AuditReport rep;
    std::unordered_map<std::uint64_t, std::uint64_t> expected; // token id -> refs
    std::unordered_map<std::uint64_t, std::uint64_t> fm_refs;

    for (const auto& [width, bucket] : buckets_) {
        for (std::size_t c = 0; c < bucket.fm.width(); ++c)
            for (const auto& [id, count] : bucket.fm.column(c)) {
                expected[id] += count;
                fm_refs[id] += count;
            }
    }
    rep.fm_distinct = fm_refs.size();

    auto walk = [&](const ChildSet& cs, auto&& self) -> void {
        if (!cs.is_branches()) return;
        for (const auto& b : cs.branches()) {
            expected[b.value.id] += 1;
            self(b.child, self);
        }
    };
    for (const auto& [width, bucket] : buckets_) {
        walk(bucket.root.trunk, walk);
        walk(bucket.root.rest, walk);
        for (const auto& [c, v] : bucket.root.constraints) expected[v.id] += 1;
    }

    rep.expected_live = expected.size();
    rep.live_tokens = interner_.live_count();
    for (const auto& [id, refs] : expected) {
        if (fm_refs.find(id) == fm_refs.end()) ++rep.structure_only;
        TokenHandle h{id};
        if (!interner_.is_live(h) || interner_.refcount(h) != refs) rep.refcounts_ok = false;
    }
    return rep;
}

} // namespace kelp
