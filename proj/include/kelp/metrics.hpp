#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kelp {

// A partition of lines into groups with a template per group. Group ids are
// opaque labels; all metrics are label-invariant.
struct Grouping {
    std::unordered_map<std::uint64_t, std::string> line_group;
    std::map<std::string, std::vector<std::uint64_t>> groups;
    std::unordered_map<std::string, std::string> templates;

    void add(std::uint64_t line, std::string group, std::string tpl);
    std::size_t lines() const { return line_group.size(); }
};

Grouping load_truth_csv(const std::string& path);
Grouping load_parsed_jsonl(const std::string& path);
Grouping load_parsed_csv(const std::string& path);
// Dispatches on extension (.jsonl/.json vs .csv).
Grouping load_parsed(const std::string& path);

// Collapses runs of consecutive "<*>" tokens to a single one, so slot
// granularity differences between equivalent templates do not penalize.
std::string normalize_template(std::string_view tpl);

// Fraction of lines whose predicted group's line-set exactly equals their
// ground-truth group's line-set.
double grouping_accuracy(const Grouping& pred, const Grouping& gt);

// Fraction of lines whose predicted template equals the ground-truth
// template after wildcard normalization.
double parse_accuracy(const Grouping& pred, const Grouping& gt);

struct FgaResult {
    double fga = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::uint64_t matched_groups = 0;
};

// Group-level F1 over exact line-set matches.
FgaResult fga(const Grouping& pred, const Grouping& gt);

struct EvalReport {
    double ga = 0.0;
    double pa = 0.0;
    FgaResult f;
    std::size_t pred_groups = 0;
    std::size_t gt_groups = 0;
    std::size_t lines = 0;
    double runtime_seconds = 0.0;

    std::string to_json() const;
};

EvalReport evaluate(const Grouping& pred, const Grouping& gt);

} // namespace kelp
