#include "kelp/metrics.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "kelp/error.hpp"
#include "kelp/util.hpp"

namespace kelp {

void Grouping::add(std::uint64_t line, std::string group, std::string tpl) {
    auto [it, fresh] = line_group.emplace(line, group);
    if (!fresh) throw ConfigError("duplicate line id in grouping: " + std::to_string(line));
    groups[group].push_back(line);
    if (!tpl.empty()) templates.emplace(std::move(group), std::move(tpl));
}

Grouping load_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth file: " + path);
    Grouping g;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        std::string_view sv = strip_eol(line);
        if (sv.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = csv_split(sv);
        if (fields.size() < 3)
            throw ConfigError("malformed truth row (want LineId,EventId,EventTemplate): " + line);
        g.add(std::stoull(fields[0]), fields[1], fields[2]);
    }
    if (g.lines() == 0) throw ConfigError("truth file has no rows: " + path);
    return g;
}

Grouping load_parsed_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open parsed file: " + path);
    Grouping g;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view sv = strip_eol(line);
        if (sv.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(sv, nullptr, false);
        if (rec.is_discarded()) throw ConfigError("malformed JSON line in " + path);
        g.add(rec.at("line_no").get<std::uint64_t>(), rec.at("event_id").get<std::string>(),
              rec.at("template").get<std::string>());
    }
    if (g.lines() == 0) throw ConfigError("parsed file has no rows: " + path);
    return g;
}

Grouping load_parsed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open parsed file: " + path);
    Grouping g;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        std::string_view sv = strip_eol(line);
        if (sv.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = csv_split(sv);
        if (fields.size() < 3) throw ConfigError("malformed parsed CSV row: " + line);
        g.add(std::stoull(fields[0]), fields[1], fields[2]);
    }
    if (g.lines() == 0) throw ConfigError("parsed file has no rows: " + path);
    return g;
}

Grouping load_parsed(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".csv") return load_parsed_csv(path);
    return load_parsed_jsonl(path);
}

std::string normalize_template(std::string_view tpl) {
    auto tokens = split_whitespace(tpl);
    std::string out;
    bool prev_wild = false;
    for (auto tok : tokens) {
        bool wild = tok == "<*>";
        if (wild && prev_wild) continue;
        if (!out.empty()) out.push_back(' ');
        out += tok;
        prev_wild = wild;
    }
    return out;
}

static void check_universe(const Grouping& pred, const Grouping& gt) {
    if (pred.lines() != gt.lines())
        throw ConfigError("evaluation error: line universes differ (" +
                          std::to_string(pred.lines()) + " vs " + std::to_string(gt.lines()) + ")");
    for (const auto& [line, group] : pred.line_group)
        if (gt.line_group.find(line) == gt.line_group.end())
            throw ConfigError("evaluation error: line " + std::to_string(line) +
                              " missing from ground truth");
}

// A predicted group matches iff its line set equals the ground-truth group
// of its members exactly.
static bool group_matches(const std::vector<std::uint64_t>& lines, const Grouping& gt) {
    const std::string& gt_key = gt.line_group.at(lines.front());
    if (gt.groups.at(gt_key).size() != lines.size()) return false;
    for (std::uint64_t l : lines)
        if (gt.line_group.at(l) != gt_key) return false;
    return true;
}

double grouping_accuracy(const Grouping& pred, const Grouping& gt) {
    check_universe(pred, gt);
    std::uint64_t correct = 0;
    for (const auto& [key, lines] : pred.groups)
        if (group_matches(lines, gt)) correct += lines.size();
    return static_cast<double>(correct) / static_cast<double>(gt.lines());
}

double parse_accuracy(const Grouping& pred, const Grouping& gt) {
    check_universe(pred, gt);
    std::unordered_map<std::string, std::string> norm_pred, norm_gt;
    for (const auto& [g, t] : pred.templates) norm_pred.emplace(g, normalize_template(t));
    for (const auto& [g, t] : gt.templates) norm_gt.emplace(g, normalize_template(t));

    std::uint64_t correct = 0;
    for (const auto& [line, group] : pred.line_group) {
        auto pit = norm_pred.find(group);
        if (pit == norm_pred.end())
            throw ConfigError("evaluation error: no template for predicted group " + group);
        auto git = norm_gt.find(gt.line_group.at(line));
        if (git == norm_gt.end())
            throw ConfigError("evaluation error: no template for truth group");
        if (pit->second == git->second) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(gt.lines());
}

FgaResult fga(const Grouping& pred, const Grouping& gt) {
    check_universe(pred, gt);
    FgaResult res;
    for (const auto& [key, lines] : pred.groups)
        if (group_matches(lines, gt)) ++res.matched_groups;
    if (!pred.groups.empty())
        res.precision = static_cast<double>(res.matched_groups) /
                        static_cast<double>(pred.groups.size());
    if (!gt.groups.empty())
        res.recall =
            static_cast<double>(res.matched_groups) / static_cast<double>(gt.groups.size());
    if (res.precision + res.recall > 0.0)
        res.fga = 2.0 * res.precision * res.recall / (res.precision + res.recall);
    return res;
}

std::string EvalReport::to_json() const {
    nlohmann::json j{
        {"GA", ga},
        {"PA", pa},
        {"FGA", f.fga},
        {"precision", f.precision},
        {"recall", f.recall},
        {"matched_groups", f.matched_groups},
        {"pred_groups", pred_groups},
        {"gt_groups", gt_groups},
        {"lines", lines},
        {"runtime_seconds", runtime_seconds},
    };
    return j.dump(2);
}

EvalReport evaluate(const Grouping& pred, const Grouping& gt) {
    auto start = std::chrono::steady_clock::now();
    EvalReport rep;
    rep.ga = grouping_accuracy(pred, gt);
    rep.pa = parse_accuracy(pred, gt);
    rep.f = fga(pred, gt);
    rep.pred_groups = pred.groups.size();
    rep.gt_groups = gt.groups.size();
    rep.lines = gt.lines();
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace kelp
