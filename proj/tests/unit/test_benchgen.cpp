#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kelp/benchgen.hpp"
#include "kelp/error.hpp"
#include "kelp/tokenizer.hpp"
#include "kelp/util.hpp"

using namespace kelp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("kelp_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_pool(const TempDir& dir, const std::vector<std::string>& lines,
                       const std::string& name = "pool.txt") {
    std::ofstream out(dir.file(name));
    for (const auto& l : lines) out << l << '\n';
    return dir.file(name);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

GenerationConfig small_cfg(const TempDir& dir, const std::string& pool) {
    GenerationConfig cfg;
    cfg.pool_path = pool;
    cfg.seed = 42;
    cfg.n_lines = 2000;
    cfg.tier = 1;
    cfg.template_count_range = {4, 6};
    cfg.out_log = dir.file("out.log");
    cfg.out_truth = dir.file("truth.csv");
    cfg.out_manifest = dir.file("manifest.json");
    return cfg;
}

const std::vector<std::string> kSmallPool = {
    "auth login user <*> accepted from <*>",
    "auth login user <*> rejected from <*>",
    "disk scan volume <*> finished with <*> errors",
    "net socket closed peer <*> after <*> seconds",
    "cache flush shard <*> wrote <*> pages",
    "queue retry job <*> delayed by <*> ticks",
    "dns lookup host <*> took <*> micros",
};

} // namespace

TEST_CASE("skeleton parsing erases attached variables into generic slots") {
    auto sk = parse_skeleton("authentication failure; logname= uid=<*> euid=<*> rhost=<*>");
    REQUIRE(sk.parts.size() == 6);
    CHECK(sk.parts[0] == "authentication");
    CHECK(sk.parts[2] == "logname=");
    CHECK(sk.parts[3] == "<*>"); // uid=<*> erased whole
    CHECK(sk.parts[4] == "<*>");
    CHECK(sk.parts[5] == "<*>");
    CHECK(sk.slots == std::vector<std::uint32_t>{3, 4, 5});

    auto all_lit = parse_skeleton("server started successfully");
    CHECK(all_lit.slots.empty());
    CHECK(all_lit.parts.size() == 3);
}

TEST_CASE("pool loading dedupes, skips comments, and round-trips") {
    TempDir dir;
    auto pool = write_pool(dir, {"# comment", "a b <*>", "a b <*>", "", "a b    <*>",
                                 "c uid=<*> d", "<*> <*>"});
    auto skeletons = load_pool(pool);
    // "a b <*>" appears three times (one with extra spaces); "<*> <*>" has no
    // literal and is dropped.
    REQUIRE(skeletons.size() == 2);
    CHECK(skeletons[0].render() == "a b <*>");
    CHECK(skeletons[1].render() == "c <*> d");

    // Round trip: serialize(load(f)) == normalized f.
    auto again = write_pool(dir, {skeletons[0].render(), skeletons[1].render()}, "pool2.txt");
    auto reload = load_pool(again);
    REQUIRE(reload.size() == 2);
    CHECK(reload[0].render() == skeletons[0].render());
    CHECK(reload[1].render() == skeletons[1].render());
}

TEST_CASE("empty pool is a configuration error") {
    TempDir dir;
    auto pool = write_pool(dir, {"# nothing", "<*>"});
    CHECK_THROWS_AS(load_pool(pool), ConfigError);
}

TEST_CASE("generation is byte-identical for a fixed seed") {
    TempDir dir;
    auto pool = write_pool(dir, kSmallPool);
    auto cfg = small_cfg(dir, pool);
    auto r1 = generate(cfg);
    auto log1 = slurp(cfg.out_log);
    auto truth1 = slurp(cfg.out_truth);
    auto r2 = generate(cfg);
    CHECK(slurp(cfg.out_log) == log1);
    CHECK(slurp(cfg.out_truth) == truth1);
    CHECK(r1.log_digest == r2.log_digest);
    CHECK(r1.truth_digest == r2.truth_digest);

    auto cfg2 = cfg;
    cfg2.seed = 43;
    auto r3 = generate(cfg2);
    CHECK(r3.log_digest != r1.log_digest);
}

TEST_CASE("generation validates its configuration") {
    TempDir dir;
    auto pool = write_pool(dir, kSmallPool);
    auto cfg = small_cfg(dir, pool);
    cfg.tier = 4;
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_cfg(dir, pool);
    cfg.n_lines = 3; // below template count
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_cfg(dir, pool);
    cfg.template_count_range = {100, 120}; // pool too small
    CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("every selected template appears and truth rows align with lines") {
    TempDir dir;
    auto pool = write_pool(dir, kSmallPool);
    auto cfg = small_cfg(dir, pool);
    auto res = generate(cfg);
    CHECK(res.template_count >= 4);
    CHECK(res.template_count <= 6);

    std::ifstream truth(cfg.out_truth);
    std::string line;
    std::getline(truth, line);
    CHECK(line == "LineId,EventId,EventTemplate");
    std::uint64_t rows = 0;
    std::unordered_map<std::string, std::string> tpl_by_event;
    std::unordered_map<std::string, std::uint64_t> count_by_event;
    while (std::getline(truth, line)) {
        auto fields = csv_split(strip_eol(line));
        REQUIRE(fields.size() == 3);
        ++rows;
        CHECK(std::stoull(fields[0]) == rows); // LineId from 1, dense
        auto [it, fresh] = tpl_by_event.emplace(fields[1], fields[2]);
        if (!fresh) CHECK(it->second == fields[2]); // one template per event id
        ++count_by_event[fields[1]];
    }
    CHECK(rows == cfg.n_lines);
    CHECK(tpl_by_event.size() == res.template_count);
    for (const auto& [ev, n] : count_by_event) CHECK(n >= 1);

    // Log lines tokenize to the skeleton shape of their truth template.
    std::ifstream log(cfg.out_log);
    std::ifstream truth2(cfg.out_truth);
    std::getline(truth2, line); // header
    std::string log_line;
    std::uint64_t checked = 0;
    while (std::getline(log, log_line) && std::getline(truth2, line) && checked < 200) {
        auto fields = csv_split(strip_eol(line));
        auto log_toks = split_whitespace(log_line);
        auto tpl_toks = split_whitespace(fields[2]);
        REQUIRE(log_toks.size() == tpl_toks.size());
        for (std::size_t i = 0; i < tpl_toks.size(); ++i)
            if (tpl_toks[i] != "<*>") CHECK(log_toks[i] == tpl_toks[i]);
        ++checked;
    }
}

TEST_CASE("tier alphabets bound per-slot cardinality; tier 3 is fresh") {
    TempDir dir;
    // Single-template pool pins every line to one skeleton.
    auto pool = write_pool(dir, {"sync shard <*> pushed <*> rows"});
    GenerationConfig cfg;
    cfg.pool_path = pool;
    cfg.seed = 5;
    cfg.n_lines = 5000;
    cfg.template_count_range = {1, 1};
    cfg.out_log = dir.file("t.log");
    cfg.out_truth = dir.file("t.csv");
    cfg.out_manifest = dir.file("t.json");

    auto distinct_at = [&](std::size_t col) {
        std::ifstream log(cfg.out_log);
        std::string l;
        std::set<std::string> seen;
        while (std::getline(log, l)) {
            auto toks = split_whitespace(l);
            seen.insert(std::string(toks[col]));
        }
        return seen.size();
    };

    cfg.tier = 1;
    generate(cfg);
    CHECK(distinct_at(2) <= 50);
    CHECK(distinct_at(2) >= 40); // should use most of the alphabet over 5k draws

    cfg.tier = 2;
    generate(cfg);
    CHECK(distinct_at(2) <= 500);
    CHECK(distinct_at(2) > 300);

    cfg.tier = 3;
    generate(cfg);
    auto d = distinct_at(2);
    CHECK(static_cast<double>(d) >= 0.99 * 5000); // collision bound
}

TEST_CASE("no filler collides with any literal of the selected templates") {
    TempDir dir;
    auto pool = write_pool(dir, kSmallPool);
    auto cfg = small_cfg(dir, pool);
    cfg.tier = 3;
    generate(cfg);

    std::unordered_set<std::string> literals;
    for (const auto& sk : load_pool(pool))
        for (const auto& p : sk.parts)
            if (p != "<*>") literals.insert(p);

    // Collect slot positions per truth template, then check fillers.
    std::ifstream log(cfg.out_log);
    std::ifstream truth(cfg.out_truth);
    std::string line, row;
    std::getline(truth, row);
    while (std::getline(log, line) && std::getline(truth, row)) {
        auto fields = csv_split(strip_eol(row));
        auto toks = split_whitespace(line);
        auto tpl = split_whitespace(fields[2]);
        for (std::size_t i = 0; i < tpl.size(); ++i)
            if (tpl[i] == "<*>") CHECK(literals.count(std::string(toks[i])) == 0);
    }
}

TEST_CASE("manifest digests match the emitted files") {
    TempDir dir;
    auto pool = write_pool(dir, kSmallPool);
    auto cfg = small_cfg(dir, pool);
    auto res = generate(cfg);

    auto digest = [](const std::string& content) {
        return to_hex16(fnv1a64(content));
    };
    CHECK(res.log_digest == digest(slurp(cfg.out_log)));
    CHECK(res.truth_digest == digest(slurp(cfg.out_truth)));

    auto manifest = slurp(cfg.out_manifest);
    CHECK(manifest.find(res.log_digest) != std::string::npos);
    CHECK(manifest.find(res.truth_digest) != std::string::npos);
    CHECK(manifest.find("\"tier\": 1") != std::string::npos);
}

TEST_CASE("shipped template pool is large, realistic, and separable") {
    auto pool = load_pool(KELP_POOL_PATH);
    CHECK(pool.size() >= 185);

    // Length spread covers the small-to-long range.
    std::map<std::size_t, std::vector<const TemplateSkeleton*>> by_len;
    for (const auto& sk : pool) by_len[sk.parts.size()].push_back(&sk);
    CHECK(by_len.size() >= 10);

    // Within a length class, any two templates must differ at some column
    // where both are literal; otherwise no distribution-only parser can
    // separate them and the ground truth would be unreachable.
    std::size_t confusable = 0;
    for (const auto& [len, group] : by_len) {
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                bool separable = false;
                for (std::size_t c = 0; c < len && !separable; ++c) {
                    const auto& a = group[i]->parts[c];
                    const auto& b = group[j]->parts[c];
                    if (a != "<*>" && b != "<*>" && a != b) separable = true;
                }
                if (!separable) ++confusable;
            }
        }
    }
    CHECK(confusable == 0);

    // A first split must exist: distinct leading literals per class stay
    // within the default branch threshold.
    for (const auto& [len, group] : by_len) {
        std::set<std::string> heads;
        for (const auto* sk : group) heads.insert(sk->parts[0]);
        CHECK(heads.size() <= 8);
    }
}
