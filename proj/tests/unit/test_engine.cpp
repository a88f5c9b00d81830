#include <doctest.h>

#include <map>
#include <sstream>

#include "helpers.hpp"
#include "kelp/engine.hpp"

using namespace kelp;

TEST_CASE("empty batch leaves the engine unchanged") {
    Engine e;
    auto st = e.ingest_batch({});
    CHECK(st.lines_in == 0);
    CHECK(st.accepted == 0);
    CHECK(e.buckets().empty());
    e.finalize();
    CHECK(e.aggregated_templates().empty());
}

TEST_CASE("frequency map of the two-line client stream is exact") {
    Engine e;
    std::vector<std::string> lines = {
        "Connected to client Sid on port 8080",
        "Connected to client Luke on port 8000",
    };
    e.ingest_batch(lines);

    REQUIRE(e.buckets().count(7) == 1);
    std::ostringstream os;
    e.buckets().at(7).fm.dump_tsv(os);
    CHECK(os.str() ==
          "col\ttoken\tcount\n"
          "0\tConnected\t2\n"
          "1\tto\t2\n"
          "2\tclient\t2\n"
          "3\tSid\t1\n"
          "3\tLuke\t1\n"
          "4\ton\t2\n"
          "5\tport\t2\n"
          "6\t8080\t1\n"
          "6\t8000\t1\n");
}

TEST_CASE("two-line service stream generalizes to one template after a pass") {
    Engine e;
    std::vector<std::string> lines = {
        "Connected to internal service on port 8080",
        "Connected to external service on port 443",
    };
    auto st = e.ingest_batch(lines);
    CHECK(st.accepted == 2);
    CHECK(st.reeval_passes >= 1);
    e.finalize();

    auto tpls = e.aggregated_templates();
    REQUIRE(tpls.size() == 1);
    CHECK(tpls[0].render() == "Connected to <*> service on port <*>");
    CHECK(tpls[0].count == 2);
}

TEST_CASE("replaying a batch doubles counts without changing the template set") {
    Rng rng(7);
    // Slot pool larger than the branch threshold so structure is stable.
    auto corpus = kelp::test::make_corpus(rng, 5, 3, 200, 30);

    Engine e;
    e.ingest_batch(corpus.lines);
    e.finalize();
    auto first = e.aggregated_templates();

    e.ingest_batch(corpus.lines);
    e.finalize();
    auto second = e.aggregated_templates();

    REQUIRE(first.size() == second.size());
    std::map<std::uint64_t, std::uint64_t> counts1, counts2;
    for (const auto& t : first) counts1[t.event_id] = t.count;
    for (const auto& t : second) counts2[t.event_id] = t.count;
    for (const auto& [id, c] : counts1) {
        REQUIRE(counts2.count(id) == 1);
        CHECK(counts2[id] == 2 * c);
    }
}

TEST_CASE("mixed-width stream: bucket sizes sum to accepted lines") {
    Engine e;
    Rng rng(99);
    std::vector<std::string> lines;
    for (int i = 0; i < 5000; ++i) {
        int width = 1 + static_cast<int>(rng.below(9));
        std::string l;
        for (int c = 0; c < width; ++c) {
            if (c) l.push_back(' ');
            l += "w" + std::to_string(width) + "c" + std::to_string(c);
        }
        lines.push_back(l);
    }
    lines.push_back("   "); // skipped
    lines.push_back("");
    auto st = e.ingest_batch(lines);
    CHECK(st.skipped_blank == 2);
    CHECK(st.accepted == 5000);

    std::uint64_t sum = 0;
    for (const auto& [w, bucket] : e.buckets()) {
        CHECK(bucket.fm.width() == w);
        sum += bucket.lines;
    }
    CHECK(sum == 5000);
}

TEST_CASE("identical input and config produce identical dumps") {
    Rng rng(123);
    auto corpus = kelp::test::make_corpus(rng, 6, 4, 2000, 40);

    auto run = [&](void) {
        Engine e;
        // Split into uneven batches to exercise batch boundaries.
        std::vector<std::string> a(corpus.lines.begin(), corpus.lines.begin() + 700);
        std::vector<std::string> b(corpus.lines.begin() + 700, corpus.lines.end());
        e.ingest_batch(a);
        e.ingest_batch(b);
        e.finalize();
        std::ostringstream t, f;
        e.dump_templates(t);
        e.dump_freqmaps(f);
        return std::make_pair(t.str(), f.str());
    };
    auto r1 = run();
    auto r2 = run();
    CHECK(r1.first == r2.first);
    CHECK(r1.second == r2.second);
    CHECK(!r1.first.empty());
}

TEST_CASE("audit passes after a full run with trimming") {
    EngineConfig cfg;
    cfg.evolution.trim_capacity = 32;
    cfg.evolution.reeval_interval = 200;
    Engine e(cfg);
    Rng rng(321);
    auto corpus = kelp::test::make_corpus(rng, 5, 4, 3000, 500);
    for (std::size_t off = 0; off < corpus.lines.size(); off += 250) {
        std::size_t end = std::min(corpus.lines.size(), off + 250);
        std::vector<std::string> batch(corpus.lines.begin() + off, corpus.lines.begin() + end);
        e.ingest_batch(batch);
    }
    e.finalize();

    auto rep = e.audit();
    CHECK(rep.ok());
    CHECK(rep.live_tokens == rep.expected_live);
    CHECK(rep.refcounts_ok);
    // Conservation: represented rows equal recorded (post-trim) lines.
    std::uint64_t fm_lines = 0;
    for (const auto& [w, bucket] : e.buckets()) fm_lines += bucket.fm.total_lines();
    CHECK(e.represented_total() == fm_lines);
}
