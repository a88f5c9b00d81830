#include <doctest.h>

#include <vector>

#include "kelp/interner.hpp"
#include "kelp/rle.hpp"
#include "kelp/rng.hpp"

using namespace kelp;

TEST_CASE("runs extend on repeats and break on change") {
    Interner in;
    auto a = in.intern("a");
    auto b = in.intern("b");

    RleColumn col;
    col.push(a);
    col.push(a);
    col.push(a);
    REQUIRE(col.runs().size() == 1);
    CHECK(col.runs()[0].len == 3);
    CHECK(col.runs()[0].value == a);
    CHECK(col.size() == 3);

    RleColumn alt;
    alt.push(a);
    alt.push(b);
    alt.push(a);
    REQUIRE(alt.runs().size() == 3);
    CHECK(alt.size() == 3);
}

TEST_CASE("10k random pushes match a flat list oracle") {
    Interner in;
    Rng rng(11);
    std::vector<TokenHandle> pool;
    for (int i = 0; i < 6; ++i) pool.push_back(in.intern("v" + std::to_string(i)));

    RleColumn col;
    std::vector<TokenHandle> flat;
    for (int i = 0; i < 10000; ++i) {
        TokenHandle v = pool[rng.below(pool.size())];
        col.push(v);
        flat.push_back(v);
    }
    CHECK(col.size() == flat.size());
    CHECK(col.materialize() == flat);

    // Maximal runs: no two adjacent runs share a value.
    for (std::size_t i = 1; i < col.runs().size(); ++i)
        CHECK(col.runs()[i].value != col.runs()[i - 1].value);

    // select() agrees with direct indexing.
    std::vector<std::uint64_t> rows;
    for (std::uint64_t r = 0; r < flat.size(); r += 3) rows.push_back(r);
    auto sel = col.select(rows).materialize();
    REQUIRE(sel.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(sel[i] == flat[rows[i]]);

    // drop_front() agrees with erasing the prefix.
    RleColumn dropped = col;
    dropped.drop_front(1234);
    std::vector<TokenHandle> tail(flat.begin() + 1234, flat.end());
    CHECK(dropped.materialize() == tail);
}

TEST_CASE("distinct values in first-appearance order") {
    Interner in;
    auto a = in.intern("a");
    auto b = in.intern("b");
    auto c = in.intern("c");
    RleColumn col;
    for (TokenHandle v : {b, b, a, c, a, b}) col.push(v);
    auto d = col.distinct_values();
    REQUIRE(d.size() == 3);
    CHECK(d[0] == b);
    CHECK(d[1] == a);
    CHECK(d[2] == c);
    CHECK(col.distinct_count() == 3);
}
