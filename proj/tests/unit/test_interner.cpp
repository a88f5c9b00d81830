#include <doctest.h>

#include <map>
#include <string>
#include <unordered_map>

#include "kelp/error.hpp"
#include "kelp/interner.hpp"
#include "kelp/rng.hpp"

using namespace kelp;

TEST_CASE("intern is idempotent and distinguishes inputs") {
    Interner in;
    auto a = in.intern("Connected");
    auto b = in.intern("Connected");
    CHECK(a == b);
    auto sid = in.intern("Sid");
    auto luke = in.intern("Luke");
    CHECK(sid != luke);
    CHECK(in.live_count() == 3);
}

TEST_CASE("empty token is a tokenization error") {
    Interner in;
    CHECK_THROWS_AS(in.intern(""), InvariantError);
}

TEST_CASE("resolve round-trips and rejects reclaimed handles") {
    Interner in;
    auto h = in.intern("port");
    CHECK(in.resolve(h) == "port");

    in.retain(h, 1);
    CHECK(in.release(h, 1)); // hit zero
    CHECK_THROWS_AS(in.resolve(h), InvariantError);
}

TEST_CASE("resolve-of-intern is the identity on random strings") {
    Interner in;
    Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
        std::string s = "tok_" + std::to_string(rng.next() % 100000) + "_" + std::to_string(i % 97);
        auto h = in.intern(s);
        CHECK(in.resolve(h) == s);
        CHECK(in.intern(in.resolve(h)) == h);
    }
}

TEST_CASE("retain and release count arithmetic") {
    Interner in;
    auto h = in.intern("x");
    in.retain(h, 2);
    CHECK_FALSE(in.release(h, 1));
    CHECK(in.refcount(h) == 1);
    CHECK(in.release(h, 1));
    CHECK_FALSE(in.is_live(h));

    auto g = in.intern("y");
    CHECK_THROWS_AS(in.release(g, 1), InvariantError); // never clamps below zero
}

TEST_CASE("slot ids are reused LIFO and never alias live handles") {
    Interner in;
    auto sid = in.intern("Sid");
    in.retain(sid, 1);
    auto luke = in.intern("Luke");
    in.retain(luke, 1);

    in.release(sid, 1); // Sid's slot freed
    auto x = in.intern("x");
    CHECK(x.id == sid.id); // LIFO reuse
    CHECK(in.resolve(x) == "x");
    CHECK(in.resolve(luke) == "Luke");
}

TEST_CASE("random retain/release schedule matches a shadow counter") {
    Interner in;
    Rng rng(7);
    std::map<std::string, std::uint64_t> shadow;
    std::unordered_map<std::string, TokenHandle> handles;

    for (int step = 0; step < 20000; ++step) {
        std::string key = "k" + std::to_string(rng.below(200));
        bool do_retain = rng.below(3) != 0;
        auto it = shadow.find(key);
        if (do_retain || it == shadow.end() || it->second == 0) {
            auto h = in.intern(key);
            in.retain(h, 1);
            handles[key] = h;
            ++shadow[key];
        } else {
            bool freed = in.release(handles[key], 1);
            --it->second;
            CHECK(freed == (it->second == 0));
            if (it->second == 0) shadow.erase(it);
        }
    }
    std::size_t live_with_refs = 0;
    for (const auto& [key, refs] : shadow) {
        CHECK(in.is_live(handles[key]));
        CHECK(in.refcount(handles[key]) == refs);
        ++live_with_refs;
    }
    CHECK(in.live_count() == live_with_refs);
}
