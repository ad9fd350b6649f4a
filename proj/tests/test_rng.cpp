#include "doctest.h"

#include <set>

#include "glyphforge/error.hpp"
#include "glyphforge/rng.hpp"

using namespace glyphforge;

TEST_CASE("mix64 matches the reference splitmix64 stream") {
    CHECK(mix64(0) == 0xe220a8397b1dcdafull);
    CHECK(mix64(1) == 0x910a2dec89025cc1ull);
    CHECK(mix64(42) == 0xbdd732262feb6e95ull);
    CHECK(mix64(0xdeadbeefull) == 0x4adfb90f68c9eb9bull);
}

TEST_CASE("same seed gives same stream, different seed differs") {
    Rng a(7), b(7), c(8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        uint64_t x = a.next();
        all_equal = all_equal && x == b.next();
        any_diff = any_diff || x != c.next();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("below stays in range and covers small ranges") {
    Rng rng(3);
    std::set<uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        uint64_t v = rng.below(5);
        CHECK(v < 5);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
    CHECK_THROWS_AS(rng.below(0), Error);
}

TEST_CASE("range_int is inclusive on both ends") {
    Rng rng(9);
    bool lo_hit = false, hi_hit = false;
    for (int i = 0; i < 2000; ++i) {
        long long v = rng.range_int(-2, 2);
        CHECK(v >= -2);
        CHECK(v <= 2);
        lo_hit = lo_hit || v == -2;
        hi_hit = hi_hit || v == 2;
    }
    CHECK(lo_hit);
    CHECK(hi_hit);
    CHECK_THROWS_AS(rng.range_int(3, 2), Error);
}

TEST_CASE("unit lies in [0,1)") {
    Rng rng(11);
    double mn = 1.0, mx = 0.0;
    for (int i = 0; i < 5000; ++i) {
        double u = rng.unit();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
    CHECK(mx > 0.9);
    CHECK(mn < 0.1);
}

TEST_CASE("forked streams are independent of parent consumption") {
    Rng parent(21);
    Rng f1 = parent.fork(5);
    parent.next();
    parent.next();
    Rng f2 = parent.fork(5);
    for (int i = 0; i < 16; ++i)
        CHECK(f1.next() == f2.next());
    Rng other = parent.fork(6);
    bool differs = false;
    Rng f3 = parent.fork(5);
    for (int i = 0; i < 16; ++i)
        differs = differs || f3.next() != other.next();
    CHECK(differs);
}
