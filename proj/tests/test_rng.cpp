#include <doctest.h>

#include <cmath>

#include "secemb/rng.hpp"

using namespace secemb;

TEST_SUITE("rng") {

TEST_CASE("streams replay identically") {
    Rng a = derive_rng(42, StreamPurpose::crypto, {3, 17});
    Rng b = derive_rng(42, StreamPurpose::crypto, {3, 17});
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream paths decorrelate") {
    Rng a = derive_rng(42, StreamPurpose::crypto, {3, 17});
    Rng b = derive_rng(42, StreamPurpose::crypto, {3, 18});
    Rng c = derive_rng(42, StreamPurpose::padding, {3, 17});
    CHECK(a.next_u64() != b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
}

TEST_CASE("below stays in range and covers it") {
    Rng rng(5);
    bool seen[7] = {};
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen[v] = true;
    }
    for (bool s : seen) CHECK(s);
}

TEST_CASE("gaussian moments are sane") {
    Rng rng(9);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

}  // TEST_SUITE
