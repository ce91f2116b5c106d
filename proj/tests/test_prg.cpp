#include <doctest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "secemb/prg.hpp"

using namespace secemb;

TEST_SUITE("prg") {

namespace {

prg::Seed seed_from_hex(const std::string& hex) {
    prg::Seed s;
    for (std::size_t i = 0; i < prg::kSeedBytes; ++i)
        s.bytes[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
    return s;
}

std::string seed_to_hex(const prg::Seed& s) {
    static const char* d = "0123456789abcdef";
    std::string out;
    for (std::uint8_t b : s.bytes) {
        out.push_back(d[b >> 4]);
        out.push_back(d[b & 15]);
    }
    return out;
}

int hamming(const prg::PrgOutput& a, const prg::PrgOutput& b) {
    int dist = 0;
    for (std::size_t i = 0; i < prg::kSeedBytes; ++i) {
        dist += std::popcount(static_cast<unsigned>(a.left.bytes[i] ^ b.left.bytes[i]));
        dist += std::popcount(static_cast<unsigned>(a.right.bytes[i] ^ b.right.bytes[i]));
    }
    dist += (a.t_left ^ b.t_left) + (a.t_right ^ b.t_right);
    return dist;
}

}  // namespace

TEST_CASE("expand is deterministic") {
    Rng rng(1);
    prg::Seed s = prg::random_seed(rng);
    prg::PrgOutput a = prg::expand(s);
    prg::PrgOutput b = prg::expand(s);
    CHECK(a.left == b.left);
    CHECK(a.right == b.right);
    CHECK(a.t_left == b.t_left);
    CHECK(a.t_right == b.t_right);
}

TEST_CASE("frozen test vectors for the all-zeros and all-ones seeds") {
    std::ifstream in(std::string(SECEMB_TEST_DATA_DIR) + "/prg_test_vectors.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j["version"] == 1);

    const RingParams ring{32, 16};
    prg::Seed zeros{};
    prg::Seed ones;
    ones.bytes.fill(0xFF);
    const prg::Seed seeds[2] = {zeros, ones};
    const char* names[2] = {"zeros", "ones"};
    for (int i = 0; i < 2; ++i) {
        auto& e = j[std::string("expand_") + names[i]];
        prg::PrgOutput o = prg::expand(seeds[i]);
        CHECK(seed_to_hex(o.left) == e["left"].get<std::string>());
        CHECK(seed_to_hex(o.right) == e["right"].get<std::string>());
        CHECK(int(o.t_left) == e["t_left"].get<int>());
        CHECK(int(o.t_right) == e["t_right"].get<int>());

        CHECK(prg::convert_scalar(seeds[i], ring) ==
              j[std::string("convert1_") + names[i]].get<std::uint64_t>());
        RingVector v = prg::convert_vector(seeds[i], 65, ring);
        auto want = j[std::string("convert65_") + names[i]].get<std::vector<std::uint64_t>>();
        CHECK(v.elems == want);
    }
}

TEST_CASE("pairwise hamming distance matches the binomial oracle") {
    // 2(lambda+1) independent-looking bits: distance mean (lambda+1), sd ~8.
    Rng rng(77);
    const int trials = 10000;
    double sum = 0;
    prg::PrgOutput prev = prg::expand(prg::random_seed(rng));
    for (int i = 0; i < trials; ++i) {
        prg::PrgOutput cur = prg::expand(prg::random_seed(rng));
        sum += hamming(prev, cur);
        prev = cur;
    }
    double mean = sum / trials;
    double sd_of_mean = std::sqrt(258.0 * 0.25) / std::sqrt(double(trials));
    CHECK(std::abs(mean - 129.0) <= 5 * sd_of_mean);
}

TEST_CASE("no collisions across many expansions") {
    Rng rng(5);
    std::set<prg::Seed> seen;
    for (int i = 0; i < 100000; ++i) {
        prg::PrgOutput o = prg::expand(prg::random_seed(rng));
        CHECK(seen.insert(o.left).second);
    }
}

TEST_CASE("convert is deterministic and unified across lengths") {
    Rng rng(2);
    const RingParams ring{32, 16};
    for (int i = 0; i < 100; ++i) {
        prg::Seed s = prg::random_seed(rng);
        CHECK(prg::convert_scalar(s, ring) == prg::convert_scalar(s, ring));
        CHECK(prg::convert_vector(s, 1, ring).elems[0] == prg::convert_scalar(s, ring));
        RingVector a = prg::convert_vector(s, 65, ring);
        RingVector b = prg::convert_vector(s, 65, ring);
        CHECK(a.elems == b.elems);
        CHECK(a.size() == 65);
    }
}

TEST_CASE("converted values look uniform over the ring") {
    Rng rng(3);
    const RingParams ring{32, 16};
    const int n = 100000;
    double sum_scalar = 0, sum_c7 = 0, sum_c64 = 0;
    for (int i = 0; i < n; ++i) {
        prg::Seed s = prg::random_seed(rng);
        sum_scalar += static_cast<double>(ring_to_signed(ring, prg::convert_scalar(s, ring)));
        if (i < 10000) {
            RingVector v = prg::convert_vector(s, 65, ring);
            sum_c7 += static_cast<double>(ring_to_signed(ring, v.elems[7]));
            sum_c64 += static_cast<double>(ring_to_signed(ring, v.elems[64]));
        }
    }
    const double bound_100k = 5.0 * std::ldexp(1.0, 31) / std::sqrt(12.0 * n);
    const double bound_10k = 5.0 * std::ldexp(1.0, 31) / std::sqrt(12.0 * 10000);
    CHECK(std::abs(sum_scalar / n) < bound_100k);
    CHECK(std::abs(sum_c7 / 10000) < bound_10k);
    CHECK(std::abs(sum_c64 / 10000) < bound_10k);
}

TEST_CASE("batched expansion equals one-at-a-time expansion") {
    Rng rng(4);
    std::vector<prg::Seed> in(257);
    for (auto& s : in) s = prg::random_seed(rng);
    std::vector<prg::Seed> left(in.size()), right(in.size());
    std::vector<std::uint8_t> t(in.size());
    prg::expand_batch(in.data(), in.size(), left.data(), right.data(), t.data());
    for (std::size_t i = 0; i < in.size(); ++i) {
        prg::PrgOutput o = prg::expand(in[i]);
        CHECK(o.left == left[i]);
        CHECK(o.right == right[i]);
        CHECK(o.t_left == (t[i] & 1));
        CHECK(o.t_right == ((t[i] >> 1) & 1));
    }
}

TEST_CASE("stream parts combine to the convert stream") {
    Rng rng(6);
    const RingParams ring{32, 16};
    prg::Seed s = prg::random_seed(rng);
    const std::size_t nbytes = 65 * 4;
    const std::size_t stride = prg::convert_stream_stride(nbytes);
    std::vector<std::uint8_t> cipher(stride), input(stride);
    prg::convert_stream_parts_into(&s, 1, nbytes, cipher.data(), input.data());
    RingVector v = prg::convert_vector(s, 65, ring);
    for (std::size_t k = 0; k < 65; ++k) {
        std::uint32_t c, x;
        std::memcpy(&c, cipher.data() + 4 * k, 4);
        std::memcpy(&x, input.data() + 4 * k, 4);
        CHECK(std::uint64_t{c ^ x} == v.elems[k]);
    }
}

TEST_CASE("expansion counter is instrumented") {
    prg::reset_expand_count();
    Rng rng(8);
    std::vector<prg::Seed> in(100);
    for (auto& s : in) s = prg::random_seed(rng);
    std::vector<prg::Seed> l(100), r(100);
    std::vector<std::uint8_t> t(100);
    prg::expand_batch(in.data(), 100, l.data(), r.data(), t.data());
    prg::expand(in[0]);
    CHECK(prg::expand_count() == 101);
}

}  // TEST_SUITE
