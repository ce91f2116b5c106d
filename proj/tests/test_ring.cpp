#include <doctest.h>

#include "secemb/ring.hpp"
#include "secemb/rng.hpp"

using namespace secemb;

TEST_SUITE("ring") {

const RingParams kP{32, 16};

TEST_CASE("quantize hits the documented fixed-point grid") {
    CHECK(quantize(kP, 0.0) == 0);
    CHECK(quantize(kP, 1.0) == 65536);
    // -0.25 * 2^16 = -16384, two's complement in 32 bits
    CHECK(quantize(kP, -0.25) == (1ULL << 32) - 16384);
}

TEST_CASE("quantize/dequantize round-trips within half an ulp") {
    Rng rng(11);
    for (int i = 0; i < 20000; ++i) {
        double x = (rng.next_double01() - 0.5) * 2 * 30000.0;
        double back = dequantize(kP, quantize(kP, x));
        CHECK(std::abs(back - x) <= 0.5 / kP.scale() + 1e-12);
    }
}

TEST_CASE("quantize rejects values outside the signed range") {
    CHECK_THROWS_AS(quantize(kP, 32768.0), std::overflow_error);
    CHECK_THROWS_AS(quantize(kP, -32768.0), std::overflow_error);
    CHECK(quantize(kP, 32767.99) != 0);
}

TEST_CASE("fixed-point addition is exact") {
    CHECK(ring_add(kP, quantize(kP, 1.5), quantize(kP, 2.5)) == quantize(kP, 4.0));
}

TEST_CASE("abelian group laws hold exactly on random triples") {
    Rng rng(7);
    const std::uint64_t mask = kP.mask();
    for (int i = 0; i < 100000; ++i) {
        RingScalar a = rng.next_u64() & mask;
        RingScalar b = rng.next_u64() & mask;
        RingScalar c = rng.next_u64() & mask;
        CHECK(ring_add(kP, a, b) == ring_add(kP, b, a));
        CHECK(ring_add(kP, ring_add(kP, a, b), c) == ring_add(kP, a, ring_add(kP, b, c)));
        CHECK(ring_add(kP, a, ring_neg(kP, a)) == 0);
    }
}

TEST_CASE("additive sharings always reconstruct exactly") {
    Rng rng(13);
    const std::uint64_t mask = kP.mask();
    for (int i = 0; i < 10000; ++i) {
        RingScalar secret = rng.next_u64() & mask;
        RingScalar share0 = rng.next_u64() & mask;
        RingScalar share1 = ring_sub(kP, secret, share0);
        CHECK(ring_add(kP, share0, share1) == secret);
    }
}

TEST_CASE("unscaled selector times a quantized value is exact") {
    CHECK(ring_mul(kP, 1, quantize(kP, 123.456)) == quantize(kP, 123.456));
    // selector * value carries a single scale factor
    CHECK(ring_mul(kP, 3, quantize(kP, 2.0)) == quantize(kP, 6.0));
}

TEST_CASE("signed reading of ring values") {
    CHECK(ring_to_signed(kP, quantize(kP, -1.0)) == -65536);
    CHECK(ring_to_signed(kP, 5) == 5);
    RingParams p64{64, 16};
    CHECK(ring_to_signed(p64, quantize(p64, -2.0)) == -131072);
}

TEST_CASE("vector ops enforce matching parameters") {
    RingVector a(kP, 4), b(kP, 5);
    CHECK_THROWS_AS(a.add_in_place(b), std::invalid_argument);
    RingVector c(RingParams{16, 8}, 4);
    CHECK_THROWS_AS(a.add_in_place(c), std::invalid_argument);
}

TEST_CASE("little-endian serialization round-trips") {
    Rng rng(3);
    RingVector v(kP, 33);
    for (auto& e : v.elems) e = rng.next_u64() & kP.mask();
    std::vector<std::uint8_t> bytes;
    append_vector_le(v, bytes);
    CHECK(bytes.size() == 33 * 4);
    RingVector back = read_vector_le(kP, bytes.data(), 33);
    CHECK(back.elems == v.elems);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((RingParams{32, 32}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RingParams{65, 16}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RingParams{8, 0}.validate()), std::invalid_argument);
    RingParams{64, 16}.validate();
}

}  // TEST_SUITE
