#pragma once

#include <array>
#include <cstdint>
#include <cstring>

#include "secemb/ring.hpp"
#include "secemb/rng.hpp"

namespace secemb::prg {

inline constexpr std::uint32_t kLambdaBits = 128;
inline constexpr std::size_t kSeedBytes = kLambdaBits / 8;

// lambda-bit PRG seed.
struct Seed {
    std::array<std::uint8_t, kSeedBytes> bytes{};

    bool operator==(const Seed&) const = default;
    bool operator<(const Seed& o) const { return bytes < o.bytes; }
};

inline Seed seed_xor(const Seed& a, const Seed& b) {
    Seed out;
    for (std::size_t i = 0; i < kSeedBytes; ++i) out.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return out;
}

inline Seed random_seed(Rng& rng) {
    Seed s;
    std::uint64_t lo = rng.next_u64(), hi = rng.next_u64();
    std::memcpy(s.bytes.data(), &lo, 8);
    std::memcpy(s.bytes.data() + 8, &hi, 8);
    return s;
}

// Output of the length-doubling generator G: {0,1}^128 -> {0,1}^{2*129}.
struct PrgOutput {
    Seed left;
    std::uint8_t t_left;   // 0/1
    Seed right;
    std::uint8_t t_right;  // 0/1
};

PrgOutput expand(const Seed& s);

// Expand `count` seeds in one batched pass. out_t[i] packs the two control
// bits as (t_left | t_right << 1).
void expand_batch(const Seed* in, std::size_t count,
                  Seed* out_left, Seed* out_right, std::uint8_t* out_t);

// Convert_G: seed -> pseudorandom element(s) of Z_{2^b}^len. Truncation of the
// seed when len*b <= lambda, counter-mode expansion otherwise; the two regimes
// are unrelated streams but (seed, len) is always reproducible.
RingScalar convert_scalar(const Seed& s, const RingParams& p);
RingVector convert_vector(const Seed& s, std::size_t len, const RingParams& p);

// Batched leaf conversion: writes count*len ring elements to `out`,
// row i holding convert_vector(seeds[i], len).
void convert_batch_into(const Seed* seeds, std::size_t count, std::size_t len,
                        const RingParams& p, std::uint64_t* out);

// Raw counter-mode convert stream (the len*b > lambda regime): row i occupies
// ceil(nbytes/16)*16 bytes at out + i*row_stride. Little-endian element reads
// of this stream agree with convert_vector.
void convert_stream_into(const Seed* seeds, std::size_t count, std::size_t nbytes,
                         std::uint8_t* out);
inline std::size_t convert_stream_stride(std::size_t nbytes) { return ((nbytes + 15) / 16) * 16; }

// Same stream split into cipher and feed-forward halves: the element value is
// cipher[i] ^ input[i], left to the caller to combine. Both buffers use the
// stride above.
void convert_stream_parts_into(const Seed* seeds, std::size_t count, std::size_t nbytes,
                               std::uint8_t* cipher_out, std::uint8_t* input_out);

// Instrumentation: number of G expansions performed by this thread.
std::uint64_t expand_count();
void reset_expand_count();

}  // namespace secemb::prg
