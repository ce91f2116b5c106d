#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "secemb/prg.hpp"
#include "secemb/ring.hpp"
#include "secemb/rng.hpp"
#include "secemb/wire.hpp"

namespace secemb::dpf {

using prg::Seed;

// Per-level public key material steering the two PRG trees to diverge only on
// the path to alpha.
struct CorrectionWord {
    Seed s_cw;
    std::uint8_t t_left = 0;
    std::uint8_t t_right = 0;
    bool operator==(const CorrectionWord&) const = default;
};

// One party's share of the tree-descent phase: s_b^(0) || t_b^(0) || CW^(1..n).
// The correction words are identical in both parties' keys; t0 equals the
// party bit.
struct PathKey {
    std::uint8_t party = 0;
    std::uint32_t domain_bits = 0;  // n
    Seed s0;
    std::uint8_t t0 = 0;
    std::vector<CorrectionWord> cws;
    bool operator==(const PathKey&) const = default;
};

// Final correction word CW^(n+1), converting leaf seeds into additive shares
// in Z_{2^b}^L. The payload length L is bound at convert_gen time, which is
// what lets one PRG tree serve both the retrieval and aggregation stages.
struct ConvertWord {
    RingVector payload;
    bool operator==(const ConvertWord&) const = default;
};

// Client-retained output of path_gen: enough to derive convert words for any
// payload later in the round.
struct PathSecret {
    std::uint8_t t1_final = 0;  // t_1^(n)
    Seed s0_final;
    Seed s1_final;
};

struct DpfKey {
    PathKey path;
    ConvertWord convert;
    bool operator==(const DpfKey&) const = default;
};

struct PathGenResult {
    PathKey key0;
    PathKey key1;
    PathSecret secret;
};

// Tree-descent key generation for the point alpha in [0, 2^n).
PathGenResult path_gen(Rng& rng, std::uint32_t domain_bits, std::uint64_t alpha);

// CW^(n+1) = (-1)^{t_1^(n)} [beta - Convert(s_0^(n)) + Convert(s_1^(n))].
ConvertWord convert_gen(const PathSecret& secret, const RingVector& beta);

// Full keys for f_{alpha,beta}: path_gen composed with convert_gen.
std::pair<DpfKey, DpfKey> gen(Rng& rng, std::uint32_t domain_bits, std::uint64_t alpha,
                              const RingVector& beta);

struct PathPoint {
    std::uint8_t t = 0;
    Seed s;
};

// Tree descent for a single input x; the party bit is carried by the key.
PathPoint path_eval(const PathKey& key, std::uint64_t x);

// v = (-1)^party [Convert(s) + t * CW^(n+1)].
RingVector convert_eval(std::uint8_t party, std::uint8_t t, const Seed& s, const ConvertWord& cw);

// Party's additive share of f(x).
RingVector eval(const DpfKey& key, std::uint64_t x);

// Leaf states for every x in [0, 2^n), one tree traversal (2^n - 1 PRG
// expansions instead of n per point).
struct FullDomain {
    std::vector<Seed> seeds;
    std::vector<std::uint8_t> tbits;
    std::size_t size() const { return seeds.size(); }
};

void eval_full_domain_into(const PathKey& key, FullDomain& out);
FullDomain eval_full_domain(const PathKey& key);

// Wire layout: [version][n][s0][t0] then per level [s_cw][t_left | t_right<<1],
// 19 + 17n bytes total; a DpfKey appends the raw little-endian payload.
inline constexpr std::uint8_t kWireVersion = 1;

std::size_t path_key_wire_size(std::uint32_t domain_bits);
std::size_t key_wire_size(std::uint32_t domain_bits, std::size_t payload_len, const RingParams& p);
// Information content in bits before byte alignment: lambda+1 + n(lambda+2) + b*L.
std::uint64_t key_info_bits(std::uint32_t domain_bits, std::size_t payload_len, const RingParams& p);

void serialize_path_key(const PathKey& key, std::vector<std::uint8_t>& out);
PathKey deserialize_path_key(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);

void serialize_key(const DpfKey& key, std::vector<std::uint8_t>& out);
// payload_len and ring parameters come from protocol context, not the wire.
DpfKey deserialize_key(std::span<const std::uint8_t> bytes, const RingParams& p,
                       std::size_t payload_len, std::size_t* consumed = nullptr);

// Test-only simulator from the security argument: per-level correction words
// drawn uniformly at random, final convert word formed as in convert_gen.
ConvertWord hyb_cw(Rng& rng, std::uint32_t domain_bits, std::uint64_t alpha,
                   const RingVector& beta);

}  // namespace secemb::dpf
