#pragma once

#include <cstdint>
#include <span>

#include "secemb/ring.hpp"
#include "secemb/rng.hpp"

namespace secemb::shares {

// Two-server additive sharing of a ring vector: share0 + share1 = secret.
struct DenseShares {
    RingVector share0;
    RingVector share1;
};

DenseShares ass_split(Rng& rng, const RingVector& secret);

// Componentwise sum of one server's shares across users.
RingVector ass_aggregate(std::span<const RingVector> shares);

RingVector reconstruct(const RingVector& a0, const RingVector& a1);

// Unified padded row count m' from the users' true rated-item counts: the
// counts are additively shared, summed by the servers, reconstructed, then
// m' = ceil(alpha * mean), at least 1.
std::uint64_t secure_count_average(Rng& rng, std::span<const std::uint64_t> counts, double alpha);

}  // namespace secemb::shares
