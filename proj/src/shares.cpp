#include "secemb/shares.hpp"

#include <cmath>
#include <stdexcept>

namespace secemb::shares {

DenseShares ass_split(Rng& rng, const RingVector& secret) {
    const std::uint64_t mask = secret.params.mask();
    DenseShares out{RingVector(secret.params, secret.size()), RingVector(secret.params, secret.size())};
    for (std::size_t i = 0; i < secret.size(); ++i) {
        std::uint64_t r = rng.next_u64() & mask;
        out.share0.elems[i] = r;
        out.share1.elems[i] = (secret.elems[i] - r) & mask;
    }
    return out;
}

RingVector ass_aggregate(std::span<const RingVector> shares) {
    if (shares.empty()) throw std::invalid_argument("ass_aggregate: no shares");
    RingVector acc = shares[0];
    for (std::size_t i = 1; i < shares.size(); ++i) acc.add_in_place(shares[i]);
    return acc;
}

RingVector reconstruct(const RingVector& a0, const RingVector& a1) {
    return ring_vec_add(a0, a1);
}

std::uint64_t secure_count_average(Rng& rng, std::span<const std::uint64_t> counts, double alpha) {
    if (counts.empty()) throw std::invalid_argument("secure_count_average: empty counts");
    if (!(alpha > 0)) throw std::invalid_argument("secure_count_average: alpha must be positive");

    // Counts ride a 64-bit ring so sums cannot wrap at realistic scales.
    RingParams wide{64, 1};
    RingVector agg0(wide, 1), agg1(wide, 1);
    for (std::uint64_t c : counts) {
        RingVector secret(wide, {c});
        DenseShares s = ass_split(rng, secret);
        agg0.add_in_place(s.share0);
        agg1.add_in_place(s.share1);
    }
    std::uint64_t total = reconstruct(agg0, agg1).elems[0];
    double mean = static_cast<double>(total) / static_cast<double>(counts.size());
    auto m_prime = static_cast<std::uint64_t>(std::ceil(alpha * mean));
    return m_prime < 1 ? 1 : m_prime;
}

}  // namespace secemb::shares
