#include "secemb/dpf.hpp"

#include <stdexcept>

namespace secemb::dpf {

namespace {

void check_domain(std::uint32_t n, std::uint64_t x, const char* what) {
    if (n < 1 || n > 32) throw std::invalid_argument("dpf: domain_bits must be in [1, 32]");
    if (n < 64 && x >= (1ULL << n)) throw std::invalid_argument(what);
}

inline std::uint8_t bit_at(std::uint64_t x, std::uint32_t n, std::uint32_t level) {
    // MSB-first descent: level 0 consumes the highest of the n bits.
    return static_cast<std::uint8_t>((x >> (n - 1 - level)) & 1);
}

}  // namespace

PathGenResult path_gen(Rng& rng, std::uint32_t domain_bits, std::uint64_t alpha) {
    check_domain(domain_bits, alpha, "path_gen: alpha out of domain");

    const Seed root0 = prg::random_seed(rng);
    const Seed root1 = prg::random_seed(rng);
    Seed s[2] = {root0, root1};
    std::uint8_t t[2] = {0, 1};

    std::vector<CorrectionWord> cws;
    cws.reserve(domain_bits);

    for (std::uint32_t level = 0; level < domain_bits; ++level) {
        const std::uint8_t a = bit_at(alpha, domain_bits, level);
        prg::PrgOutput g0 = prg::expand(s[0]);
        prg::PrgOutput g1 = prg::expand(s[1]);

        const Seed& lose0 = a ? g0.left : g0.right;
        const Seed& lose1 = a ? g1.left : g1.right;

        CorrectionWord cw;
        cw.s_cw = prg::seed_xor(lose0, lose1);
        cw.t_left = g0.t_left ^ g1.t_left ^ a ^ 1;
        cw.t_right = g0.t_right ^ g1.t_right ^ a;
        cws.push_back(cw);

        const std::uint8_t t_cw_keep = a ? cw.t_right : cw.t_left;
        const prg::PrgOutput* g[2] = {&g0, &g1};
        for (int b = 0; b < 2; ++b) {
            const Seed& keep_s = a ? g[b]->right : g[b]->left;
            const std::uint8_t keep_t = a ? g[b]->t_right : g[b]->t_left;
            s[b] = t[b] ? prg::seed_xor(keep_s, cw.s_cw) : keep_s;
            t[b] = keep_t ^ (t[b] & t_cw_keep);
        }
    }

    PathGenResult out;
    out.key0 = PathKey{0, domain_bits, root0, 0, cws};
    out.key1 = PathKey{1, domain_bits, root1, 1, std::move(cws)};
    out.secret = PathSecret{t[1], s[0], s[1]};
    return out;
}

ConvertWord convert_gen(const PathSecret& secret, const RingVector& beta) {
    if (beta.size() == 0) throw std::invalid_argument("convert_gen: beta must be nonempty");
    RingVector conv0 = prg::convert_vector(secret.s0_final, beta.size(), beta.params);
    RingVector conv1 = prg::convert_vector(secret.s1_final, beta.size(), beta.params);

    RingVector cw = beta;
    cw.sub_in_place(conv0);
    cw.add_in_place(conv1);
    if (secret.t1_final) cw.negate_in_place();
    return ConvertWord{std::move(cw)};
}

std::pair<DpfKey, DpfKey> gen(Rng& rng, std::uint32_t domain_bits, std::uint64_t alpha,
                              const RingVector& beta) {
    PathGenResult r = path_gen(rng, domain_bits, alpha);
    ConvertWord cw = convert_gen(r.secret, beta);
    return {DpfKey{std::move(r.key0), cw}, DpfKey{std::move(r.key1), std::move(cw)}};
}

PathPoint path_eval(const PathKey& key, std::uint64_t x) {
    check_domain(key.domain_bits, x, "path_eval: x out of domain");

    Seed s = key.s0;
    std::uint8_t t = key.t0;
    for (std::uint32_t level = 0; level < key.domain_bits; ++level) {
        prg::PrgOutput g = prg::expand(s);
        if (t) {
            const CorrectionWord& cw = key.cws[level];
            g.left = prg::seed_xor(g.left, cw.s_cw);
            g.right = prg::seed_xor(g.right, cw.s_cw);
            g.t_left ^= cw.t_left;
            g.t_right ^= cw.t_right;
        }
        if (bit_at(x, key.domain_bits, level)) {
            s = g.right;
            t = g.t_right;
        } else {
            s = g.left;
            t = g.t_left;
        }
    }
    return PathPoint{t, s};
}

RingVector convert_eval(std::uint8_t party, std::uint8_t t, const Seed& s, const ConvertWord& cw) {
    RingVector v = prg::convert_vector(s, cw.payload.size(), cw.payload.params);
    if (t) v.add_in_place(cw.payload);
    if (party) v.negate_in_place();
    return v;
}

RingVector eval(const DpfKey& key, std::uint64_t x) {
    PathPoint pt = path_eval(key.path, x);
    return convert_eval(key.path.party, pt.t, pt.s, key.convert);
}

void eval_full_domain_into(const PathKey& key, FullDomain& out) {
    const std::uint32_t n = key.domain_bits;
    if (n < 1 || n > 32) throw std::invalid_argument("eval_full_domain: domain_bits out of range");
    const std::size_t leaves = std::size_t{1} << n;

    thread_local std::vector<Seed> cur_s, nxt_s, left, right;
    thread_local std::vector<std::uint8_t> cur_t, nxt_t, packed_t;

    out.seeds.resize(leaves);
    out.tbits.resize(leaves);
    cur_s.assign(1, key.s0);
    cur_t.assign(1, key.t0);

    for (std::uint32_t level = 0; level < n; ++level) {
        const std::size_t width = std::size_t{1} << level;
        const bool last = (level + 1 == n);
        left.resize(width);
        right.resize(width);
        packed_t.resize(width);
        prg::expand_batch(cur_s.data(), width, left.data(), right.data(), packed_t.data());

        Seed* next_s = out.seeds.data();
        std::uint8_t* next_t = out.tbits.data();
        if (!last) {
            nxt_s.resize(width * 2);
            nxt_t.resize(width * 2);
            next_s = nxt_s.data();
            next_t = nxt_t.data();
        }

        const CorrectionWord& cw = key.cws[level];
        std::uint64_t cw_lo, cw_hi;
        std::memcpy(&cw_lo, cw.s_cw.bytes.data(), 8);
        std::memcpy(&cw_hi, cw.s_cw.bytes.data() + 8, 8);
        for (std::size_t j = 0; j < width; ++j) {
            const std::uint64_t seedmask = cur_t[j] ? ~std::uint64_t{0} : 0;
            const std::uint8_t bitmask = cur_t[j];
            std::uint64_t lo, hi;

            std::memcpy(&lo, left[j].bytes.data(), 8);
            std::memcpy(&hi, left[j].bytes.data() + 8, 8);
            lo ^= cw_lo & seedmask;
            hi ^= cw_hi & seedmask;
            std::memcpy(next_s[2 * j].bytes.data(), &lo, 8);
            std::memcpy(next_s[2 * j].bytes.data() + 8, &hi, 8);
            next_t[2 * j] = (packed_t[j] & 1) ^ (cw.t_left & bitmask);

            std::memcpy(&lo, right[j].bytes.data(), 8);
            std::memcpy(&hi, right[j].bytes.data() + 8, 8);
            lo ^= cw_lo & seedmask;
            hi ^= cw_hi & seedmask;
            std::memcpy(next_s[2 * j + 1].bytes.data(), &lo, 8);
            std::memcpy(next_s[2 * j + 1].bytes.data() + 8, &hi, 8);
            next_t[2 * j + 1] = ((packed_t[j] >> 1) & 1) ^ (cw.t_right & bitmask);
        }
        if (!last) {
            std::swap(cur_s, nxt_s);
            std::swap(cur_t, nxt_t);
        }
    }
}

FullDomain eval_full_domain(const PathKey& key) {
    FullDomain out;
    eval_full_domain_into(key, out);
    return out;
}

std::size_t path_key_wire_size(std::uint32_t domain_bits) {
    return 2 + prg::kSeedBytes + 1 + domain_bits * (prg::kSeedBytes + 1);
}

std::size_t key_wire_size(std::uint32_t domain_bits, std::size_t payload_len, const RingParams& p) {
    return path_key_wire_size(domain_bits) + payload_len * scalar_wire_size(p);
}

std::uint64_t key_info_bits(std::uint32_t domain_bits, std::size_t payload_len,
                            const RingParams& p) {
    return prg::kLambdaBits + 1 +
           std::uint64_t{domain_bits} * (prg::kLambdaBits + 2) +
           std::uint64_t{payload_len} * p.bits;
}

void serialize_path_key(const PathKey& key, std::vector<std::uint8_t>& out) {
    out.reserve(out.size() + path_key_wire_size(key.domain_bits));
    out.push_back(kWireVersion);
    out.push_back(static_cast<std::uint8_t>(key.domain_bits));
    out.insert(out.end(), key.s0.bytes.begin(), key.s0.bytes.end());
    out.push_back(key.t0);
    for (const CorrectionWord& cw : key.cws) {
        out.insert(out.end(), cw.s_cw.bytes.begin(), cw.s_cw.bytes.end());
        out.push_back(static_cast<std::uint8_t>(cw.t_left | (cw.t_right << 1)));
    }
}

PathKey deserialize_path_key(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
    using wire::WireError;
    if (bytes.size() < 2) throw WireError("path key header truncated", bytes.size());
    if (bytes[0] != kWireVersion) throw WireError("unsupported key version", 0);
    std::uint32_t n = bytes[1];
    if (n < 1 || n > 32) throw WireError("domain bits out of range", 1);
    const std::size_t need = path_key_wire_size(n);
    if (bytes.size() < need) throw WireError("path key truncated", bytes.size());

    PathKey key;
    key.domain_bits = n;
    std::size_t off = 2;
    std::memcpy(key.s0.bytes.data(), bytes.data() + off, prg::kSeedBytes);
    off += prg::kSeedBytes;
    if (bytes[off] > 1) throw WireError("bad t0 bit", off);
    key.t0 = bytes[off];
    key.party = key.t0;
    ++off;
    key.cws.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::memcpy(key.cws[i].s_cw.bytes.data(), bytes.data() + off, prg::kSeedBytes);
        off += prg::kSeedBytes;
        if (bytes[off] > 3) throw WireError("bad correction t bits", off);
        key.cws[i].t_left = bytes[off] & 1;
        key.cws[i].t_right = (bytes[off] >> 1) & 1;
        ++off;
    }
    if (consumed) *consumed = off;
    return key;
}

void serialize_key(const DpfKey& key, std::vector<std::uint8_t>& out) {
    serialize_path_key(key.path, out);
    append_vector_le(key.convert.payload, out);
}

DpfKey deserialize_key(std::span<const std::uint8_t> bytes, const RingParams& p,
                       std::size_t payload_len, std::size_t* consumed) {
    std::size_t off = 0;
    DpfKey key;
    key.path = deserialize_path_key(bytes, &off);
    const std::size_t payload_bytes = payload_len * scalar_wire_size(p);
    if (bytes.size() < off + payload_bytes)
        throw wire::WireError("convert word truncated", bytes.size());
    key.convert.payload = read_vector_le(p, bytes.data() + off, payload_len);
    off += payload_bytes;
    if (consumed) *consumed = off;
    return key;
}

ConvertWord hyb_cw(Rng& rng, std::uint32_t domain_bits, std::uint64_t alpha,
                   const RingVector& beta) {
    check_domain(domain_bits, alpha, "hyb_cw: alpha out of domain");

    Seed s[2] = {prg::random_seed(rng), prg::random_seed(rng)};
    std::uint8_t t[2] = {0, 1};

    for (std::uint32_t level = 0; level < domain_bits; ++level) {
        const std::uint8_t a = bit_at(alpha, domain_bits, level);
        CorrectionWord cw;
        cw.s_cw = prg::random_seed(rng);
        std::uint64_t rbits = rng.next_u64();
        cw.t_left = rbits & 1;
        cw.t_right = (rbits >> 1) & 1;
        const std::uint8_t t_cw_keep = a ? cw.t_right : cw.t_left;
        for (int b = 0; b < 2; ++b) {
            prg::PrgOutput g = prg::expand(s[b]);
            const Seed& keep_s = a ? g.right : g.left;
            const std::uint8_t keep_t = a ? g.t_right : g.t_left;
            s[b] = t[b] ? prg::seed_xor(keep_s, cw.s_cw) : keep_s;
            t[b] = keep_t ^ (t[b] & t_cw_keep);
        }
    }
    return convert_gen(PathSecret{t[1], s[0], s[1]}, beta);
}

}  // namespace secemb::dpf
