#include "secemb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace secemb::protocol {

namespace {

inline std::uint64_t seed_lo64(const prg::Seed& s) {
    std::uint64_t v;
    std::memcpy(&v, s.bytes.data(), 8);
    return v;
}

constexpr std::size_t kRowChunk = 256;  // aggregation rows per convert batch
constexpr std::size_t kSlotChunk = 32;  // retrieval slots per table pass

}  // namespace

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::final_opt: return "final";
        case Variant::rowenc: return "rowenc";
        case Variant::init: return "init";
        case Variant::baseline: return "baseline";
        case Variant::plaintext: return "plaintext";
    }
    return "?";
}

std::optional<Variant> parse_variant(const std::string& name) {
    if (name == "final") return Variant::final_opt;
    if (name == "rowenc") return Variant::rowenc;
    if (name == "init") return Variant::init;
    if (name == "baseline") return Variant::baseline;
    if (name == "plaintext") return Variant::plaintext;
    return std::nullopt;
}

void ProtocolParams::validate() const {
    ring.validate();
    if (n_items < 2) throw std::invalid_argument("ProtocolParams: need at least 2 items");
    if (embed_dim == 0) throw std::invalid_argument("ProtocolParams: embed_dim must be positive");
    if (m_prime == 0 || m_prime > n_items)
        throw std::invalid_argument("ProtocolParams: need 0 < m_prime <= n_items");
    if (ring.bits % 8 != 0 || ring.bits > 64)
        throw std::invalid_argument("ProtocolParams: wire format needs b in {8,16,...,64}");
    if (round_users == 0) throw std::invalid_argument("ProtocolParams: round_users must be positive");
}

void ServerState::begin_round() {
    agg_table.assign(std::size_t{params.n_items} * params.row_len(), 0);
    agg_theta.assign(params.theta_len, 0);
    agg_users = 0;
    round_keys.clear();
    path_cache.clear();
    if (params.ring.bits == 32) {
        table32.resize(table.size());
        for (std::size_t i = 0; i < table.size(); ++i)
            table32[i] = static_cast<std::uint32_t>(table[i]);
    }
}

void ServerState::drop_round_state() {
    round_keys.clear();
    path_cache.clear();
}

ServerState make_server(std::uint8_t party, const ProtocolParams& params) {
    params.validate();
    ServerState s;
    s.party = party;
    s.params = params;
    s.table.assign(std::size_t{params.n_items} * params.row_len(), 0);
    s.theta.assign(params.theta_len, 0);
    s.begin_round();
    return s;
}

PaddedIndexSet pad_or_trunc_idx(Rng& rng, const std::vector<std::uint32_t>& items,
                                std::uint32_t m_prime, std::uint32_t n_items) {
    if (m_prime > n_items) throw std::invalid_argument("pad_or_trunc_idx: m_prime > item count");

    PaddedIndexSet out;
    if (items.size() < m_prime) {
        out.indices = items;
        out.real_mask.assign(items.size(), 1);
        std::unordered_set<std::uint32_t> used(items.begin(), items.end());
        while (out.indices.size() < m_prime) {
            auto cand = static_cast<std::uint32_t>(rng.below(n_items));
            if (used.insert(cand).second) {
                out.indices.push_back(cand);
                out.real_mask.push_back(0);
            }
        }
    } else if (items.size() > m_prime) {
        // Partial Fisher-Yates: the first m' entries of a random permutation.
        std::vector<std::uint32_t> pool = items;
        for (std::uint32_t i = 0; i < m_prime; ++i) {
            auto j = i + static_cast<std::uint32_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(m_prime);
        out.indices = std::move(pool);
        out.real_mask.assign(m_prime, 1);
    } else {
        out.indices = items;
        out.real_mask.assign(items.size(), 1);
    }
    return out;
}

SparseUpdate pad_or_trunc_emb(const PaddedIndexSet& padded,
                              const std::vector<std::uint32_t>& genuine_items,
                              const std::vector<RingVector>& rows_by_item,
                              const ProtocolParams& params) {
    if (genuine_items.size() != rows_by_item.size())
        throw std::invalid_argument("pad_or_trunc_emb: row count does not match item count");
    std::unordered_map<std::uint32_t, std::size_t> pos;
    pos.reserve(genuine_items.size());
    for (std::size_t i = 0; i < genuine_items.size(); ++i) pos.emplace(genuine_items[i], i);

    const std::size_t row_len = params.row_len();
    SparseUpdate out;
    out.rows.reserve(padded.size());
    for (std::size_t slot = 0; slot < padded.size(); ++slot) {
        if (padded.real_mask[slot]) {
            auto it = pos.find(padded.indices[slot]);
            if (it == pos.end())
                throw std::invalid_argument("pad_or_trunc_emb: missing row for genuine index");
            const RingVector& row = rows_by_item[it->second];
            if (row.size() != row_len || !(row.params == params.ring))
                throw std::invalid_argument("pad_or_trunc_emb: row shape mismatch");
            out.rows.push_back(row);
        } else {
            out.rows.emplace_back(params.ring, row_len);
        }
    }
    return out;
}

ClientRetrievalOut client_build_retrieval(Rng& rng, const PaddedIndexSet& padded,
                                          const ProtocolParams& params) {
    const std::uint32_t n = params.domain_bits();
    RingVector selector(params.ring, 1);
    selector.elems[0] = 1;  // unscaled: retrieved rows reconstruct bit-exactly

    ClientRetrievalOut out;
    out.retained.reserve(padded.size());
    for (std::size_t slot = 0; slot < padded.size(); ++slot) {
        dpf::PathGenResult pg = dpf::path_gen(rng, n, padded.indices[slot]);
        dpf::ConvertWord cw = dpf::convert_gen(pg.secret, selector);
        dpf::serialize_key(dpf::DpfKey{std::move(pg.key0), cw}, out.request0.payload);
        dpf::serialize_key(dpf::DpfKey{std::move(pg.key1), std::move(cw)}, out.request1.payload);
        out.retained.push_back(pg.secret);
    }
    return out;
}

RetrievalResponse server_answer_retrieval(ServerState& state, std::uint32_t user,
                                          const RetrievalRequest& request) {
    const ProtocolParams& P = state.params;
    const std::uint32_t n = P.domain_bits();
    const std::size_t row_len = P.row_len();
    const std::uint64_t mask = P.ring.mask();
    const std::size_t m_prime = P.m_prime;

    if (request.payload.size() != m_prime * dpf::key_wire_size(n, 1, P.ring))
        throw wire::WireError("retrieval request size mismatch", request.payload.size());

    // Parse keys and evaluate every tree over the full domain up front.
    std::vector<dpf::FullDomain> leaves(m_prime);
    std::vector<std::uint64_t> cw_scalar(m_prime);
    std::span<const std::uint8_t> bytes(request.payload);
    std::size_t off = 0;
    std::vector<dpf::PathKey> path_keys;
    path_keys.reserve(m_prime);
    for (std::size_t i = 0; i < m_prime; ++i) {
        std::size_t used = 0;
        dpf::DpfKey key = dpf::deserialize_key(bytes.subspan(off), P.ring, 1, &used);
        off += used;
        if (key.path.domain_bits != n)
            throw wire::WireError("retrieval key has wrong domain", off);
        if (key.path.party != state.party)
            throw wire::WireError("retrieval key addressed to the other server", off);
        cw_scalar[i] = key.convert.payload.elems[0];
        dpf::eval_full_domain_into(key.path, leaves[i]);
        path_keys.push_back(std::move(key.path));
    }

    // v_i = sum_j Eval(key_i, j) * Q_j, computed slot-chunked so the table is
    // streamed a handful of times per client rather than once per key.
    std::vector<std::uint64_t> acc(m_prime * row_len, 0);
    if (P.ring.bits == 32) {
        thread_local std::vector<std::uint32_t> acc32;
        acc32.assign(m_prime * row_len, 0);
        for (std::size_t i0 = 0; i0 < m_prime; i0 += kSlotChunk) {
            const std::size_t i1 = std::min(m_prime, i0 + kSlotChunk);
            for (std::uint32_t j = 0; j < P.n_items; ++j) {
                const std::uint32_t* qrow = state.table32.data() + std::size_t{j} * row_len;
                for (std::size_t i = i0; i < i1; ++i) {
                    std::uint32_t w;
                    std::memcpy(&w, leaves[i].seeds[j].bytes.data(), 4);
                    w += static_cast<std::uint32_t>(cw_scalar[i]) &
                         (0 - std::uint32_t{leaves[i].tbits[j]});
                    std::uint32_t* arow = acc32.data() + i * row_len;
                    for (std::size_t k = 0; k < row_len; ++k) arow[k] += w * qrow[k];
                }
            }
        }
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = acc32[i];
    } else {
        for (std::size_t i0 = 0; i0 < m_prime; i0 += kSlotChunk) {
            const std::size_t i1 = std::min(m_prime, i0 + kSlotChunk);
            for (std::uint32_t j = 0; j < P.n_items; ++j) {
                const std::uint64_t* qrow = state.table.data() + std::size_t{j} * row_len;
                for (std::size_t i = i0; i < i1; ++i) {
                    std::uint64_t w = seed_lo64(leaves[i].seeds[j]);
                    if (leaves[i].tbits[j]) w += cw_scalar[i];
                    std::uint64_t* arow = acc.data() + i * row_len;
                    for (std::size_t k = 0; k < row_len; ++k) arow[k] += w * qrow[k];
                }
            }
        }
    }

    RetrievalResponse resp;
    resp.payload.reserve(acc.size() * scalar_wire_size(P.ring));
    for (std::uint64_t v : acc) {
        std::uint64_t share = (state.party ? (0 - v) : v) & mask;
        append_scalar_le(P.ring, share, resp.payload);
    }

    // Retain per-user path state for the aggregation stage.
    if (state.cache_paths)
        state.path_cache[user] = std::move(leaves);
    else
        state.round_keys[user] = std::move(path_keys);
    return resp;
}

std::unordered_map<std::uint32_t, std::vector<double>> client_recover_embeddings(
    const RetrievalResponse& resp0, const RetrievalResponse& resp1,
    const PaddedIndexSet& padded, const ProtocolParams& params) {
    const std::size_t row_len = params.row_len();
    const std::size_t nb = scalar_wire_size(params.ring);
    const std::size_t expect = padded.size() * row_len * nb;
    if (resp0.payload.size() != expect || resp1.payload.size() != expect)
        throw wire::WireError("retrieval responses misaligned", 0);

    std::unordered_map<std::uint32_t, std::vector<double>> out;
    out.reserve(padded.size());
    for (std::size_t slot = 0; slot < padded.size(); ++slot) {
        if (!padded.real_mask[slot]) continue;
        std::vector<double> row(row_len);
        for (std::size_t k = 0; k < row_len; ++k) {
            std::size_t pos = (slot * row_len + k) * nb;
            RingScalar v0 = read_scalar_le(params.ring, resp0.payload.data() + pos);
            RingScalar v1 = read_scalar_le(params.ring, resp1.payload.data() + pos);
            row[k] = dequantize(params.ring, ring_add(params.ring, v0, v1));
        }
        out.emplace(padded.indices[slot], std::move(row));
    }
    return out;
}

namespace {

void check_update_row(const RingVector& row, const ProtocolParams& P) {
    if (row.size() != P.row_len() || !(row.params == P.ring))
        throw std::invalid_argument("client_build_update: row shape mismatch");
    // Overflow guard: with every user inside [-R_u, R_u], the round aggregate
    // cannot wrap the signed range.
    const double bound = P.user_range() + 1.0 / P.ring.scale();
    for (RingScalar v : row.elems) {
        if (std::abs(dequantize(P.ring, v)) > bound)
            throw std::overflow_error("client_build_update: row exceeds per-user range R_u");
    }
}

void append_theta_share(Rng& rng, const RingVector& dense_theta, const ProtocolParams& P,
                        UpdateMessage& msg0, UpdateMessage& msg1) {
    if (dense_theta.size() != P.theta_len)
        throw std::invalid_argument("client_build_update: dense parameter length mismatch");
    if (P.theta_len == 0) return;
    shares::DenseShares sh = shares::ass_split(rng, dense_theta);
    append_vector_le(sh.share0, msg0.payload);
    append_vector_le(sh.share1, msg1.payload);
}

}  // namespace

std::pair<UpdateMessage, UpdateMessage> client_build_update(
    Rng& rng, Variant variant, const SparseUpdate& sparse, const RingVector& dense_theta,
    const std::vector<dpf::PathSecret>& retained, const PaddedIndexSet& padded,
    const ProtocolParams& params) {
    const std::uint32_t n = params.domain_bits();
    if (sparse.rows.size() != params.m_prime)
        throw std::invalid_argument("client_build_update: sparse update must have m_prime rows");
    for (const RingVector& row : sparse.rows) check_update_row(row, params);

    UpdateMessage msg0, msg1;
    switch (variant) {
        case Variant::final_opt: {
            if (retained.size() != params.m_prime)
                throw std::invalid_argument(
                    "client_build_update: final variant requires retained path secrets");
            // Partial keys: one convert word per slot, identical for both servers.
            for (std::size_t i = 0; i < params.m_prime; ++i) {
                dpf::ConvertWord cw = dpf::convert_gen(retained[i], sparse.rows[i]);
                append_vector_le(cw.payload, msg0.payload);
                append_vector_le(cw.payload, msg1.payload);
            }
            break;
        }
        case Variant::rowenc: {
            for (std::size_t i = 0; i < params.m_prime; ++i) {
                auto [k0, k1] = dpf::gen(rng, n, padded.indices[i], sparse.rows[i]);
                dpf::serialize_key(k0, msg0.payload);
                dpf::serialize_key(k1, msg1.payload);
            }
            break;
        }
        case Variant::init: {
            RingVector beta(params.ring, 1);
            for (std::size_t i = 0; i < params.m_prime; ++i) {
                for (std::size_t k = 0; k < params.row_len(); ++k) {
                    beta.elems[0] = sparse.rows[i].elems[k];
                    auto [k0, k1] = dpf::gen(rng, n, padded.indices[i], beta);
                    dpf::serialize_key(k0, msg0.payload);
                    dpf::serialize_key(k1, msg1.payload);
                }
            }
            break;
        }
        default:
            throw std::invalid_argument("client_build_update: variant has no FSS update message");
    }
    append_theta_share(rng, dense_theta, params, msg0, msg1);
    return {std::move(msg0), std::move(msg1)};
}

namespace {

// Accumulate one user's m' rows worth of convert-eval shares into agg_table.
// Row-chunked: the convert stream and the touched aggregate rows stay cache
// resident while every slot is applied to the chunk. For b = 32 the ring
// elements are read straight out of the counter-mode stream.
void accumulate_vector_shares(ServerState& state, const std::vector<dpf::FullDomain>& leaves,
                              const std::vector<const std::uint64_t*>& cw_rows) {
    const ProtocolParams& P = state.params;
    const std::size_t row_len = P.row_len();
    const std::size_t m = P.n_items;
    const bool negate = state.party != 0;
    const bool fast32 = P.ring.bits == 32;

    const std::size_t row_bytes = row_len * scalar_wire_size(P.ring);
    const std::size_t stride = prg::convert_stream_stride(row_bytes);

    if (fast32) {
        // Chunk-local 32-bit accumulator; u32 wraparound agrees with the ring
        // mod 2^32 and flushes into the wide accumulator once per chunk.
        thread_local std::vector<std::uint8_t> cipher, input;
        thread_local std::vector<std::uint32_t> chunk_acc;
        thread_local std::vector<std::uint32_t> cw32;
        cipher.resize(kRowChunk * stride);
        input.resize(kRowChunk * stride);
        chunk_acc.resize(kRowChunk * row_len);
        cw32.resize(leaves.size() * row_len);
        for (std::size_t i = 0; i < leaves.size(); ++i)
            for (std::size_t k = 0; k < row_len; ++k)
                cw32[i * row_len + k] = static_cast<std::uint32_t>(cw_rows[i][k]);

        for (std::size_t j0 = 0; j0 < m; j0 += kRowChunk) {
            const std::size_t cnt = std::min(kRowChunk, m - j0);
            std::fill(chunk_acc.begin(), chunk_acc.begin() + cnt * row_len, 0u);
            for (std::size_t i = 0; i < leaves.size(); ++i) {
                prg::convert_stream_parts_into(leaves[i].seeds.data() + j0, cnt, row_bytes,
                                               cipher.data(), input.data());
                const std::uint32_t* cw = cw32.data() + i * row_len;
                const std::uint8_t* tb = leaves[i].tbits.data() + j0;
                for (std::size_t jj = 0; jj < cnt; ++jj) {
                    std::uint32_t* arow = chunk_acc.data() + jj * row_len;
                    const std::uint8_t* crow = cipher.data() + jj * stride;
                    const std::uint8_t* xrow = input.data() + jj * stride;
                    const std::uint32_t tcw = tb[jj] ? ~std::uint32_t{0} : 0;
                    for (std::size_t k = 0; k < row_len; ++k) {
                        std::uint32_t c, x;
                        std::memcpy(&c, crow + 4 * k, 4);
                        std::memcpy(&x, xrow + 4 * k, 4);
                        arow[k] += (c ^ x) + (cw[k] & tcw);
                    }
                }
            }
            for (std::size_t jj = 0; jj < cnt; ++jj) {
                std::uint64_t* arow = state.agg_table.data() + (j0 + jj) * row_len;
                const std::uint32_t* crow = chunk_acc.data() + jj * row_len;
                if (negate)
                    for (std::size_t k = 0; k < row_len; ++k) arow[k] -= crow[k];
                else
                    for (std::size_t k = 0; k < row_len; ++k) arow[k] += crow[k];
            }
        }
        return;
    }

    thread_local std::vector<std::uint64_t> conv;
    conv.resize(kRowChunk * row_len);
    for (std::size_t j0 = 0; j0 < m; j0 += kRowChunk) {
        const std::size_t cnt = std::min(kRowChunk, m - j0);
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            prg::convert_batch_into(leaves[i].seeds.data() + j0, cnt, row_len, P.ring,
                                    conv.data());
            const std::uint64_t* cw = cw_rows[i];
            const std::uint8_t* tb = leaves[i].tbits.data() + j0;
            for (std::size_t jj = 0; jj < cnt; ++jj) {
                std::uint64_t* arow = state.agg_table.data() + (j0 + jj) * row_len;
                const std::uint64_t* crow = conv.data() + jj * row_len;
                const std::uint64_t tcw = tb[jj] ? ~std::uint64_t{0} : 0;
                if (negate)
                    for (std::size_t k = 0; k < row_len; ++k) arow[k] -= crow[k] + (cw[k] & tcw);
                else
                    for (std::size_t k = 0; k < row_len; ++k) arow[k] += crow[k] + (cw[k] & tcw);
            }
        }
    }
}

const std::vector<dpf::FullDomain>& user_leaves(ServerState& state, std::uint32_t user) {
    if (state.cache_paths) {
        auto it = state.path_cache.find(user);
        if (it == state.path_cache.end())
            throw std::runtime_error("server_accumulate_update: no retrieval state for user");
        return it->second;
    }
    auto it = state.round_keys.find(user);
    if (it == state.round_keys.end())
        throw std::runtime_error("server_accumulate_update: no retrieval state for user");
    auto& slot = state.path_cache[user];  // recompute once, reuse within the call
    slot.resize(it->second.size());
    for (std::size_t i = 0; i < it->second.size(); ++i)
        dpf::eval_full_domain_into(it->second[i], slot[i]);
    return slot;
}

}  // namespace

void server_accumulate_update(ServerState& state, std::uint32_t user, Variant variant,
                              const UpdateMessage& message) {
    const ProtocolParams& P = state.params;
    const std::uint32_t n = P.domain_bits();
    const std::size_t row_len = P.row_len();
    const std::size_t nb = scalar_wire_size(P.ring);
    const std::size_t theta_bytes = std::size_t{P.theta_len} * nb;
    std::span<const std::uint8_t> bytes(message.payload);

    switch (variant) {
        case Variant::final_opt: {
            const std::size_t cw_bytes = std::size_t{P.m_prime} * row_len * nb;
            if (bytes.size() != cw_bytes + theta_bytes)
                throw wire::WireError("final update size mismatch", bytes.size());
            const std::vector<dpf::FullDomain>& leaves = user_leaves(state, user);
            if (leaves.size() != P.m_prime)
                throw std::runtime_error("server_accumulate_update: retrieval state slot mismatch");

            thread_local std::vector<std::uint64_t> cw_store;
            cw_store.resize(P.m_prime * row_len);
            std::vector<const std::uint64_t*> cw_rows(P.m_prime);
            for (std::size_t i = 0; i < P.m_prime; ++i) {
                for (std::size_t k = 0; k < row_len; ++k)
                    cw_store[i * row_len + k] =
                        read_scalar_le(P.ring, bytes.data() + (i * row_len + k) * nb);
                cw_rows[i] = cw_store.data() + i * row_len;
            }
            accumulate_vector_shares(state, leaves, cw_rows);
            bytes = bytes.subspan(cw_bytes);
            if (!state.cache_paths) state.path_cache.erase(user);
            break;
        }
        case Variant::rowenc: {
            const std::size_t key_bytes = dpf::key_wire_size(n, row_len, P.ring);
            if (bytes.size() != P.m_prime * key_bytes + theta_bytes)
                throw wire::WireError("rowenc update size mismatch", bytes.size());
            std::vector<dpf::FullDomain> leaves(P.m_prime);
            thread_local std::vector<std::uint64_t> cw_store;
            cw_store.resize(P.m_prime * row_len);
            std::vector<const std::uint64_t*> cw_rows(P.m_prime);
            std::size_t off = 0;
            for (std::size_t i = 0; i < P.m_prime; ++i) {
                std::size_t used = 0;
                dpf::DpfKey key = dpf::deserialize_key(bytes.subspan(off), P.ring, row_len, &used);
                off += used;
                if (key.path.domain_bits != n || key.path.party != state.party)
                    throw wire::WireError("rowenc key mismatch", off);
                dpf::eval_full_domain_into(key.path, leaves[i]);
                std::copy(key.convert.payload.elems.begin(), key.convert.payload.elems.end(),
                          cw_store.begin() + i * row_len);
                cw_rows[i] = cw_store.data() + i * row_len;
            }
            accumulate_vector_shares(state, leaves, cw_rows);
            bytes = bytes.subspan(off);
            break;
        }
        case Variant::init: {
            const std::size_t key_bytes = dpf::key_wire_size(n, 1, P.ring);
            const std::size_t nkeys = std::size_t{P.m_prime} * row_len;
            if (bytes.size() != nkeys * key_bytes + theta_bytes)
                throw wire::WireError("init update size mismatch", bytes.size());
            const bool negate = state.party != 0;
            dpf::FullDomain fd;
            std::size_t off = 0;
            for (std::size_t i = 0; i < P.m_prime; ++i) {
                for (std::size_t k = 0; k < row_len; ++k) {
                    std::size_t used = 0;
                    dpf::DpfKey key = dpf::deserialize_key(bytes.subspan(off), P.ring, 1, &used);
                    off += used;
                    if (key.path.domain_bits != n || key.path.party != state.party)
                        throw wire::WireError("init key mismatch", off);
                    dpf::eval_full_domain_into(key.path, fd);
                    const std::uint64_t cw = key.convert.payload.elems[0];
                    std::uint64_t* agg = state.agg_table.data() + k;
                    for (std::size_t j = 0; j < P.n_items; ++j) {
                        std::uint64_t w = seed_lo64(fd.seeds[j]);
                        if (fd.tbits[j]) w += cw;
                        if (negate)
                            agg[j * row_len] -= w;
                        else
                            agg[j * row_len] += w;
                    }
                }
            }
            bytes = bytes.subspan(off);
            break;
        }
        default:
            throw std::invalid_argument("server_accumulate_update: not an FSS update variant");
    }

    if (bytes.size() != theta_bytes)
        throw wire::WireError("theta share size mismatch", message.payload.size() - bytes.size());
    for (std::size_t i = 0; i < P.theta_len; ++i)
        state.agg_theta[i] += read_scalar_le(P.ring, bytes.data() + i * nb);
    state.agg_users += 1;
}

Aggregates reconstruct_aggregates(const ServerState& s0, const ServerState& s1) {
    if (s0.agg_users != s1.agg_users)
        throw std::runtime_error("reconstruct_aggregates: servers saw different user sets");
    const std::uint64_t mask = s0.params.ring.mask();
    Aggregates out;
    out.users = s0.agg_users;
    out.table.resize(s0.agg_table.size());
    for (std::size_t i = 0; i < out.table.size(); ++i)
        out.table[i] = (s0.agg_table[i] + s1.agg_table[i]) & mask;
    out.theta.resize(s0.agg_theta.size());
    for (std::size_t i = 0; i < out.theta.size(); ++i)
        out.theta[i] = (s0.agg_theta[i] + s1.agg_theta[i]) & mask;
    return out;
}

void sync_servers(ServerState& s0, ServerState& s1,
                  const std::vector<std::uint64_t>& table, const std::vector<std::uint64_t>& theta) {
    if (table.size() != s0.table.size() || theta.size() != s0.theta.size())
        throw std::invalid_argument("sync_servers: model shape mismatch");
    s0.table = table;
    s1.table = table;
    s0.theta = theta;
    s1.theta = theta;
    if (s0.table != s1.table || s0.theta != s1.theta)
        throw std::runtime_error("sync_servers: table hash mismatch");
    s0.begin_round();
    s1.begin_round();
}

BaselineUpload client_build_baseline_update(Rng& rng, const SparseUpdate& sparse,
                                            const PaddedIndexSet& padded,
                                            const RingVector& dense_theta,
                                            const ProtocolParams& params) {
    const std::size_t row_len = params.row_len();
    RingVector full(params.ring, std::size_t{params.n_items} * row_len + params.theta_len);
    for (std::size_t slot = 0; slot < padded.size(); ++slot) {
        if (!padded.real_mask[slot]) continue;
        std::size_t base = std::size_t{padded.indices[slot]} * row_len;
        for (std::size_t k = 0; k < row_len; ++k) full.elems[base + k] = sparse.rows[slot].elems[k];
    }
    for (std::size_t i = 0; i < params.theta_len; ++i)
        full.elems[std::size_t{params.n_items} * row_len + i] = dense_theta.elems[i];

    shares::DenseShares sh = shares::ass_split(rng, full);
    BaselineUpload out;
    append_vector_le(sh.share0, out.payload0);
    append_vector_le(sh.share1, out.payload1);
    return out;
}

void server_accumulate_baseline(ServerState& state, const std::vector<std::uint8_t>& payload) {
    const ProtocolParams& P = state.params;
    const std::size_t nb = scalar_wire_size(P.ring);
    const std::size_t n_table = std::size_t{P.n_items} * P.row_len();
    if (payload.size() != (n_table + P.theta_len) * nb)
        throw wire::WireError("baseline share size mismatch", payload.size());
    for (std::size_t i = 0; i < n_table; ++i)
        state.agg_table[i] += read_scalar_le(P.ring, payload.data() + i * nb);
    for (std::size_t i = 0; i < P.theta_len; ++i)
        state.agg_theta[i] += read_scalar_le(P.ring, payload.data() + (n_table + i) * nb);
    state.agg_users += 1;
}

std::vector<std::uint8_t> serialize_full_model(const ServerState& state) {
    std::vector<std::uint8_t> out;
    const RingParams& p = state.params.ring;
    out.reserve((state.table.size() + state.theta.size()) * scalar_wire_size(p));
    for (std::uint64_t v : state.table) append_scalar_le(p, v & p.mask(), out);
    for (std::uint64_t v : state.theta) append_scalar_le(p, v & p.mask(), out);
    return out;
}

std::uint64_t retrieval_req_info_bits(const ProtocolParams& P) {
    return std::uint64_t{P.m_prime} * dpf::key_info_bits(P.domain_bits(), 1, P.ring);
}

std::uint64_t retrieval_resp_info_bits(const ProtocolParams& P) {
    return std::uint64_t{P.m_prime} * P.row_len() * P.ring.bits;
}

std::uint64_t update_info_bits(Variant variant, const ProtocolParams& P) {
    const std::uint64_t theta_bits = std::uint64_t{P.theta_len} * P.ring.bits;
    switch (variant) {
        case Variant::final_opt:
            return std::uint64_t{P.m_prime} * P.row_len() * P.ring.bits + theta_bits;
        case Variant::rowenc:
            return std::uint64_t{P.m_prime} * dpf::key_info_bits(P.domain_bits(), P.row_len(), P.ring) +
                   theta_bits;
        case Variant::init:
            return std::uint64_t{P.m_prime} * P.row_len() *
                       dpf::key_info_bits(P.domain_bits(), 1, P.ring) +
                   theta_bits;
        default:
            return 0;
    }
}

std::uint64_t baseline_download_info_bits(const ProtocolParams& P) {
    return (std::uint64_t{P.n_items} * P.row_len() + P.theta_len) * P.ring.bits;
}

std::uint64_t baseline_upload_info_bits(const ProtocolParams& P) {
    // One full-size additive share to each of the two servers.
    return baseline_download_info_bits(P);
}

}  // namespace secemb::protocol
