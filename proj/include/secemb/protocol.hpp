#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "secemb/dpf.hpp"
#include "secemb/ring.hpp"
#include "secemb/rng.hpp"
#include "secemb/shares.hpp"
#include "secemb/wire.hpp"

namespace secemb::protocol {

enum class Variant { final_opt, rowenc, init, baseline, plaintext };

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(const std::string& name);

struct ProtocolParams {
    RingParams ring;
    std::uint32_t n_items = 0;      // m
    std::uint32_t embed_dim = 0;    // d; wire rows carry d+1 values (embedding + item bias)
    std::uint32_t m_prime = 0;
    std::uint32_t theta_len = 0;    // dense parameter count
    std::uint32_t round_users = 128;  // n_p, sizes the per-user overflow bound

    std::uint32_t domain_bits() const {
        std::uint32_t n = 1;
        while ((1ULL << n) < n_items) ++n;
        return n;
    }
    std::size_t row_len() const { return embed_dim + 1; }

    // Per-user magnitude bound R_u = (R-1)/n_p: n_p clipped inputs then sum
    // inside the signed range with no wraparound.
    double user_range() const { return (ring.signed_range() - 1.0) / round_users; }

    void validate() const;
};

// A user's private ratings; `items[i]` pairs with `ratings[i]`.
struct InteractionSet {
    std::uint32_t user = 0;
    std::vector<std::uint32_t> items;
    std::vector<double> ratings;
};

// Exactly m' distinct indices; genuine entries come from the interaction set,
// padding entries from outside it.
struct PaddedIndexSet {
    std::vector<std::uint32_t> indices;
    std::vector<std::uint8_t> real_mask;  // 1 = genuine

    std::size_t size() const { return indices.size(); }
};

// m' quantized gradient rows of length d+1 aligned with a PaddedIndexSet;
// padding rows are identically zero.
struct SparseUpdate {
    std::vector<RingVector> rows;
};

struct RetrievalRequest {
    std::vector<std::uint8_t> payload;  // m' serialized DpfKeys, scalar convert words
};
struct RetrievalResponse {
    std::vector<std::uint8_t> payload;  // m' rows of d+1 ring scalars
};
struct UpdateMessage {
    std::vector<std::uint8_t> payload;  // variant-specific key material, then theta share
};

struct ClientRetrievalOut {
    RetrievalRequest request0;
    RetrievalRequest request1;
    std::vector<dpf::PathSecret> retained;  // one per padded slot, reused by build_update
};

// One logical server. Both servers hold identical public tables between
// rounds; per-round retrieval state is kept so partial keys can be evaluated
// in the aggregation stage.
struct ServerState {
    std::uint8_t party = 0;
    ProtocolParams params;
    bool cache_paths = false;  // cache full-domain leaves vs. re-deriving from stored keys

    std::vector<std::uint64_t> table;  // m x (d+1), row-major
    std::vector<std::uint64_t> theta;
    std::vector<std::uint32_t> table32;  // round-scoped narrow copy for the b=32 kernels

    // Round-scoped retrieval state, keyed by user.
    std::unordered_map<std::uint32_t, std::vector<dpf::PathKey>> round_keys;
    std::unordered_map<std::uint32_t, std::vector<dpf::FullDomain>> path_cache;

    // Round-scoped aggregation accumulators (unmasked uint64; reduce mod 2^b on read).
    std::vector<std::uint64_t> agg_table;
    std::vector<std::uint64_t> agg_theta;
    std::uint32_t agg_users = 0;

    void begin_round();
    void drop_round_state();
};

ServerState make_server(std::uint8_t party, const ProtocolParams& params);

// Pad with uniform unrated items or subsample down to exactly m' indices.
PaddedIndexSet pad_or_trunc_idx(Rng& rng, const std::vector<std::uint32_t>& items,
                                std::uint32_t m_prime, std::uint32_t n_items);

// Arrange quantized gradient rows in padded-slot order; padding slots get zero
// rows. `rows_by_item[k]` is the row for item `genuine_items[k]`.
SparseUpdate pad_or_trunc_emb(const PaddedIndexSet& padded,
                              const std::vector<std::uint32_t>& genuine_items,
                              const std::vector<RingVector>& rows_by_item,
                              const ProtocolParams& params);

ClientRetrievalOut client_build_retrieval(Rng& rng, const PaddedIndexSet& padded,
                                          const ProtocolParams& params);

RetrievalResponse server_answer_retrieval(ServerState& state, std::uint32_t user,
                                          const RetrievalRequest& request);

// Reconstruct and dequantize genuine rows; padding rows are discarded.
std::unordered_map<std::uint32_t, std::vector<double>> client_recover_embeddings(
    const RetrievalResponse& resp0, const RetrievalResponse& resp1,
    const PaddedIndexSet& padded, const ProtocolParams& params);

std::pair<UpdateMessage, UpdateMessage> client_build_update(
    Rng& rng, Variant variant, const SparseUpdate& sparse, const RingVector& dense_theta,
    const std::vector<dpf::PathSecret>& retained, const PaddedIndexSet& padded,
    const ProtocolParams& params);

void server_accumulate_update(ServerState& state, std::uint32_t user, Variant variant,
                              const UpdateMessage& message);

// Ring-exact reconstructed aggregates, reduced mod 2^b.
struct Aggregates {
    std::vector<std::uint64_t> table;  // m x (d+1)
    std::vector<std::uint64_t> theta;
    std::uint32_t users = 0;
};

Aggregates reconstruct_aggregates(const ServerState& s0, const ServerState& s1);

// Install a new public table/theta on both servers and verify they agree.
void sync_servers(ServerState& s0, ServerState& s1,
                  const std::vector<std::uint64_t>& table, const std::vector<std::uint64_t>& theta);

// Baseline secure FedRec: full-table download from one server, full-matrix
// additive shares uploaded to both.
struct BaselineUpload {
    std::vector<std::uint8_t> payload0;
    std::vector<std::uint8_t> payload1;
};

BaselineUpload client_build_baseline_update(Rng& rng, const SparseUpdate& sparse,
                                            const PaddedIndexSet& padded,
                                            const RingVector& dense_theta,
                                            const ProtocolParams& params);

void server_accumulate_baseline(ServerState& state, const std::vector<std::uint8_t>& payload);

std::vector<std::uint8_t> serialize_full_model(const ServerState& state);

// Theoretical information content (bits) per message, before byte alignment.
std::uint64_t retrieval_req_info_bits(const ProtocolParams& params);
std::uint64_t retrieval_resp_info_bits(const ProtocolParams& params);
std::uint64_t update_info_bits(Variant variant, const ProtocolParams& params);
std::uint64_t baseline_download_info_bits(const ProtocolParams& params);
std::uint64_t baseline_upload_info_bits(const ProtocolParams& params);

}  // namespace secemb::protocol
