#include "secemb/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace secemb::exp {

using nlohmann::json;
using protocol::Variant;

void ExperimentConfig::validate() const {
    ring.validate();
    if (hyper.embed_dim == 0) throw std::invalid_argument("config: embed_dim must be positive");
    if (hyper.clients_per_round == 0)
        throw std::invalid_argument("config: clients_per_round must be positive");
    if (!(hyper.lr > 0)) throw std::invalid_argument("config: lr must be positive");
    if (hyper.reg < 0) throw std::invalid_argument("config: reg must be nonnegative");
    if (hyper.local_epochs == 0) throw std::invalid_argument("config: local_epochs must be positive");
    if (!(train_fraction >= 0 && train_fraction <= 1))
        throw std::invalid_argument("config: train_fraction out of [0,1]");
    if (!(dropout >= 0 && dropout < 1)) throw std::invalid_argument("config: dropout out of [0,1)");
    if (dp_enabled) dp.validate();
}

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct RoundClients {
    std::vector<std::uint32_t> sampled;   // U1
    std::vector<std::uint8_t> survives;   // parallel to sampled (U2 membership)
};

RoundClients sample_round_clients(const World& w) {
    RoundClients rc;
    const std::uint32_t n = w.ds.n_users;
    const std::uint32_t take = std::min(w.cfg.hyper.clients_per_round, n);
    Rng srng = derive_rng(w.cfg.hyper.seed, StreamPurpose::round_sample, {w.round});
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < take; ++i) {
        auto j = i + static_cast<std::uint32_t>(srng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    rc.sampled.assign(pool.begin(), pool.begin() + take);

    Rng drng = derive_rng(w.cfg.hyper.seed, StreamPurpose::round_dropout, {w.round});
    rc.survives.resize(take, 1);
    for (std::uint32_t i = 0; i < take; ++i)
        if (drng.next_double01() < w.cfg.dropout) rc.survives[i] = 0;
    return rc;
}

void capture(World& w, std::uint32_t client, std::uint8_t server, ledger::Stage stage,
             ledger::Direction dir, wire::MessageType type,
             std::span<const std::uint8_t> payload) {
    if (!w.cfg.record_payloads) return;
    w.last_round_messages.push_back(
        {client, server, stage, dir, type, wire::encode_frame(type, payload)});
}

// Plaintext reference pipeline: identical padding/training/quantization, ring
// sums accumulated directly with no key material.
void accumulate_plaintext(World& w, const protocol::SparseUpdate& sparse,
                          const protocol::PaddedIndexSet& padded, const RingVector& theta) {
    const std::size_t row_len = w.params.row_len();
    for (std::size_t slot = 0; slot < padded.size(); ++slot) {
        std::uint64_t* arow =
            w.server0.agg_table.data() + std::size_t{padded.indices[slot]} * row_len;
        for (std::size_t k = 0; k < row_len; ++k) arow[k] += sparse.rows[slot].elems[k];
    }
    for (std::size_t i = 0; i < theta.size(); ++i) w.server0.agg_theta[i] += theta.elems[i];
    w.server0.agg_users += 1;
    w.server1.agg_users += 1;
}

}  // namespace

World make_world(const ExperimentConfig& cfg) {
    cfg.validate();
    World w;
    w.cfg = cfg;

    if (!cfg.dataset_path.empty())
        w.ds = data::load_movielens(cfg.dataset_path, cfg.dataset_name == "ml100k");
    else
        w.ds = data::make_synthetic(cfg.synthetic);

    Rng split_rng = derive_rng(cfg.hyper.seed, StreamPurpose::train_test_split);
    data::split_train_test(split_rng, w.ds, cfg.train_fraction);
    w.global_mean = cfg.hyper.center_ratings ? data::global_train_mean(w.ds) : 0.0;
    w.train = data::train_by_user(w.ds);
    w.test = data::test_by_user(w.ds);

    std::uint32_t m_prime = cfg.hyper.m_prime;
    if (m_prime == 0) {
        std::vector<std::uint64_t> counts(w.ds.n_users);
        for (std::uint32_t u = 0; u < w.ds.n_users; ++u) counts[u] = w.train[u].items.size();
        Rng crng = derive_rng(cfg.hyper.seed, StreamPurpose::count_share);
        m_prime = static_cast<std::uint32_t>(
            shares::secure_count_average(crng, counts, cfg.hyper.m_prime_alpha));
    }
    m_prime = std::min(m_prime, w.ds.n_items);

    w.params.ring = cfg.ring;
    w.params.n_items = w.ds.n_items;
    w.params.embed_dim = cfg.hyper.embed_dim;
    w.params.m_prime = m_prime;
    w.params.theta_len = 0;  // matrix factorization has no dense public parameters
    w.params.round_users = std::max<std::uint32_t>(1, cfg.hyper.clients_per_round);

    w.server0 = protocol::make_server(0, w.params);
    w.server1 = protocol::make_server(1, w.params);
    w.server0.cache_paths = cfg.cache_paths;
    w.server1.cache_paths = cfg.cache_paths;

    // Identical quantized table on both servers.
    Rng mrng = derive_rng(cfg.hyper.seed, StreamPurpose::model_init);
    const std::size_t row_len = w.params.row_len();
    for (std::uint32_t j = 0; j < w.ds.n_items; ++j) {
        for (std::uint32_t k = 0; k < cfg.hyper.embed_dim; ++k) {
            std::uint64_t q = quantize(cfg.ring, mrng.next_gaussian() * cfg.hyper.init_scale);
            w.server0.table[std::size_t{j} * row_len + k] = q;
        }
        w.server0.table[std::size_t{j} * row_len + cfg.hyper.embed_dim] = 0;  // item bias
    }
    w.server1.table = w.server0.table;

    w.clients.resize(w.ds.n_users);
    for (std::uint32_t u = 0; u < w.ds.n_users; ++u) {
        Rng urng = derive_rng(cfg.hyper.seed, StreamPurpose::client_init, {u});
        w.clients[u].p.resize(cfg.hyper.embed_dim);
        for (auto& x : w.clients[u].p) x = urng.next_gaussian() * cfg.hyper.init_scale;
        w.clients[u].bias = 0.0;
    }

    w.optimizer.mode = cfg.optimizer;
    w.optimizer.lr = cfg.hyper.lr;
    return w;
}

void run_round(World& w) {
    const protocol::ProtocolParams& P = w.params;
    const std::size_t row_len = P.row_len();
    const std::size_t nb = scalar_wire_size(P.ring);
    const Variant variant = w.cfg.variant;
    const double dp_clip = w.cfg.dp_enabled ? w.cfg.dp.delta2 : 0.0;
    const double client_scale = w.optimizer.client_scale(w.cfg.hyper);

    w.server0.begin_round();
    w.server1.begin_round();
    w.last_round_messages.clear();
    w.last_secret_gen_seconds = 0.0;

    RoundClients rc = sample_round_clients(w);

    const std::uint64_t full_model_bytes =
        (std::uint64_t{P.n_items} * row_len + P.theta_len) * nb + wire::kFrameOverhead;

    for (std::size_t ci = 0; ci < rc.sampled.size(); ++ci) {
        const std::uint32_t u = rc.sampled[ci];
        Rng pad_rng = derive_rng(w.cfg.hyper.seed, StreamPurpose::padding, {w.round, u});
        Rng crypto_rng = derive_rng(w.cfg.hyper.seed, StreamPurpose::crypto, {w.round, u});

        protocol::PaddedIndexSet padded =
            protocol::pad_or_trunc_idx(pad_rng, w.train[u].items, P.m_prime, P.n_items);

        // Items actually trained this round (the kept subset, in slot order).
        std::vector<std::uint32_t> kept_items;
        std::vector<double> kept_ratings;
        {
            std::unordered_map<std::uint32_t, double> rating_of;
            rating_of.reserve(w.train[u].items.size());
            for (std::size_t i = 0; i < w.train[u].items.size(); ++i)
                rating_of.emplace(w.train[u].items[i], w.train[u].values[i]);
            for (std::size_t slot = 0; slot < padded.size(); ++slot) {
                if (!padded.real_mask[slot]) continue;
                kept_items.push_back(padded.indices[slot]);
                kept_ratings.push_back(rating_of.at(padded.indices[slot]));
            }
        }

        // ---- Stage 1: obtain the relevant embedding rows. ----
        std::unordered_map<std::uint32_t, std::vector<double>> q_rows;
        std::vector<dpf::PathSecret> retained;
        if (variant == Variant::final_opt || variant == Variant::rowenc ||
            variant == Variant::init) {
            double t0 = now_seconds();
            protocol::ClientRetrievalOut r =
                protocol::client_build_retrieval(crypto_rng, padded, P);
            w.last_secret_gen_seconds += now_seconds() - t0;
            retained = std::move(r.retained);

            const std::uint64_t req_bits = protocol::retrieval_req_info_bits(P);
            const std::uint64_t resp_bits = protocol::retrieval_resp_info_bits(P);
            w.ledger.record(w.round, u, ledger::Stage::retrieval, ledger::Direction::up,
                            wire::MessageType::retrieval_req,
                            r.request0.payload.size() + wire::kFrameOverhead, req_bits);
            w.ledger.record(w.round, u, ledger::Stage::retrieval, ledger::Direction::up,
                            wire::MessageType::retrieval_req,
                            r.request1.payload.size() + wire::kFrameOverhead, req_bits);
            capture(w, u, 0, ledger::Stage::retrieval, ledger::Direction::up,
                    wire::MessageType::retrieval_req, r.request0.payload);
            capture(w, u, 1, ledger::Stage::retrieval, ledger::Direction::up,
                    wire::MessageType::retrieval_req, r.request1.payload);

            protocol::RetrievalResponse resp0 =
                protocol::server_answer_retrieval(w.server0, u, r.request0);
            protocol::RetrievalResponse resp1 =
                protocol::server_answer_retrieval(w.server1, u, r.request1);
            w.ledger.record(w.round, u, ledger::Stage::retrieval, ledger::Direction::down,
                            wire::MessageType::retrieval_resp,
                            resp0.payload.size() + wire::kFrameOverhead, resp_bits);
            w.ledger.record(w.round, u, ledger::Stage::retrieval, ledger::Direction::down,
                            wire::MessageType::retrieval_resp,
                            resp1.payload.size() + wire::kFrameOverhead, resp_bits);
            capture(w, u, 0, ledger::Stage::retrieval, ledger::Direction::down,
                    wire::MessageType::retrieval_resp, resp0.payload);
            capture(w, u, 1, ledger::Stage::retrieval, ledger::Direction::down,
                    wire::MessageType::retrieval_resp, resp1.payload);

            q_rows = protocol::client_recover_embeddings(resp0, resp1, padded, P);
        } else {
            // Baseline downloads the full model from one server; the
            // plaintext reference reads the table directly at no wire cost.
            if (variant == Variant::baseline) {
                w.ledger.record(w.round, u, ledger::Stage::retrieval, ledger::Direction::down,
                                wire::MessageType::retrieval_resp, full_model_bytes,
                                protocol::baseline_download_info_bits(P));
                if (w.cfg.record_payloads) {
                    auto model = protocol::serialize_full_model(w.server0);
                    capture(w, u, 0, ledger::Stage::retrieval, ledger::Direction::down,
                            wire::MessageType::retrieval_resp, model);
                }
            }
            for (std::uint32_t item : kept_items) {
                std::vector<double> row(row_len);
                const std::uint64_t* src = w.server0.table.data() + std::size_t{item} * row_len;
                for (std::size_t k = 0; k < row_len; ++k)
                    row[k] = dequantize(P.ring, src[k] & P.ring.mask());
                q_rows.emplace(item, std::move(row));
            }
        }

        // ---- Stage 2: local training. ----
        mf::LocalUpdate upd = mf::local_train_mf(w.clients[u], kept_items, kept_ratings, q_rows,
                                                 w.cfg.hyper, w.global_mean, client_scale, dp_clip);

        // Overflow clip and quantization.
        const double r_user = P.user_range();
        std::vector<RingVector> rows;
        rows.reserve(upd.rows.size());
        for (auto& row : upd.rows) {
            for (double& x : row) x = std::clamp(x, -r_user, r_user);
            rows.push_back(quantize_vector(P.ring, row));
        }
        protocol::SparseUpdate sparse = protocol::pad_or_trunc_emb(padded, upd.items, rows, P);
        RingVector theta(P.ring, P.theta_len);

        // ---- Stage 3: upload, unless this user dropped out after retrieval. ----
        if (!rc.survives[ci]) continue;

        if (variant == Variant::plaintext) {
            accumulate_plaintext(w, sparse, padded, theta);
        } else if (variant == Variant::baseline) {
            protocol::BaselineUpload up =
                protocol::client_build_baseline_update(crypto_rng, sparse, padded, theta, P);
            const std::uint64_t bits = protocol::baseline_upload_info_bits(P);
            w.ledger.record(w.round, u, ledger::Stage::aggregation, ledger::Direction::up,
                            wire::MessageType::update, up.payload0.size() + wire::kFrameOverhead,
                            bits);
            w.ledger.record(w.round, u, ledger::Stage::aggregation, ledger::Direction::up,
                            wire::MessageType::update, up.payload1.size() + wire::kFrameOverhead,
                            bits);
            capture(w, u, 0, ledger::Stage::aggregation, ledger::Direction::up,
                    wire::MessageType::update, up.payload0);
            capture(w, u, 1, ledger::Stage::aggregation, ledger::Direction::up,
                    wire::MessageType::update, up.payload1);
            protocol::server_accumulate_baseline(w.server0, up.payload0);
            protocol::server_accumulate_baseline(w.server1, up.payload1);
        } else {
            double t0 = now_seconds();
            auto [m0, m1] = protocol::client_build_update(crypto_rng, variant, sparse, theta,
                                                          retained, padded, P);
            w.last_secret_gen_seconds += now_seconds() - t0;
            const std::uint64_t bits = protocol::update_info_bits(variant, P);
            w.ledger.record(w.round, u, ledger::Stage::aggregation, ledger::Direction::up,
                            wire::MessageType::update, m0.payload.size() + wire::kFrameOverhead,
                            bits);
            w.ledger.record(w.round, u, ledger::Stage::aggregation, ledger::Direction::up,
                            wire::MessageType::update, m1.payload.size() + wire::kFrameOverhead,
                            bits);
            capture(w, u, 0, ledger::Stage::aggregation, ledger::Direction::up,
                    wire::MessageType::update, m0.payload);
            capture(w, u, 1, ledger::Stage::aggregation, ledger::Direction::up,
                    wire::MessageType::update, m1.payload);
            protocol::server_accumulate_update(w.server0, u, variant, m0);
            protocol::server_accumulate_update(w.server1, u, variant, m1);
        }
    }

    // Optional server-side noise on the aggregate shares.
    if (w.cfg.dp_enabled) {
        const double sigma = dp::noise_sigma(w.cfg.dp);
        for (std::uint8_t s = 0; s < 2; ++s) {
            Rng nrng = derive_rng(w.cfg.hyper.seed, StreamPurpose::dp_noise, {w.round, s});
            std::vector<std::uint64_t>& agg =
                (variant == Variant::plaintext) ? w.server0.agg_table
                                                : (s == 0 ? w.server0.agg_table : w.server1.agg_table);
            for (auto& v : agg) v += quantize(P.ring, sigma * nrng.next_gaussian());
        }
    }

    mf::servers_reconstruct_and_apply(w.server0, w.server1, w.optimizer);

    if (w.cfg.record_payloads) validate_round_messages(w);
    w.round += 1;
}

double evaluate_rmse(const World& w) {
    const std::size_t row_len = w.params.row_len();
    double se = 0;
    std::size_t n = 0;
    std::vector<double> row(row_len);
    for (std::uint32_t u = 0; u < w.ds.n_users; ++u) {
        for (std::size_t i = 0; i < w.test[u].items.size(); ++i) {
            const std::uint32_t item = w.test[u].items[i];
            const std::uint64_t* src = w.server0.table.data() + std::size_t{item} * row_len;
            for (std::size_t k = 0; k < row_len; ++k)
                row[k] = dequantize(w.params.ring, src[k] & w.params.ring.mask());
            double pred = mf::predict(w.clients[u], row, w.global_mean, w.cfg.hyper);
            double e = pred - w.test[u].values[i];
            se += e * e;
            ++n;
        }
    }
    return n ? std::sqrt(se / static_cast<double>(n)) : 0.0;
}

void validate_round_messages(const World& w) {
    if (!w.cfg.record_payloads)
        throw std::logic_error("validate_round_messages: payloads were not recorded");
    const protocol::ProtocolParams& P = w.params;
    const std::uint32_t n = P.domain_bits();

    std::unordered_map<std::uint32_t, std::size_t> req_count, update_count;
    std::optional<std::size_t> req_size, resp_size, update_size;

    for (const CapturedMessage& msg : w.last_round_messages) {
        wire::Frame frame = wire::decode_frame(msg.frame);
        if (frame.type != msg.type) throw std::runtime_error("schema: frame tag mismatch");

        if (msg.dir == ledger::Direction::up) {
            if (frame.type != wire::MessageType::retrieval_req &&
                frame.type != wire::MessageType::update)
                throw std::runtime_error("schema: unexpected client-to-server message type");
        } else if (frame.type != wire::MessageType::retrieval_resp) {
            throw std::runtime_error("schema: unexpected server-to-client message type");
        }

        switch (frame.type) {
            case wire::MessageType::retrieval_req: {
                // Uniform shape: exactly m' keys regardless of the true rated
                // count, and nothing but well-formed key material.
                if (req_size && *req_size != frame.payload.size())
                    throw std::runtime_error("schema: request size varies across clients");
                req_size = frame.payload.size();
                if (frame.payload.size() != P.m_prime * dpf::key_wire_size(n, 1, P.ring))
                    throw std::runtime_error("schema: request size differs from m' keys");
                std::span<const std::uint8_t> bytes(frame.payload);
                std::size_t off = 0;
                for (std::uint32_t i = 0; i < P.m_prime; ++i) {
                    std::size_t used = 0;
                    dpf::DpfKey key = dpf::deserialize_key(bytes.subspan(off), P.ring, 1, &used);
                    if (key.path.domain_bits != n) throw std::runtime_error("schema: bad key");
                    off += used;
                }
                req_count[msg.client] += 1;
                break;
            }
            case wire::MessageType::retrieval_resp: {
                const bool baseline = w.cfg.variant == Variant::baseline;
                const std::size_t expect =
                    baseline ? (std::size_t{P.n_items} * P.row_len() + P.theta_len) *
                                   scalar_wire_size(P.ring)
                             : std::size_t{P.m_prime} * P.row_len() * scalar_wire_size(P.ring);
                if (frame.payload.size() != expect)
                    throw std::runtime_error("schema: response size mismatch");
                if (resp_size && *resp_size != frame.payload.size())
                    throw std::runtime_error("schema: response size varies across clients");
                resp_size = frame.payload.size();
                break;
            }
            case wire::MessageType::update: {
                if (update_size && *update_size != frame.payload.size())
                    throw std::runtime_error("schema: update size varies across clients");
                update_size = frame.payload.size();
                update_count[msg.client] += 1;
                break;
            }
            default:
                throw std::runtime_error("schema: unexpected message type");
        }
    }

    for (const auto& [client, cnt] : req_count)
        if (cnt != 2) throw std::runtime_error("schema: client did not send one request per server");
    for (const auto& [client, cnt] : update_count)
        if (cnt != 2) throw std::runtime_error("schema: client did not send one update per server");
}

Report run_experiment(const ExperimentConfig& cfg) {
    World w = make_world(cfg);
    Report rep;
    rep.cfg = w.cfg;

    double best = 1e99;
    std::uint32_t since_best = 0;
    std::uint32_t r = 0;
    for (; r < cfg.hyper.rounds; ++r) {
        run_round(w);
        const bool last = (r + 1 == cfg.hyper.rounds);
        if ((cfg.eval_every && (r + 1) % cfg.eval_every == 0) || last) {
            double rmse = evaluate_rmse(w);
            ledger::Totals ret = w.ledger.round_totals(r, ledger::Stage::retrieval);
            ledger::Totals agg = w.ledger.round_totals(r, ledger::Stage::aggregation);
            const double denom = cfg.hyper.clients_per_round;
            rep.curve.push_back({r + 1, rmse,
                                 ledger::to_mb(ret.up_bytes + agg.up_bytes) / denom,
                                 ledger::to_mb(ret.down_bytes + agg.down_bytes) / denom});
            if (rmse < best - 1e-6) {
                best = rmse;
                since_best = 0;
            } else {
                ++since_best;
            }
            if (cfg.target_rmse > 0 && rmse <= cfg.target_rmse) {
                ++r;
                break;
            }
            if (cfg.patience > 0 && since_best >= cfg.patience) {
                ++r;
                break;
            }
        }
    }
    rep.rounds_run = r;
    rep.final_rmse = rep.curve.empty() ? evaluate_rmse(w) : rep.curve.back().rmse;

    const double user_rounds =
        static_cast<double>(rep.rounds_run) * cfg.hyper.clients_per_round;
    const ledger::Totals& tot = w.ledger.total();
    rep.avg_up_mb_per_user = ledger::to_mb(tot.up_bytes) / user_rounds;
    rep.avg_down_mb_per_user = ledger::to_mb(tot.down_bytes) / user_rounds;
    rep.avg_up_info_mb_per_user = ledger::to_mb(tot.up_info_bits / 8) / user_rounds;
    rep.avg_down_info_mb_per_user = ledger::to_mb(tot.down_info_bits / 8) / user_rounds;

    rep.baseline_up_mb_per_user =
        ledger::to_mb(protocol::baseline_upload_info_bits(w.params) / 8) * 2.0;
    rep.baseline_down_mb_per_user =
        ledger::to_mb(protocol::baseline_download_info_bits(w.params) / 8);
    if (rep.avg_up_mb_per_user > 0)
        rep.upload_reduction_ratio = rep.baseline_up_mb_per_user / rep.avg_up_mb_per_user;
    if (rep.avg_down_mb_per_user > 0)
        rep.download_reduction_ratio = rep.baseline_down_mb_per_user / rep.avg_down_mb_per_user;

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream csv(cfg.out_dir + "/report.csv");
        csv << rep.to_csv();
        std::ofstream js(cfg.out_dir + "/summary.json");
        js << rep.to_json();
    }
    return rep;
}

std::string Report::to_csv() const {
    std::ostringstream out;
    out << "round,rmse,up_bytes_per_user,down_bytes_per_user,stage,variant\n";
    const std::string vname = protocol::variant_name(cfg.variant);
    for (const EvalPoint& p : curve) {
        out << p.round << "," << p.rmse << ","
            << static_cast<std::uint64_t>(p.up_mb_per_user * 1024 * 1024) << ","
            << static_cast<std::uint64_t>(p.down_mb_per_user * 1024 * 1024) << ",all," << vname
            << "\n";
    }
    return out.str();
}

std::string Report::to_json() const {
    json j;
    j["final_rmse"] = final_rmse;
    j["rounds_run"] = rounds_run;
    j["avg_up_mb_per_user"] = avg_up_mb_per_user;
    j["avg_down_mb_per_user"] = avg_down_mb_per_user;
    j["avg_up_info_mb_per_user"] = avg_up_info_mb_per_user;
    j["avg_down_info_mb_per_user"] = avg_down_info_mb_per_user;
    j["baseline_up_mb_per_user"] = baseline_up_mb_per_user;
    j["baseline_down_mb_per_user"] = baseline_down_mb_per_user;
    j["upload_reduction_ratio"] = upload_reduction_ratio;
    j["download_reduction_ratio"] = download_reduction_ratio;
    j["config"] = json::parse(config_to_json(cfg));
    return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    json j;
    in >> j;
    ExperimentConfig cfg;
    if (j.contains("dataset_path")) cfg.dataset_path = j["dataset_path"];
    if (j.contains("dataset_name")) cfg.dataset_name = j["dataset_name"];
    if (j.contains("variant")) {
        auto v = protocol::parse_variant(j["variant"]);
        if (!v) throw std::runtime_error("load_config: unknown variant");
        cfg.variant = *v;
    }
    if (j.contains("optimizer")) {
        std::string o = j["optimizer"];
        if (o == "mean_sgd") cfg.optimizer = mf::ServerOptimizer::Mode::mean_sgd;
        else if (o == "sum_sgd") cfg.optimizer = mf::ServerOptimizer::Mode::sum_sgd;
        else if (o == "adam") cfg.optimizer = mf::ServerOptimizer::Mode::adam;
        else throw std::runtime_error("load_config: unknown optimizer");
    }
    auto& h = cfg.hyper;
    if (j.contains("embed_dim")) h.embed_dim = j["embed_dim"];
    if (j.contains("lr")) h.lr = j["lr"];
    if (j.contains("reg")) h.reg = j["reg"];
    if (j.contains("rounds")) h.rounds = j["rounds"];
    if (j.contains("clients_per_round")) h.clients_per_round = j["clients_per_round"];
    if (j.contains("m_prime")) h.m_prime = j["m_prime"];
    if (j.contains("m_prime_alpha")) h.m_prime_alpha = j["m_prime_alpha"];
    if (j.contains("local_epochs")) h.local_epochs = j["local_epochs"];
    if (j.contains("seed")) h.seed = j["seed"];
    if (j.contains("init_scale")) h.init_scale = j["init_scale"];
    if (j.contains("center_ratings")) h.center_ratings = j["center_ratings"];
    if (j.contains("clamp_predictions")) h.clamp_predictions = j["clamp_predictions"];
    if (j.contains("ring_bits")) cfg.ring.bits = j["ring_bits"];
    if (j.contains("frac_bits")) cfg.ring.frac_bits = j["frac_bits"];
    if (j.contains("train_fraction")) cfg.train_fraction = j["train_fraction"];
    if (j.contains("dropout")) cfg.dropout = j["dropout"];
    if (j.contains("dp_enabled")) cfg.dp_enabled = j["dp_enabled"];
    if (j.contains("dp_epsilon")) cfg.dp.epsilon = j["dp_epsilon"];
    if (j.contains("dp_delta")) cfg.dp.delta = j["dp_delta"];
    if (j.contains("dp_delta2")) cfg.dp.delta2 = j["dp_delta2"];
    if (j.contains("cache_paths")) cfg.cache_paths = j["cache_paths"];
    if (j.contains("record_payloads")) cfg.record_payloads = j["record_payloads"];
    if (j.contains("eval_every")) cfg.eval_every = j["eval_every"];
    if (j.contains("target_rmse")) cfg.target_rmse = j["target_rmse"];
    if (j.contains("patience")) cfg.patience = j["patience"];
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"];
    if (j.contains("synthetic_users")) cfg.synthetic.n_users = j["synthetic_users"];
    if (j.contains("synthetic_items")) cfg.synthetic.n_items = j["synthetic_items"];
    if (j.contains("synthetic_ratings")) cfg.synthetic.n_ratings = j["synthetic_ratings"];
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["dataset_path"] = cfg.dataset_path;
    j["dataset_name"] = cfg.dataset_name;
    j["variant"] = protocol::variant_name(cfg.variant);
    j["optimizer"] = cfg.optimizer == mf::ServerOptimizer::Mode::adam
                         ? "adam"
                         : (cfg.optimizer == mf::ServerOptimizer::Mode::sum_sgd ? "sum_sgd"
                                                                                : "mean_sgd");
    j["embed_dim"] = cfg.hyper.embed_dim;
    j["lr"] = cfg.hyper.lr;
    j["reg"] = cfg.hyper.reg;
    j["rounds"] = cfg.hyper.rounds;
    j["clients_per_round"] = cfg.hyper.clients_per_round;
    j["m_prime"] = cfg.hyper.m_prime;
    j["m_prime_alpha"] = cfg.hyper.m_prime_alpha;
    j["local_epochs"] = cfg.hyper.local_epochs;
    j["seed"] = cfg.hyper.seed;
    j["init_scale"] = cfg.hyper.init_scale;
    j["center_ratings"] = cfg.hyper.center_ratings;
    j["clamp_predictions"] = cfg.hyper.clamp_predictions;
    j["ring_bits"] = cfg.ring.bits;
    j["frac_bits"] = cfg.ring.frac_bits;
    j["train_fraction"] = cfg.train_fraction;
    j["dropout"] = cfg.dropout;
    j["dp_enabled"] = cfg.dp_enabled;
    j["dp_epsilon"] = cfg.dp.epsilon;
    j["dp_delta"] = cfg.dp.delta;
    j["dp_delta2"] = cfg.dp.delta2;
    j["cache_paths"] = cfg.cache_paths;
    j["eval_every"] = cfg.eval_every;
    j["target_rmse"] = cfg.target_rmse;
    j["patience"] = cfg.patience;
    return j.dump();
}

}  // namespace secemb::exp
